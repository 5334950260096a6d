// Copyright 2026 importantaug contributors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "importantaug/rng.hpp"

#include <cmath>
#include <numbers>

#include "importantaug/errors.hpp"

namespace importantaug {

int64_t Rng::uniform_int(int64_t lo, int64_t hi) {
  if (lo > hi) throw InvalidInputError("uniform_int: lo > hi");
  uint64_t range = static_cast<uint64_t>(hi) - static_cast<uint64_t>(lo) + 1;
  if (range == 0) {  // full 64-bit range
    return static_cast<int64_t>(next_u64());
  }
  // Rejection sampling: discard the tail that would bias the modulus.
  uint64_t limit = UINT64_MAX - UINT64_MAX % range;
  uint64_t r;
  do {
    r = next_u64();
  } while (r >= limit);
  return lo + static_cast<int64_t>(r % range);
}

double Rng::normal() {
  if (have_cached_normal_) {
    have_cached_normal_ = false;
    return cached_normal_;
  }
  double u1 = uniform_real();
  double u2 = uniform_real();
  while (u1 <= 0.0) u1 = uniform_real();
  double radius = std::sqrt(-2.0 * std::log(u1));
  double angle = 2.0 * std::numbers::pi * u2;
  cached_normal_ = radius * std::sin(angle);
  have_cached_normal_ = true;
  return radius * std::cos(angle);
}

}  // namespace importantaug

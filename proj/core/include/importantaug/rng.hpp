// Copyright 2026 importantaug contributors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace importantaug {

// Deterministic random stream with named substream derivation.
//
// Every random decision in the toolkit descends from one master seed through
// named substreams ("data-split", "init", "noise-draw", "roll", "null-replace",
// "shuffle", ...). Substreams are independent: consuming more draws from one
// leaves the others untouched, so ablations stay paired experiments.
//
// The engine is std::mt19937_64 (its output sequence is fixed by the
// standard). The int/real helpers are implemented here instead of
// <random> distributions because libstdc++ and libc++ disagree on
// distribution algorithms; these helpers are part of the reproducibility
// contract.
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

  // Derives an independent stream identified by (name) or (name, index).
  // Derivation depends only on this stream's seed, never on its position.
  Rng substream(std::string_view name) const { return Rng(mix(seed_ ^ hash_name(name))); }
  Rng substream(std::string_view name, uint64_t index) const {
    return Rng(mix(mix(seed_ ^ hash_name(name)) + index));
  }

  uint64_t seed() const { return seed_; }

  uint64_t next_u64() { return engine_(); }

  // Uniform integer in [lo, hi], both inclusive. Unbiased via rejection.
  int64_t uniform_int(int64_t lo, int64_t hi);

  // Uniform double in [0, 1) with 53 random bits.
  double uniform_real() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform_real() < p; }

  // Standard normal via Box-Muller (two uniforms per pair of draws).
  double normal();

  // Fisher-Yates shuffle driven by uniform_int.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(uniform_int(0, static_cast<int64_t>(i) - 1));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  // splitmix64 finalizer; spreads seed material over all 64 bits.
  static uint64_t mix(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  static uint64_t hash_name(std::string_view name) {
    uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (char c : name) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  uint64_t seed_;
  std::mt19937_64 engine_;
  bool have_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace importantaug

// Copyright 2026 importantaug contributors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include "importantaug/rng.hpp"
#include "importantaug/errors.hpp"

using importantaug::Rng;

TEST_CASE("substreams are deterministic and independent") {
  Rng a(1234);
  Rng b(1234);
  Rng sa = a.substream("noise-draw");
  Rng sb = b.substream("noise-draw");
  for (int i = 0; i < 100; ++i) CHECK(sa.next_u64() == sb.next_u64());

  // Consuming one stream leaves a sibling untouched.
  Rng c(1234);
  Rng roll1 = c.substream("roll");
  Rng noise = c.substream("noise-draw");
  for (int i = 0; i < 50; ++i) (void)noise.next_u64();
  Rng d(1234);
  Rng roll2 = d.substream("roll");
  for (int i = 0; i < 100; ++i) CHECK(roll1.next_u64() == roll2.next_u64());

  // Different names and indices give different streams.
  Rng e(1234);
  CHECK(e.substream("a").next_u64() != e.substream("b").next_u64());
  CHECK(e.substream("a", 0).next_u64() != e.substream("a", 1).next_u64());
}

TEST_CASE("uniform_int covers its inclusive range") {
  Rng rng(7);
  bool saw_lo = false, saw_hi = false;
  for (int i = 0; i < 2000; ++i) {
    const int64_t v = rng.uniform_int(-3, 3);
    CHECK(v >= -3);
    CHECK(v <= 3);
    saw_lo = saw_lo || v == -3;
    saw_hi = saw_hi || v == 3;
  }
  CHECK(saw_lo);
  CHECK(saw_hi);
  CHECK_THROWS_AS((void)rng.uniform_int(2, 1), importantaug::InvalidInputError);
}

TEST_CASE("uniform_real stays in [0,1) and shuffle is deterministic") {
  Rng rng(9);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.uniform_real();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
  std::vector<int> v1{1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<int> v2 = v1;
  Rng s1(42), s2(42);
  s1.shuffle(v1);
  s2.shuffle(v2);
  CHECK(v1 == v2);
}

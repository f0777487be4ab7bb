#include <cmath>
#include <cstdint>

#include "doctest.h"
#include "screenlab/rng.hpp"

using screenlab::RandomStream;

TEST_SUITE("rng") {

TEST_CASE("same seed reproduces the same sequence") {
  RandomStream a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds and streams diverge") {
  RandomStream a(42), b(43), c(42, 1);
  int equal_ab = 0, equal_ac = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.next_u64();
    equal_ab += x == b.next_u64();
    equal_ac += x == c.next_u64();
  }
  CHECK(equal_ab == 0);
  CHECK(equal_ac == 0);
}

TEST_CASE("substreams do not depend on parent draw position") {
  RandomStream parent(7);
  RandomStream child_before = parent.substream(3);
  parent.next_u64();
  parent.next_u64();
  RandomStream child_after = parent.substream(3);
  for (int i = 0; i < 100; ++i)
    CHECK(child_before.next_u64() == child_after.next_u64());
}

TEST_CASE("unit draws look uniform") {
  RandomStream rng(123);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    sumsq += u * u;
  }
  const double mean = sum / n;
  // 3 standard errors of a Uniform(0,1) mean.
  CHECK(std::abs(mean - 0.5) < 3.0 * std::sqrt(1.0 / 12.0 / n));
  const double second = sumsq / n;
  CHECK(std::abs(second - 1.0 / 3.0) < 0.003);
}

TEST_CASE("gaussian draws have the right first moments") {
  RandomStream rng(99);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.next_gaussian();
    sum += g;
    sumsq += g * g;
  }
  CHECK(std::abs(sum / n) < 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(sumsq / n == doctest::Approx(1.0).epsilon(0.02));
}

}  // TEST_SUITE

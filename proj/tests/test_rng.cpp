#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "pnqs/rng.hpp"

using namespace pnqs;

TEST_CASE("same seed reproduces the stream, different seeds do not") {
  Xoshiro256pp a(42), b(42), c(43);
  bool all_equal = true, any_equal_c = false;
  for (int i = 0; i < 1000; ++i) {
    const auto va = a.next();
    all_equal = all_equal && va == b.next();
    any_equal_c = any_equal_c || va == c.next();
  }
  CHECK(all_equal);
  CHECK_FALSE(any_equal_c);  // 1000 u64 collisions would be astronomical
}

TEST_CASE("uniform01 lands in [0,1) with the right mean and variance") {
  Xoshiro256pp rng(1);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sumsq += u * u;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean - 0.5) < 5.0 / std::sqrt(12.0 * n));  // 5 sigma
  CHECK(std::abs(var - 1.0 / 12.0) < 0.002);
}

TEST_CASE("uniform_pm1 spans [-1,1) symmetrically") {
  Xoshiro256pp rng(2);
  double sum = 0.0;
  double lo = 1.0, hi = -1.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform_pm1();
    REQUIRE(u >= -1.0);
    REQUIRE(u < 1.0);
    sum += u;
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(std::abs(sum / n) < 5.0 * std::sqrt(1.0 / 3.0 / n));
  CHECK(lo < -0.99);
  CHECK(hi > 0.99);
}

TEST_CASE("normal has unit variance and vanishing skew") {
  Xoshiro256pp rng(3);
  const int n = 200000;
  double m1 = 0.0, m2 = 0.0, m3 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    m1 += x;
    m2 += x * x;
    m3 += x * x * x;
  }
  m1 /= n;
  m2 /= n;
  m3 /= n;
  CHECK(std::abs(m1) < 5.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(m2 - 1.0) < 0.02);
  CHECK(std::abs(m3) < 0.1);  // third moment of N(0,1) is 0, sd ~ sqrt(15/n)
}

TEST_CASE("jump and long_jump give disjoint prefixes") {
  // The jump polynomials guarantee non-overlap; here we check the cheap
  // observable consequence: no value collisions across modest prefixes.
  Xoshiro256pp base(7);
  Xoshiro256pp jumped = base;
  jumped.jump();
  Xoshiro256pp far = base;
  far.long_jump();

  std::set<std::uint64_t> seen;
  for (int i = 0; i < 3000; ++i) seen.insert(base.next());
  int collisions = 0;
  for (int i = 0; i < 3000; ++i) {
    if (seen.count(jumped.next())) ++collisions;
    if (seen.count(far.next())) ++collisions;
  }
  CHECK(collisions == 0);
}

TEST_CASE("make_stream separates regions and indices") {
  const auto s00 = make_stream(9, 0, 0).state();
  CHECK(make_stream(9, 0, 0).state() == s00);  // deterministic
  CHECK(make_stream(9, 0, 1).state() != s00);
  CHECK(make_stream(9, 1, 0).state() != s00);
  CHECK(make_stream(9, 1, 1).state() != make_stream(9, 1, 0).state());
  CHECK(make_stream(10, 0, 0).state() != s00);
}

TEST_CASE("splitmix64 expands seeds 0 and 1 to distinct dense states") {
  // Naive seeding (state = seed) would make small seeds nearly identical.
  Xoshiro256pp zero(0), one(1);
  CHECK(zero.state() != one.state());
  int zero_words = 0;
  for (auto w : zero.state())
    if (w == 0) ++zero_words;
  CHECK(zero_words == 0);
}

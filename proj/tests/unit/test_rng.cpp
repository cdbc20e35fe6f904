#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "vrjp/rng.hpp"

using vrjp::RngStream;

static_assert(std::uniform_random_bit_generator<RngStream>);

TEST_CASE("splitmix64 reference outputs") {
  std::uint64_t s = 0;
  CHECK(vrjp::splitmix64_next(s) == 0xe220a8397b1dcdafULL);
  CHECK(vrjp::splitmix64_next(s) == 0x6e789e6aa1b965f4ULL);
  CHECK(vrjp::splitmix64_next(s) == 0x06c45d188009454fULL);
  s = 1234567;
  CHECK(vrjp::splitmix64_next(s) == 0x599ed017fb08fc85ULL);
  CHECK(vrjp::splitmix64_next(s) == 0x2c73f08458540fa5ULL);
}

TEST_CASE("stream outputs are pinned") {
  // Reference values from an independent implementation of the key
  // derivation and xoshiro256**.
  RngStream a(42);
  CHECK(a() == 0x19e479e2aaa77bfbULL);
  CHECK(a() == 0x5e3efe753be27527ULL);
  CHECK(a() == 0xc3ed7125b780200aULL);
  RngStream b(42, {7, 3});
  CHECK(b() == 0xc5feb99be617cb65ULL);
  CHECK(b() == 0x403ea1527183dd0fULL);
  CHECK(b() == 0x839c5f51e1693a86ULL);
}

TEST_CASE("substream does not depend on parent consumption") {
  RngStream parent(9, {1});
  const RngStream before = parent.substream(5);
  for (int i = 0; i < 100; ++i) parent();
  RngStream after = parent.substream(5);
  RngStream b = before;
  for (int i = 0; i < 10; ++i) CHECK(b() == after());
  RngStream direct(9, {1, 5});
  RngStream again = parent.substream(5);
  CHECK(direct() == again());
}

TEST_CASE("path order matters and distinct paths differ") {
  std::set<std::uint64_t> firsts;
  for (std::uint64_t i = 0; i < 200; ++i) {
    for (std::uint64_t j = 0; j < 5; ++j) firsts.insert(RngStream(3, {i, j})());
  }
  CHECK(firsts.size() == 1000);
  CHECK(RngStream(3, {1, 2})() != RngStream(3, {2, 1})());
  CHECK(RngStream(3)() != RngStream(4)());
}

TEST_CASE("uniform variates stay in range") {
  RngStream r(11);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform_open();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    const double v = r.uniform();
    REQUIRE(v >= 0.0);
    REQUIRE(v < 1.0);
    sum += v;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(lo < 1e-4);
  CHECK(hi > 1 - 1e-4);
}

TEST_CASE("exponential mean and positivity") {
  RngStream r(12);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double e = r.exponential(4.0);
    REQUIRE(e > 0.0);
    sum += e;
  }
  // mean 1/4, sd 1/4
  CHECK(std::abs(sum / n - 0.25) < 4 * 0.25 / std::sqrt(double(n)));
}

TEST_CASE("bernoulli frequency") {
  RngStream r(13);
  int hits = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) hits += r.bernoulli(0.3);
  CHECK(std::abs(hits / double(n) - 0.3) < 4 * std::sqrt(0.21 / n));
  CHECK_FALSE(r.bernoulli(0.0));
  CHECK(r.bernoulli(1.0));
}

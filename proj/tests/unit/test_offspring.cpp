#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "vrjp/errors.hpp"
#include "vrjp/offspring.hpp"
#include "vrjp/rng.hpp"

using namespace vrjp;

TEST_CASE("construction normalizes and validates") {
  const OffspringDistribution nu({{3, 0.25}, {1, 0.5}, {3, 0.25}, {7, 0.0}});
  REQUIRE(nu.support().size() == 2);
  CHECK(nu.support()[0].k == 1);
  CHECK(nu.probability(3) == doctest::Approx(0.5));
  CHECK(nu.probability(7) == 0.0);
  CHECK(nu.mean() == doctest::Approx(2.0));
  CHECK(nu.variance() == doctest::Approx(1.0));
  CHECK(nu.leafless());
  CHECK(nu.max_k() == 3);
  CHECK_THROWS_AS(OffspringDistribution({{1, 0.5}, {2, 0.4}}), DomainError);
  CHECK_THROWS_AS(OffspringDistribution({{1, 1.5}, {2, -0.5}}), DomainError);
  CHECK_THROWS_AS(OffspringDistribution({}), DomainError);
}

TEST_CASE("parse and to_string round trip") {
  const auto nu = OffspringDistribution::parse("0:0.25, 2:0.75");
  CHECK_FALSE(nu.leafless());
  CHECK(nu.mean() == doctest::Approx(1.5));
  CHECK(OffspringDistribution::parse(nu.to_string()) == nu);
  CHECK(OffspringDistribution::parse("2") == OffspringDistribution::deterministic(2));
  CHECK(OffspringDistribution::parse("2").is_deterministic());
  for (const char* bad : {"", "a:1", "1:0.5,", "1:x", "-1:1"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(OffspringDistribution::parse(bad), DomainError);
  }
}

TEST_CASE("with_mean") {
  CHECK(OffspringDistribution::with_mean(2.0) == OffspringDistribution::deterministic(2));
  const auto nu = OffspringDistribution::with_mean(1.5);
  CHECK(nu.mean() == doctest::Approx(1.5));
  CHECK(nu.leafless());
  CHECK_THROWS_AS(OffspringDistribution::with_mean(0.5), DomainError);
}

TEST_CASE("sampling frequencies") {
  const auto nu = OffspringDistribution::parse("0:0.2,1:0.3,4:0.5");
  RngStream rng(1);
  const std::size_t n = 200000;
  std::vector<std::size_t> counts(5, 0);
  for (std::size_t i = 0; i < n; ++i) ++counts.at(nu.sample(rng));
  for (std::uint32_t k : {0u, 1u, 4u}) {
    const double p = nu.probability(k);
    CHECK(within_se(counts[k] / double(n), p, binomial_se(p, n)));
  }
  CHECK(counts[2] == 0);
  CHECK(counts[3] == 0);
}

TEST_CASE("thinning keeps each child with probability 1 - eta") {
  const auto nu = OffspringDistribution::deterministic(2);
  const auto t = nu.thinned(0.25);
  CHECK(t.mean() == doctest::Approx(1.5));
  CHECK(t.probability(0) == doctest::Approx(0.0625));
  CHECK(t.probability(1) == doctest::Approx(0.375));
  CHECK(t.probability(2) == doctest::Approx(0.5625));
  CHECK(nu.thinned(0.0) == nu);
  CHECK(nu.thinned(1.0) == OffspringDistribution::deterministic(0));
  // Composition of thinnings multiplies the keep probabilities.
  const auto law = OffspringDistribution::parse("1:0.3,3:0.7");
  CHECK(law.thinned(0.2).thinned(0.5).mean() == doctest::Approx(law.mean() * 0.8 * 0.5));
  CHECK_THROWS_AS(nu.thinned(1.5), DomainError);
}

TEST_CASE("pgf") {
  const auto nu = OffspringDistribution::parse("0:0.25,2:0.75");
  CHECK(nu.pgf(1.0) == doctest::Approx(1.0));
  CHECK(nu.pgf(0.0) == doctest::Approx(0.25));
  CHECK(nu.pgf(0.5) == doctest::Approx(0.25 + 0.75 * 0.25));
}

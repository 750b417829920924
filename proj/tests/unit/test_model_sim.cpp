#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "auctionmetrics/auction_model.hpp"
#include "auctionmetrics/errors.hpp"
#include "auctionmetrics/simulate.hpp"

using namespace auctionmetrics;

TEST_CASE("model validation") {
  CHECK_THROWS_AS(AuctionModel({PiecewiseCdf::uniform()}), DomainError);
  CHECK_THROWS_AS(AuctionModel({PiecewiseCdf::uniform(), PiecewiseCdf({0.5}, {0.5})}), DomainError);
  const AuctionModel m = uniform_model(3);
  CHECK(m.k() == 3);
  CHECK(m.id() == "uniform3");
  CHECK(m.bid_cdf(1, 0.3) == doctest::Approx(0.3));
}

TEST_CASE("first-price simulation matches order-statistic laws") {
  const std::size_t n = 200000;
  const FpSampleSet s = simulate_fp(uniform_model(3), n, 17);
  REQUIRE(s.size() == n);
  std::size_t below = 0, first = 0;
  for (const auto& o : s.obs) {
    if (o.y <= 0.6) ++below;
    if (o.z == 0) ++first;
  }
  // Pr(max <= 0.6) = 0.216, binomial sd about 9e-4
  CHECK(std::abs(static_cast<double>(below) / n - 0.216) < 0.005);
  CHECK(std::abs(static_cast<double>(first) / n - 1.0 / 3.0) < 0.005);
}

TEST_CASE("second-price simulation records the second-highest bid") {
  const std::size_t n = 200000;
  const SpSampleSet s = simulate_sp(uniform_model(2), n, 4);
  std::size_t below = 0;
  for (const auto& o : s.obs) {
    if (o.y <= 0.5) ++below;
  }
  // Pr(min <= 0.5) = 0.75
  CHECK(std::abs(static_cast<double>(below) / n - 0.75) < 0.005);
}

TEST_CASE("simulation is deterministic and independent of the thread count") {
  const AuctionModel m = uniform_model(2);
  const FpSampleSet a = simulate_fp(m, 20000, 9);
  setenv("AUCTIONMETRICS_THREADS", "1", 1);
  const FpSampleSet b = simulate_fp(m, 20000, 9);
  setenv("AUCTIONMETRICS_THREADS", "3", 1);
  const FpSampleSet c = simulate_fp(m, 20000, 9);
  unsetenv("AUCTIONMETRICS_THREADS");
  CHECK(a.obs == b.obs);
  CHECK(a.obs == c.obs);
  CHECK_FALSE(simulate_fp(m, 100, 10).obs == simulate_fp(m, 100, 11).obs);
}

TEST_CASE("partial-observation oracles") {
  const AuctionModel m = uniform_model(2);
  SimulatedFpOracle fp(m, 5, true);
  std::size_t planted = 0;
  const int n = 100000;
  for (int t = 0; t < n; ++t) planted += fp.query(0.7) == 2;
  // planted bid wins when both bids are at most 0.7
  CHECK(std::abs(static_cast<double>(planted) / n - 0.49) < 0.006);
  CHECK(fp.calls() == static_cast<std::uint64_t>(n));
  CHECK(fp.log().size() == static_cast<std::size_t>(n));

  SimulatedSpOracle sp(m, 6);
  std::size_t q = 0;
  for (int t = 0; t < n; ++t) q += sp.query(0.8).q;
  // at most one bid above 0.8: 1 - 0.2^2
  CHECK(std::abs(static_cast<double>(q) / n - 0.96) < 0.004);
}

TEST_CASE("sample set validation") {
  FpSampleSet s;
  s.k = 2;
  s.obs = {{0.5, 0}, {0.4, 2}};
  CHECK_THROWS_AS(s.validate(), DomainError);
  s.obs = {{1.5, 0}};
  CHECK_THROWS_AS(s.validate(), DomainError);
}

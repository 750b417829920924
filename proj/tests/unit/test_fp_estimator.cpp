#include <doctest.h>

#include <cmath>

#include "auctionmetrics/distance.hpp"
#include "auctionmetrics/errors.hpp"
#include "auctionmetrics/fp_estimator.hpp"
#include "auctionmetrics/simulate.hpp"

using namespace auctionmetrics;

namespace {

FpSampleSet four_auctions() {
  FpSampleSet s;
  s.k = 2;
  s.obs = {{0.2, 0}, {0.5, 1}, {0.7, 0}, {0.9, 1}};
  return s;
}

}  // namespace

TEST_CASE("empirical H and H_i") {
  const FpSampleSet s = four_auctions();
  const PiecewiseCdf h = empirical_H(s);
  CHECK(h(0.1) == 0.0);
  CHECK(h(0.5) == 0.5);
  CHECK(h(0.95) == 1.0);
  const SubCdf h0 = empirical_Hi(s, 0);
  CHECK(h0(0.6) == 0.25);
  CHECK(h0.total_mass() == 0.5);
}

TEST_CASE("estimator reproduces a hand computation") {
  FpEstimatorConfig c;
  c.p = 0.0;
  c.gamma = 1.0;
  c.eps = 0.1;
  const FpEstimate est = estimate_bid_cdf_effective(four_auctions(), c);
  // weights 1/max(H(Y), 1/2): Y=0.2 -> 2, 0.5 -> 2, 0.7 -> 4/3, 0.9 -> 1, each over n = 4
  CHECK(est.cdfs[0](0.1) == doctest::Approx(std::exp(-(2.0 + 4.0 / 3.0) / 4.0)));
  CHECK(est.cdfs[0](0.3) == doctest::Approx(std::exp(-1.0 / 3.0)));
  CHECK(est.cdfs[0](0.8) == doctest::Approx(1.0));
  CHECK(est.cdfs[1](0.1) == doctest::Approx(std::exp(-0.75)));
  CHECK(est.cdfs[1](0.6) == doctest::Approx(std::exp(-0.25)));
  CHECK(est.cdfs[1](0.95) == doctest::Approx(1.0));
  CHECK(est.clip_rate == doctest::Approx(0.25));
}

TEST_CASE("identification formula on exact inputs") {
  // two uniforms: H = x^2, dH_i = x dx
  for (double x : {0.1, 0.3, 0.5, 0.9}) {
    CHECK(identify_bid_cdf([](double t) { return t * t; }, [](double t) { return t; }, x) ==
          doctest::Approx(x).epsilon(1e-9));
  }
  // F = (x, x^2, x): H = x^4, dH_2 = 2x * x * x dx
  CHECK(identify_bid_cdf([](double t) { return std::pow(t, 4); }, [](double t) { return 2 * t * t * t; },
                         0.4) == doctest::Approx(0.16).epsilon(1e-9));
}

TEST_CASE("effective-support estimate converges on uniforms") {
  FpEstimatorConfig c;
  c.p = 0.3;
  c.gamma = 0.09;
  c.eps = 0.045;
  const FpEstimate est = estimate_bid_cdf_effective(simulate_fp(uniform_model(2), 100000, 12), c);
  for (const auto& f : est.cdfs) CHECK(sup_distance(f, PiecewiseCdf::uniform(), 0.3, 1.0) < 0.03);
}

TEST_CASE("full-support estimate is zero below eta") {
  const FpEstimate est = estimate_bid_cdf_full(simulate_fp(uniform_model(2), 50000, 2), 1.0, 0.2);
  CHECK(est.p == doctest::Approx(0.1));
  CHECK(est.cdfs[0](0.05) == 0.0);
  CHECK(wasserstein1(est.cdfs[0], PiecewiseCdf::uniform()) < 0.1);
}

TEST_CASE("forward-difference density of x^2") {
  const PiecewiseCdf f = PiecewiseCdf::tabulate([](double x) { return x * x; }, 1001);
  const double h = 0.02;
  const PiecewiseFunction d = estimate_density(f, h, 0.1);
  for (double x : {0.15, 0.4, 0.77, 0.95}) CHECK(d(x) == doctest::Approx(2 * x + h).epsilon(1e-4));
}

TEST_CASE("config validation") {
  FpEstimatorConfig c;
  c.gamma = 0.1;
  c.eps = 0.2;
  CHECK_THROWS_AS(c.validate(), ParameterError);
  CHECK_THROWS_AS(recommended_bandwidth(0.0, 1.0), ParameterError);
  CHECK(recommended_bandwidth(0.04, 1.0) == doctest::Approx(0.2));
}

TEST_CASE("bisection finds a level crossing") {
  const double x = bisect_level([](double t) { return t * t; }, 0.25, 0.0, 1.0, 40);
  CHECK(x == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("partial-observation estimator respects its budget") {
  const AuctionModel m = uniform_model(2);
  SimulatedFpOracle oracle(m, 1);
  FpPartialConfig c;
  c.max_oracle_calls = 100;
  CHECK_THROWS_AS(fp_partial_estimate(oracle, c), EstimatorError);
}

TEST_CASE("partial-observation estimator on uniforms") {
  const AuctionModel m = uniform_model(2);
  SimulatedFpOracle oracle(m, 2);
  FpPartialConfig c;
  const FpPartialEstimate est = fp_partial_estimate(oracle, c);
  CHECK(est.oracle_calls == oracle.calls());
  CHECK(est.oracle_calls <= c.max_oracle_calls);
  for (const auto& f : est.cdfs) CHECK(sup_distance(f, PiecewiseCdf::uniform(), 0.5, 1.0) <= 0.15);
}

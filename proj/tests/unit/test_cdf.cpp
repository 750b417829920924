#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "auctionmetrics/cdf.hpp"
#include "auctionmetrics/errors.hpp"
#include "auctionmetrics/random.hpp"

using namespace auctionmetrics;

namespace {

// Isotonic least squares by the min-max formula, O(n^3).
std::vector<double> isotonic_minmax(const std::vector<double>& y) {
  const std::size_t n = y.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double best = -INFINITY;
    for (std::size_t j = 0; j <= i; ++j) {
      double inner = INFINITY;
      for (std::size_t l = i; l < n; ++l) {
        const double mean = std::accumulate(y.begin() + j, y.begin() + l + 1, 0.0) / (l - j + 1);
        inner = std::min(inner, mean);
      }
      best = std::max(best, inner);
    }
    out[i] = best;
  }
  return out;
}

}  // namespace

TEST_CASE("step cdf evaluation, left limits and inverse") {
  const PiecewiseCdf f({0.2, 0.5, 0.9}, {0.1, 0.4, 1.0});
  CHECK(f(0.0) == 0.0);
  CHECK(f(0.2) == 0.1);
  CHECK(f(0.3) == 0.1);
  CHECK(f(0.5) == 0.4);
  CHECK(f(0.95) == 1.0);
  CHECK(f.left_limit(0.5) == 0.1);
  CHECK(f.left_limit(0.2) == 0.0);
  CHECK(f.inverse(0.1) == 0.2);
  CHECK(f.inverse(0.2) == 0.5);
  CHECK(f.inverse(1.0) == 0.9);
  CHECK(f.is_full_cdf());
}

TEST_CASE("linear cdf interpolates") {
  const PiecewiseCdf f({0.0, 0.5, 1.0}, {0.0, 0.25, 1.0}, Interpolation::Linear);
  CHECK(f(0.25) == doctest::Approx(0.125));
  CHECK(f(0.75) == doctest::Approx(0.625));
  CHECK(f.inverse(0.625) == doctest::Approx(0.75));
  CHECK(PiecewiseCdf::uniform()(0.3) == doctest::Approx(0.3));
}

TEST_CASE("sub-distribution reports its terminal mass") {
  const PiecewiseCdf f({0.3, 0.6}, {0.2, 0.5});
  CHECK_FALSE(f.is_full_cdf());
  CHECK(f.terminal_value() == 0.5);
  CHECK_THROWS_AS(f.inverse(0.7), DomainError);
}

TEST_CASE("constructor rejects malformed input") {
  CHECK_THROWS_AS(PiecewiseCdf({}, {}), DomainError);
  CHECK_THROWS_AS(PiecewiseCdf({0.5, 0.5}, {0.1, 0.2}), DomainError);
  CHECK_THROWS_AS(PiecewiseCdf({0.2, 0.5}, {0.4, 0.3}), DomainError);
  CHECK_THROWS_AS(PiecewiseCdf({0.2, 1.5}, {0.4, 1.0}), DomainError);
  CHECK_THROWS_AS(PiecewiseCdf({0.2, 0.5}, {0.4, 1.2}), DomainError);
}

TEST_CASE("product cdf matches the pointwise product") {
  RandomStream rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<PiecewiseCdf> fs;
    for (int f = 0; f < 3; ++f) {
      std::vector<double> b, v;
      double x = 0.0, y = 0.0;
      for (int j = 0; j < 6; ++j) {
        x += 0.01 + 0.15 * rng.uniform();
        y += (1.0 - y) * rng.uniform();
        b.push_back(std::min(x, 1.0));
        v.push_back(y);
        if (x >= 1.0) break;
      }
      fs.emplace_back(b, v);
    }
    const PiecewiseCdf prod = product_cdf(fs);
    for (int s = 0; s < 200; ++s) {
      const double x = rng.uniform();
      CHECK(prod(x) == doctest::Approx(fs[0](x) * fs[1](x) * fs[2](x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("pool-adjacent-violators agrees with the min-max formula") {
  RandomStream rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> y(1 + trial % 12);
    for (auto& v : y) v = rng.uniform();
    const auto fast = isotonic_nondecreasing(y);
    const auto slow = isotonic_minmax(y);
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(fast[i] == doctest::Approx(slow[i]).epsilon(1e-12));
  }
}

TEST_CASE("bounded density model integrates its density") {
  const auto m = BoundedDensityModel::from_knots({0.0, 0.4, 1.0}, {0.5, 1.2, 1.0});
  // Simpson on each linear piece is exact; compare against a fine Riemann sum as well.
  for (double x : {0.1, 0.4, 0.55, 0.9}) {
    const int steps = 200000;
    double acc = 0.0;
    for (int s = 0; s < steps; ++s) acc += m.density((s + 0.5) * x / steps) * x / steps;
    CHECK(m.cdf(x) == doctest::Approx(acc).epsilon(1e-8));
    CHECK(m.quantile(m.cdf(x)) == doctest::Approx(x).epsilon(1e-10));
  }
  CHECK(m.alpha_lo() == 0.5);
  CHECK(m.eta_hi() == 1.2);
  CHECK_THROWS(BoundedDensityModel::from_knots({0.0, 1.0}, {1.0, 2.0}));
}

TEST_CASE("inverse-transform sampling reproduces the cdf") {
  const PiecewiseCdf f({0.0, 0.5, 1.0}, {0.0, 0.8, 1.0}, Interpolation::Linear);
  RandomStream rng(5);
  std::vector<double> xs(40000);
  for (auto& x : xs) x = sample(f, rng);
  const PiecewiseCdf emp = empirical_cdf(xs);
  for (double x : {0.1, 0.3, 0.5, 0.7, 0.9}) CHECK(std::abs(emp(x) - f(x)) < 0.015);
}

TEST_CASE("random streams are reproducible and split independently") {
  RandomStream a(42), b(42);
  for (int i = 0; i < 10; ++i) CHECK(a() == b());
  CHECK(RandomStream(42).split(1)() != RandomStream(42).split(2)());
}

#include <doctest.h>

#include <cmath>

#include "auctionmetrics/distance.hpp"
#include "auctionmetrics/errors.hpp"
#include "auctionmetrics/random.hpp"

using namespace auctionmetrics;

namespace {

PiecewiseCdf random_staircase(RandomStream& rng, Interpolation m = Interpolation::Step) {
  std::vector<double> b, v;
  double x = 0.0, y = 0.0;
  const int pieces = 2 + static_cast<int>(rng.uniform() * 8);
  for (int j = 0; j < pieces; ++j) {
    x += 1.0 / pieces * rng.uniform() + 1e-3;
    y += (1.0 - y) * rng.uniform();
    b.push_back(std::min(x, 1.0));
    v.push_back(y);
    if (x >= 1.0) break;
  }
  if (b.back() < 1.0) {
    b.push_back(1.0);
    v.push_back(1.0);
  } else {
    v.back() = 1.0;
  }
  if (m == Interpolation::Linear) {
    b.insert(b.begin(), 0.0);
    v.insert(v.begin(), 0.0);
    if (b[1] == 0.0) {
      b.erase(b.begin());
      v.erase(v.begin());
    }
  }
  return PiecewiseCdf(b, v, m);
}

double grid_sup(const PiecewiseCdf& f, const PiecewiseCdf& g, double lo, double hi, int steps) {
  double d = 0.0;
  for (int s = 0; s <= steps; ++s) {
    const double x = lo + (hi - lo) * s / steps;
    d = std::max(d, std::abs(f(x) - g(x)));
  }
  return d;
}

double riemann_l1(const PiecewiseCdf& f, const PiecewiseCdf& g, int steps) {
  double acc = 0.0;
  for (int s = 0; s < steps; ++s) {
    const double x = (s + 0.5) / steps;
    acc += std::abs(f(x) - g(x)) / steps;
  }
  return acc;
}

// Brute-force Levy feasibility on a fine grid.
bool grid_levy_ok(const PiecewiseCdf& f, const PiecewiseCdf& g, double eps, int steps) {
  for (int s = 0; s <= steps; ++s) {
    const double x = -0.5 + 2.0 * s / steps;
    if (g(x) > f(x + eps) + eps + 1e-12) return false;
    if (f(x) > g(x + eps) + eps + 1e-12) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("kolmogorov distance of point masses and uniforms") {
  CHECK(kolmogorov(PiecewiseCdf::point_mass(0.2), PiecewiseCdf::point_mass(0.7)) == 1.0);
  const PiecewiseCdf half({0.0, 1.0}, {0.0, 1.0}, Interpolation::Linear);
  const PiecewiseCdf sq = PiecewiseCdf::tabulate([](double x) { return x * x; }, 2001);
  CHECK(kolmogorov(half, sq) == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("kolmogorov is never below a dense grid search") {
  RandomStream rng(21);
  for (int t = 0; t < 40; ++t) {
    const PiecewiseCdf f = random_staircase(rng), g = random_staircase(rng, Interpolation::Linear);
    const double exact = kolmogorov(f, g);
    const double grid = grid_sup(f, g, 0.0, 1.0, 100000);
    CHECK(exact >= grid - 1e-12);
    CHECK(exact <= grid + 0.02);
  }
}

TEST_CASE("sup distance on a sub-range") {
  const PiecewiseCdf u = PiecewiseCdf::uniform();
  const PiecewiseCdf f({0.0, 0.5, 1.0}, {0.0, 0.7, 1.0}, Interpolation::Linear);
  CHECK(sup_distance(u, f, 0.0, 1.0) == doctest::Approx(0.2));
  CHECK(sup_distance(u, f, 0.9, 1.0) == doctest::Approx(0.04));
}

TEST_CASE("wasserstein1 matches numerical integration") {
  RandomStream rng(8);
  for (int t = 0; t < 40; ++t) {
    const PiecewiseCdf f = random_staircase(rng, t % 2 ? Interpolation::Linear : Interpolation::Step);
    const PiecewiseCdf g = random_staircase(rng, Interpolation::Linear);
    CHECK(wasserstein1(f, g) == doctest::Approx(riemann_l1(f, g, 400000)).epsilon(1e-3));
  }
  CHECK(wasserstein1(PiecewiseCdf::point_mass(0.1), PiecewiseCdf::point_mass(0.6)) ==
        doctest::Approx(0.5));
}

TEST_CASE("levy distance of point masses is their separation") {
  CHECK(levy(PiecewiseCdf::point_mass(0.2), PiecewiseCdf::point_mass(0.5)) ==
        doctest::Approx(0.3).epsilon(1e-9));
  CHECK(levy(PiecewiseCdf::uniform(), PiecewiseCdf::uniform()) == doctest::Approx(0.0));
}

TEST_CASE("levy is the feasibility threshold of a brute-force check") {
  RandomStream rng(99);
  for (int t = 0; t < 25; ++t) {
    const PiecewiseCdf f = random_staircase(rng, Interpolation::Linear);
    const PiecewiseCdf g = random_staircase(rng, Interpolation::Linear);
    const double l = levy(f, g);
    CHECK(l <= kolmogorov(f, g) + 1e-12);
    CHECK(grid_levy_ok(f, g, l + 1e-6, 40000));
    if (l > 1e-3) CHECK_FALSE(grid_levy_ok(f, g, l - 1e-3, 40000));
  }
}

TEST_CASE("l1 distance between piecewise functions") {
  const PiecewiseFunction a({0.0, 1.0}, {1.0, 1.0}, Interpolation::Step);
  const PiecewiseFunction b({0.0, 1.0}, {0.0, 2.0}, Interpolation::Linear);
  // |1 - 2x| integrates to 1/2 on [0,1]
  CHECK(l1_distance(a, b, 0.0, 1.0) == doctest::Approx(0.5));
  CHECK(l1_distance(a, b, 0.0, 0.5) == doctest::Approx(0.25));
}

TEST_CASE("dkw band") {
  CHECK(dkw_band(1000, 0.05) == doctest::Approx(std::sqrt(std::log(40.0) / 2000.0)));
  CHECK_THROWS_AS(dkw_band(0, 0.05), ParameterError);
  CHECK_THROWS_AS(dkw_band(10, 1.5), ParameterError);
}

#include "auctionmetrics/distance.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "auctionmetrics/errors.hpp"

namespace auctionmetrics {
namespace {

template <class A, class B>
std::vector<double> merged_points(const A& a, const B& b) {
  std::vector<double> pts(a.breakpoints().begin(), a.breakpoints().end());
  pts.insert(pts.end(), b.breakpoints().begin(), b.breakpoints().end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

double right_value(const PiecewiseCdf& f, double x) { return f(x); }

double right_value(const PiecewiseFunction& f, double x) {
  return x >= f.breakpoints().back() ? 0.0 : f(x);
}

// Integral of |d| over a segment where d moves linearly from d0 to d1.
double abs_linear_integral(double d0, double d1, double width) {
  if ((d0 >= 0.0 && d1 >= 0.0) || (d0 <= 0.0 && d1 <= 0.0)) {
    return 0.5 * (std::abs(d0) + std::abs(d1)) * width;
  }
  const double a = std::abs(d0), b = std::abs(d1);
  return 0.5 * (a * a + b * b) / (a + b) * width;
}

// Both arguments are piecewise linear or constant between merged breakpoints,
// so the difference is linear on every open segment.
template <class A, class B>
double integrate_abs_difference(const A& f, const B& g, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  std::vector<double> pts{lo};
  for (double x : merged_points(f, g)) {
    if (x > lo && x < hi) pts.push_back(x);
  }
  pts.push_back(hi);
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
    const double a = pts[j], b = pts[j + 1];
    const double d0 = right_value(f, a) - right_value(g, a);
    const double d1 = f.left_limit(b) - g.left_limit(b);
    total += abs_linear_integral(d0, d1, b - a);
  }
  return total;
}

// sup_x [lhs(x) - rhs(x + shift)] where the rhs argument is evaluated exactly at
// its own breakpoints when the candidate comes from them.
double sup_shifted_gap(const PiecewiseCdf& lhs, const PiecewiseCdf& rhs, double shift) {
  double best = -1.0;
  auto consider = [&](double left_val, double val, double rhs_left, double rhs_val) {
    best = std::max({best, val - rhs_val, left_val - rhs_left});
  };
  for (double x : lhs.breakpoints()) {
    consider(lhs.left_limit(x), lhs(x), rhs.left_limit(x + shift), rhs(x + shift));
  }
  for (double y : rhs.breakpoints()) {
    const double x = y - shift;
    consider(lhs.left_limit(x), lhs(x), rhs.left_limit(y), rhs(y));
  }
  return best;
}

}  // namespace

double kolmogorov(const PiecewiseCdf& f, const PiecewiseCdf& g) {
  double best = 0.0;
  for (double x : merged_points(f, g)) {
    best = std::max({best, std::abs(f(x) - g(x)), std::abs(f.left_limit(x) - g.left_limit(x))});
  }
  return best;
}

double sup_distance(const PiecewiseCdf& f, const PiecewiseCdf& g, double lo, double hi) {
  if (hi < lo) throw DomainError("sup_distance: empty interval");
  double best = std::max(std::abs(f(lo) - g(lo)), std::abs(f(hi) - g(hi)));
  if (hi > lo) best = std::max(best, std::abs(f.left_limit(hi) - g.left_limit(hi)));
  for (double x : merged_points(f, g)) {
    if (x <= lo || x > hi) continue;
    best = std::max({best, std::abs(f(x) - g(x)), std::abs(f.left_limit(x) - g.left_limit(x))});
  }
  return best;
}

bool levy_feasible(const PiecewiseCdf& f, const PiecewiseCdf& g, double eps) {
  // G(x) <= F(x + eps) + eps  and  F(x) <= G(x + eps) + eps
  return sup_shifted_gap(g, f, eps) <= eps && sup_shifted_gap(f, g, eps) <= eps;
}

double levy(const PiecewiseCdf& f, const PiecewiseCdf& g) {
  const double dk = kolmogorov(f, g);
  if (dk == 0.0) return 0.0;
  double lo = 0.0, hi = std::min(dk, 1.0);
  for (int it = 0; it < 60 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (levy_feasible(f, g, mid)) hi = mid; else lo = mid;
  }
  return hi;
}

double wasserstein1(const PiecewiseCdf& f, const PiecewiseCdf& g) {
  return integrate_abs_difference(f, g, 0.0, 1.0);
}

double l1_distance(const PiecewiseFunction& f, const PiecewiseFunction& g, double lo, double hi) {
  return integrate_abs_difference(f, g, lo, hi);
}

double dkw_band(std::size_t n, double delta) {
  if (n < 1) throw ParameterError("dkw_band needs n >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("dkw_band needs delta in (0,1)");
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
}

}  // namespace auctionmetrics

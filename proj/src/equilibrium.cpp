#include "auctionmetrics/equilibrium.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <sstream>

#include "auctionmetrics/errors.hpp"

namespace auctionmetrics {
namespace {

// int_a^b of a linear function from fa to fb raised to the power p.
double linear_power_integral(double fa, double fb, std::size_t p, double width) {
  double acc = 0.0;
  double pa = 1.0;
  for (std::size_t j = 0; j <= p; ++j) {
    acc += pa * std::pow(fb, static_cast<double>(p - j));
    pa *= fa;
  }
  return width * acc / static_cast<double>(p + 1);
}

double power_integral(const PiecewiseCdf& f, std::size_t p, double v) {
  std::vector<double> pts{0.0};
  for (double x : f.breakpoints()) {
    if (x > 0.0 && x < v) pts.push_back(x);
  }
  pts.push_back(v);
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
    const double a = pts[j], b = pts[j + 1];
    if (f.interpolation() == Interpolation::Step) {
      total += (b - a) * std::pow(f(a), static_cast<double>(p));
    } else {
      total += linear_power_integral(f(a), f.left_limit(b), p, b - a);
    }
  }
  return total;
}

// Five-point Gauss-Legendre on [a, b].
template <class Fn>
double gauss5(Fn&& fn, double a, double b) {
  static constexpr std::array<double, 5> x{0.0, -0.5384693101056831, 0.5384693101056831,
                                           -0.9061798459386640, 0.9061798459386640};
  static constexpr std::array<double, 5> w{0.5688888888888889, 0.4786286704993665,
                                           0.4786286704993665, 0.2369268850561891,
                                           0.2369268850561891};
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t j = 0; j < 5; ++j) s += w[j] * fn(mid + half * x[j]);
  return s * half;
}

void check_bid_args(std::size_t k, double v) {
  if (k < 2) throw DomainError("equilibrium bid needs k >= 2");
  if (!(v >= 0.0 && v <= 1.0)) throw DomainError("value outside [0,1]");
}

double finish_bid(double v, double integral, double fv, std::size_t p) {
  const double denom = std::pow(fv, static_cast<double>(p));
  if (!(denom > 0.0)) return 0.0;
  return std::clamp(v - integral / denom, 0.0, v);
}

struct Trajectory {
  bool crashed = false;
  std::vector<std::vector<double>> alpha;  // [i][j], j = 0 .. N-1, alpha[.][0] unset
};

class ShootingSystem {
 public:
  ShootingSystem(const AuctionModel& model) : model_(model), k_(model.k()) {}

  // Returns nullopt on a collision (alpha_i <= b or a non-positive slope).
  std::optional<std::vector<double>> rhs(double b, const std::vector<double>& a) const {
    std::vector<double> d(k_);
    double s = 0.0;
    for (std::size_t i = 0; i < k_; ++i) {
      d[i] = a[i] - b;
      if (!(d[i] > 0.0) || !std::isfinite(a[i])) return std::nullopt;
      s += 1.0 / d[i];
    }
    std::vector<double> out(k_);
    const double kk = static_cast<double>(k_ - 1);
    for (std::size_t i = 0; i < k_; ++i) {
      const double y = s / kk - 1.0 / d[i];
      const auto& g = model_.value_dists()[i];
      const double x = std::clamp(a[i], 0.0, 1.0);
      const double dens = g.density(x);
      if (!(y > 0.0) || !(dens > 0.0)) return std::nullopt;
      out[i] = g.cdf(x) / dens * y;
      if (!std::isfinite(out[i])) return std::nullopt;
    }
    return out;
  }

  Trajectory integrate(double eta, std::size_t n) const {
    Trajectory t;
    t.alpha.assign(k_, std::vector<double>(n, 0.0));
    const double h = eta / static_cast<double>(n - 1);
    std::vector<double> a(k_, 1.0);
    for (std::size_t i = 0; i < k_; ++i) t.alpha[i][n - 1] = 1.0;
    auto axpy = [&](const std::vector<double>& base, const std::vector<double>& dir, double c) {
      std::vector<double> r(k_);
      for (std::size_t i = 0; i < k_; ++i) r[i] = base[i] + c * dir[i];
      return r;
    };
    for (std::size_t j = n - 1; j > 1; --j) {
      const double b = h * static_cast<double>(j);
      const double step = -h;
      auto k1 = rhs(b, a);
      if (!k1) return crash(t);
      auto k2 = rhs(b + 0.5 * step, axpy(a, *k1, 0.5 * step));
      if (!k2) return crash(t);
      auto k3 = rhs(b + 0.5 * step, axpy(a, *k2, 0.5 * step));
      if (!k3) return crash(t);
      auto k4 = rhs(b + step, axpy(a, *k3, step));
      if (!k4) return crash(t);
      for (std::size_t i = 0; i < k_; ++i) {
        a[i] += step / 6.0 * ((*k1)[i] + 2.0 * (*k2)[i] + 2.0 * (*k3)[i] + (*k4)[i]);
        t.alpha[i][j - 1] = a[i];
      }
      if (!rhs(b + step, a)) return crash(t);
    }
    return t;
  }

 private:
  static Trajectory crash(Trajectory& t) {
    t.crashed = true;
    return std::move(t);
  }

  const AuctionModel& model_;
  std::size_t k_;
};

}  // namespace

double symmetric_equilibrium_bid(const PiecewiseCdf& value_cdf, std::size_t k, double v) {
  check_bid_args(k, v);
  if (v == 0.0) return 0.0;
  return finish_bid(v, power_integral(value_cdf, k - 1, v), value_cdf(v), k - 1);
}

double symmetric_equilibrium_bid(const Distribution& value_dist, std::size_t k, double v) {
  if (const auto* p = value_dist.as_piecewise()) return symmetric_equilibrium_bid(*p, k, v);
  check_bid_args(k, v);
  if (v == 0.0) return 0.0;
  const auto& m = *value_dist.as_density();
  const double pw = static_cast<double>(k - 1);
  auto integrand = [&](double x) { return std::pow(m.cdf(x), pw); };
  double total = 0.0;
  const auto knots = m.knots();
  for (std::size_t j = 0; j + 1 < knots.size() && knots[j] < v; ++j) {
    const double a = knots[j], b = std::min(knots[j + 1], v);
    constexpr int kSub = 8;
    for (int s = 0; s < kSub; ++s) {
      total += gauss5(integrand, a + (b - a) * s / kSub, a + (b - a) * (s + 1) / kSub);
    }
  }
  return finish_bid(v, total, m.cdf(v), k - 1);
}

double InverseBidProfile::inverse_bid(std::size_t i, double bid) const {
  const auto& a = alpha.at(i);
  if (bid <= 0.0) return a.front();
  if (bid >= eta) return a.back();
  auto it = std::upper_bound(b.begin(), b.end(), bid);
  const auto j = static_cast<std::size_t>(it - b.begin()) - 1;
  const double w = (bid - b[j]) / (b[j + 1] - b[j]);
  return a[j] + w * (a[j + 1] - a[j]);
}

double InverseBidProfile::bid(std::size_t i, double value) const {
  const auto& a = alpha.at(i);
  if (value <= a.front()) return b.front();
  if (value >= a.back()) return b.back();
  auto it = std::upper_bound(a.begin(), a.end(), value);
  const auto j = static_cast<std::size_t>(it - a.begin()) - 1;
  const double w = (value - a[j]) / (a[j + 1] - a[j]);
  return b[j] + w * (b[j + 1] - b[j]);
}

InverseBidProfile solve_asymmetric_equilibrium(const AuctionModel& model, std::size_t grid_size,
                                               double tol) {
  if (!model.has_values()) throw DomainError("equilibrium solver needs value distributions");
  if (grid_size < 3) throw ParameterError("equilibrium grid needs at least 3 points");
  if (!(tol > 0.0)) throw ParameterError("equilibrium tolerance must be positive");
  const ShootingSystem sys(model);
  double lo = 0.0, hi = 1.0;
  std::optional<Trajectory> best;
  double best_eta = 0.0;
  std::size_t steps = 0;
  for (; steps < 64 && hi - lo > 1e-15; ++steps) {
    const double mid = 0.5 * (lo + hi);
    Trajectory t = sys.integrate(mid, grid_size);
    if (t.crashed) {
      hi = mid;
    } else {
      lo = mid;
      best = std::move(t);
      best_eta = mid;
    }
  }
  if (!best) throw ConvergenceError("equilibrium shooting found no admissible terminal bid", 1.0);

  InverseBidProfile prof;
  prof.eta = best_eta;
  prof.bisection_steps = steps;
  prof.alpha = std::move(best->alpha);
  prof.b.resize(grid_size);
  const double h = best_eta / static_cast<double>(grid_size - 1);
  for (std::size_t j = 0; j < grid_size; ++j) prof.b[j] = h * static_cast<double>(j);
  prof.b.back() = best_eta;
  double defect = 0.0;
  for (auto& a : prof.alpha) {
    defect = std::max(defect, std::abs(2.0 * a[1] - a[2]));
    a[0] = 0.0;
  }
  prof.boundary_defect = defect;
  if (defect > tol) {
    std::ostringstream os;
    os << "equilibrium boundary defect " << defect << " exceeds tolerance " << tol;
    throw ConvergenceError(os.str(), defect);
  }
  for (std::size_t i = 0; i < prof.alpha.size(); ++i) {
    for (std::size_t j = 1; j < grid_size; ++j) {
      if (!(prof.alpha[i][j] > prof.alpha[i][j - 1]) || prof.alpha[i][j] < prof.b[j]) {
        throw ConvergenceError("equilibrium profile is not increasing above the diagonal", defect);
      }
    }
  }
  prof.residual = equilibrium_identity_residual(model, prof);
  return prof;
}

double equilibrium_identity_residual(const AuctionModel& model, const InverseBidProfile& profile,
                                     double lo_frac, double hi_frac) {
  const std::size_t k = model.k();
  const std::size_t n = profile.b.size();
  auto log_g = [&](std::size_t j, std::size_t m) {
    return std::log(model.value_dists()[j].cdf(std::clamp(profile.alpha[j][m], 0.0, 1.0)));
  };
  double worst = 0.0;
  for (std::size_t m = 1; m + 1 < n; ++m) {
    const double b = profile.b[m];
    if (b < lo_frac * profile.eta || b > hi_frac * profile.eta) continue;
    const double db = profile.b[m + 1] - profile.b[m - 1];
    for (std::size_t i = 0; i < k; ++i) {
      double lhs = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        if (j != i) lhs += (log_g(j, m + 1) - log_g(j, m - 1)) / db;
      }
      worst = std::max(worst, std::abs(lhs * (profile.alpha[i][m] - b) - 1.0));
    }
  }
  return worst;
}

std::vector<PiecewiseCdf> equilibrium_bid_cdfs(const AuctionModel& model,
                                               const InverseBidProfile& profile) {
  std::vector<PiecewiseCdf> out;
  for (std::size_t i = 0; i < model.k(); ++i) {
    std::vector<double> v(profile.b.size());
    double run = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      run = std::max(run, model.value_dists()[i].cdf(std::clamp(profile.alpha[i][j], 0.0, 1.0)));
      v[j] = run;
    }
    v.back() = 1.0;
    out.emplace_back(profile.b, std::move(v), Interpolation::Linear);
  }
  return out;
}

}  // namespace auctionmetrics

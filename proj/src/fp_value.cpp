#include "auctionmetrics/fp_value.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "auctionmetrics/errors.hpp"
#include "auctionmetrics/fp_estimator.hpp"

namespace auctionmetrics {
namespace {

double others_product(const std::vector<PiecewiseCdf>& fhats, std::size_t i, double b) {
  double prod = 1.0;
  for (std::size_t j = 0; j < fhats.size(); ++j) {
    if (j != i) prod *= fhats[j](b);
  }
  return prod;
}

FpSampleSet two_agent(const FpSampleSet& samples, std::size_t i) {
  FpSampleSet s;
  s.k = 2;
  s.provenance = samples.provenance;
  s.obs.reserve(samples.obs.size());
  for (const auto& o : samples.obs) s.obs.push_back({o.y, o.z == i ? 0u : 1u});
  return s;
}

double default_spacing(const ValueEstimatorConfig& c) {
  return c.grid_spacing.value_or(std::min(c.eps / 4.0, 0.005));
}

ValueEstimate value_core(const FpSampleSet& samples, const ValueEstimatorConfig& c, double p,
                         double gamma, double v_start, double eps1) {
  if (samples.obs.empty()) throw DomainError("first-price sample set is empty");
  const std::size_t k = samples.k;
  const PiecewiseCdf h = empirical_H(samples);
  const double bid_lo = std::min(p, h.inverse(gamma / 2.0));
  const double kk = static_cast<double>(k);
  const double eps0 = std::pow(eps1 * gamma, 3.0) / (32.0 * kk * kk * c.zeta * c.zeta);

  // best responses can fall below p, so the bid cdfs are estimated from bid_lo where H >= gamma/2
  FpEstimatorConfig fc;
  fc.p = bid_lo;
  fc.gamma = gamma / 2.0;
  fc.eps = std::min(c.eps, gamma / 4.0);
  fc.delta = c.delta;

  ValueEstimate out;
  out.p = p;
  out.gamma = gamma;
  out.v_start = v_start;
  // p + d rounds up in binary (0.2 + 0.1 > 0.3); start the grid a hair lower
  const double grid_start = std::max(0.0, v_start - 1e-12);
  for (std::size_t i = 0; i < k; ++i) {
    const FpEstimate two = estimate_bid_cdf_effective(two_agent(samples, i), fc);
    ValueCdfEstimate g = compose_value_cdf(two.cdfs[0], two.cdfs[1], bid_lo, grid_start,
                                           default_spacing(c));
    out.cdfs.push_back(std::move(g.cdf));
    out.diagnostics.push_back({eps0, eps1, g.isotonic_repairs, bid_lo});
  }
  return out;
}

}  // namespace

void ValueEstimatorConfig::validate() const {
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("p must lie in [0,1]");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ParameterError("gamma must lie in (0,1]");
  if (!(eps > 0.0 && eps < 1.0)) throw ParameterError("eps must lie in (0,1)");
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0,1)");
  if (!(zeta > 0.0)) throw ParameterError("zeta must be positive");
  if (lipschitz && !(*lipschitz > 0.0)) throw ParameterError("lipschitz constant must be positive");
  if (d && !(*d >= 0.0)) throw ParameterError("margin d must be nonnegative");
  if (grid_spacing && !(*grid_spacing > 0.0)) throw ParameterError("grid spacing must be positive");
}

double empirical_utility(const std::vector<PiecewiseCdf>& fhats, std::size_t i, double v, double b) {
  if (i >= fhats.size()) throw DomainError("bidder index out of range");
  if (!(v >= 0.0 && v <= 1.0) || !(b >= 0.0 && b <= 1.0)) throw DomainError("v, b must lie in [0,1]");
  return (v - b) * others_product(fhats, i, b);
}

double best_response_product(const PiecewiseCdf& others, double v, double lo) {
  lo = std::clamp(lo, 0.0, 1.0);
  if (v <= lo) return lo;
  std::vector<double> pts{lo};
  for (double b : others.breakpoints()) {
    if (b > lo && b <= 1.0) pts.push_back(b);
  }
  double best_b = lo;
  double best_u = (v - lo) * others(lo);
  auto consider = [&](double b) {
    const double u = (v - b) * others(b);
    if (u > best_u) {
      best_u = u;
      best_b = b;
    }
  };
  const bool linear = others.interpolation() == Interpolation::Linear;
  for (std::size_t j = 0; j < pts.size(); ++j) {
    consider(pts[j]);
    if (!linear || j + 1 >= pts.size()) continue;
    const double a = pts[j], b = pts[j + 1];
    const double pa = others(a);
    const double s = (others.left_limit(b) - pa) / (b - a);
    if (s > 0.0) {
      const double star = 0.5 * (v + a - pa / s);
      if (star > a && star < b) consider(star);
    }
  }
  return best_b;
}

double best_response(const std::vector<PiecewiseCdf>& fhats, std::size_t i, double v, double lo) {
  if (i >= fhats.size()) throw DomainError("bidder index out of range");
  std::vector<PiecewiseCdf> rest;
  for (std::size_t j = 0; j < fhats.size(); ++j) {
    if (j != i) rest.push_back(fhats[j]);
  }
  return best_response_product(product_cdf(rest), v, lo);
}

ValueCdfEstimate compose_value_cdf(const PiecewiseCdf& own, const PiecewiseCdf& others,
                                   double bid_lo, double v_start, double grid_spacing) {
  if (!(grid_spacing > 0.0)) throw ParameterError("grid spacing must be positive");
  if (!(v_start >= 0.0 && v_start <= 1.0)) throw ParameterError("v_start must lie in [0,1]");
  std::vector<double> vs;
  for (std::size_t m = 0;; ++m) {
    const double v = v_start + grid_spacing * static_cast<double>(m);
    if (v >= 1.0 - 1e-12) break;
    vs.push_back(v);
  }
  vs.push_back(1.0);
  std::vector<double> g(vs.size());
  for (std::size_t m = 0; m < vs.size(); ++m) {
    g[m] = std::clamp(own(best_response_product(others, vs[m], bid_lo)), 0.0, 1.0);
  }
  std::vector<double> fixed = isotonic_nondecreasing(g);
  ValueCdfEstimate out{PiecewiseCdf({0.0}, {0.0}), 0};
  for (std::size_t m = 0; m < g.size(); ++m) {
    if (std::abs(fixed[m] - g[m]) > 1e-15) ++out.isotonic_repairs;
    fixed[m] = std::clamp(fixed[m], 0.0, 1.0);
  }
  out.cdf = PiecewiseCdf(std::move(vs), std::move(fixed), Interpolation::Step);
  return out;
}

ValueEstimate estimate_value_cdf_effective(const FpSampleSet& samples,
                                           const ValueEstimatorConfig& config) {
  config.validate();
  const double eps1 = config.lipschitz ? config.eps / (2.0 * *config.lipschitz) : config.eps;
  const double v_start =
      config.lipschitz ? config.p : std::min(1.0, config.p + config.d.value_or(config.eps));
  return value_core(samples, config, config.p, config.gamma, v_start, eps1);
}

ValueEstimate estimate_value_cdf_full(const FpSampleSet& samples, double lambda,
                                      const ValueEstimatorConfig& config) {
  config.validate();
  if (!(lambda > 0.0)) throw ParameterError("lambda must be positive");
  const double kk = static_cast<double>(samples.k);
  const double eta = config.eps / 2.0;
  double p, gamma, v_start, eps1;
  if (config.lipschitz) {
    p = eta;
    gamma = std::pow(lambda * eta, kk);
    v_start = p;
    eps1 = config.eps / (2.0 * *config.lipschitz);
  } else {
    p = 8.0 * eta / 11.0;
    gamma = std::pow(8.0 * lambda * eta / 11.0, kk);
    v_start = p + 3.0 * eta / 11.0;
    eps1 = config.eps;
  }
  if (!(gamma >= 1e-300)) {
    std::ostringstream os;
    os << "effective-support mass underflows for k=" << samples.k
       << "; use a larger eps or fewer bidders";
    throw ParameterError(os.str());
  }
  gamma = std::min(gamma, 1.0);
  return value_core(samples, config, p, gamma, v_start, eps1);
}

double lipschitz_estimate(const PiecewiseCdf& fhat, double eps0, double eps) {
  if (!(eps0 > 0.0 && eps0 < 1.0)) throw ParameterError("eps0 must lie in (0,1)");
  if (!(eps >= 0.0)) throw ParameterError("eps must be nonnegative");
  const double hi = 1.0 - eps0;
  std::vector<double> cand{0.0, hi};
  for (double b : fhat.breakpoints()) {
    for (double x : {b, b - eps0}) {
      if (x > 0.0 && x < hi) cand.push_back(x);
    }
  }
  double best = 0.0;
  for (double x : cand) {
    best = std::max(best, std::abs(fhat(x + eps0) - fhat(x)));
    if (x > 0.0) best = std::max(best, std::abs(fhat.left_limit(x + eps0) - fhat.left_limit(x)));
  }
  return (best + 2.0 * eps) / eps0;
}

}  // namespace auctionmetrics

#include "auctionmetrics/fp_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "auctionmetrics/errors.hpp"

namespace auctionmetrics {
namespace {

void require_samples(const FpSampleSet& s) {
  if (s.obs.empty()) throw DomainError("first-price sample set is empty");
  if (s.k < 2) throw DomainError("first-price sample set needs k >= 2");
}

struct Ghats {
  std::vector<GHat> per_bidder;
  std::size_t clipped = 0;
};

Ghats build_ghats(const FpSampleSet& samples, double h_floor) {
  require_samples(samples);
  const std::size_t n = samples.obs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return samples.obs[a].y < samples.obs[b].y; });
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<std::vector<double>> ys(samples.k), ws(samples.k);
  std::size_t clipped = 0;
  std::size_t j = 0;
  while (j < n) {
    std::size_t e = j;
    const double y = samples.obs[order[j]].y;
    while (e < n && samples.obs[order[e]].y == y) ++e;
    const double h = static_cast<double>(e) * inv_n;  // H(y) counts ties
    const double denom = std::max(h, h_floor);
    for (std::size_t t = j; t < e; ++t) {
      const auto& o = samples.obs[order[t]];
      if (o.z >= samples.k) throw DomainError("winner index out of range");
      if (h < h_floor) ++clipped;
      ys[o.z].push_back(y);
      ws[o.z].push_back(inv_n / denom);
    }
    j = e;
  }
  Ghats out;
  out.clipped = clipped;
  for (std::size_t i = 0; i < samples.k; ++i) {
    std::vector<double> suffix(ws[i].size() + 1, 0.0);
    for (std::size_t t = ws[i].size(); t-- > 0;) suffix[t] = suffix[t + 1] + ws[i][t];
    out.per_bidder.emplace_back(std::move(ys[i]), std::move(suffix));
  }
  return out;
}

PiecewiseCdf exp_neg_staircase(const GHat& g, double from) {
  std::vector<double> b, v;
  b.push_back(from);
  v.push_back(std::exp(-g.right_limit(from)));
  for (double y : g.support()) {
    if (y <= b.back()) continue;
    b.push_back(y);
    v.push_back(std::exp(-g.right_limit(y)));
  }
  for (auto& x : v) x = std::clamp(x, 0.0, 1.0);
  return PiecewiseCdf(std::move(b), std::move(v), Interpolation::Step);
}

}  // namespace

void FpEstimatorConfig::validate() const {
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("p must lie in [0,1]");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ParameterError("gamma must lie in (0,1]");
  if (!(eps > 0.0 && eps <= gamma / 2.0)) throw ParameterError("eps must lie in (0, gamma/2]");
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0,1)");
  if (!(clip_level() > 0.0)) throw ParameterError("h_floor must be positive");
}

PiecewiseCdf empirical_H(const FpSampleSet& samples) {
  require_samples(samples);
  std::vector<double> ys;
  ys.reserve(samples.obs.size());
  for (const auto& o : samples.obs) ys.push_back(o.y);
  return empirical_cdf(ys);
}

SubCdf empirical_Hi(const FpSampleSet& samples, std::size_t i) {
  require_samples(samples);
  if (i >= samples.k) throw DomainError("bidder index out of range");
  std::vector<double> ys;
  for (const auto& o : samples.obs) {
    if (o.z == i) ys.push_back(o.y);
  }
  if (ys.empty()) return SubCdf(PiecewiseCdf({0.0}, {0.0}));
  std::sort(ys.begin(), ys.end());
  const double n = static_cast<double>(samples.obs.size());
  std::vector<double> b, v;
  for (std::size_t j = 0; j < ys.size(); ++j) {
    if (j + 1 < ys.size() && ys[j + 1] == ys[j]) continue;
    b.push_back(ys[j]);
    v.push_back(static_cast<double>(j + 1) / n);
  }
  return SubCdf(PiecewiseCdf(std::move(b), std::move(v)));
}

GHat::GHat(std::vector<double> ys, std::vector<double> suffix_weight)
    : ys_(std::move(ys)), suffix_(std::move(suffix_weight)) {
  if (suffix_.size() != ys_.size() + 1) throw DomainError("GHat: suffix length mismatch");
}

double GHat::operator()(double x) const noexcept {
  const auto it = std::lower_bound(ys_.begin(), ys_.end(), x);
  return suffix_[static_cast<std::size_t>(it - ys_.begin())];
}

double GHat::right_limit(double x) const noexcept {
  const auto it = std::upper_bound(ys_.begin(), ys_.end(), x);
  return suffix_[static_cast<std::size_t>(it - ys_.begin())];
}

GHat estimate_ghat(const FpSampleSet& samples, std::size_t i, const FpEstimatorConfig& config,
                   GHatDiagnostics* diag) {
  config.validate();
  if (i >= samples.k) throw DomainError("bidder index out of range");
  Ghats all = build_ghats(samples, config.clip_level());
  if (diag) diag->clipped = all.clipped;
  return std::move(all.per_bidder[i]);
}

FpEstimate estimate_bid_cdf_effective(const FpSampleSet& samples, const FpEstimatorConfig& config) {
  config.validate();
  const Ghats all = build_ghats(samples, config.clip_level());
  FpEstimate out;
  out.n = samples.obs.size();
  out.clip_rate = static_cast<double>(all.clipped) / static_cast<double>(out.n);
  out.p = config.p;
  out.gamma = config.gamma;
  out.h_floor = config.clip_level();
  for (const auto& g : all.per_bidder) out.cdfs.push_back(exp_neg_staircase(g, 0.0));
  return out;
}

FpEstimate estimate_bid_cdf_full(const FpSampleSet& samples, double lambda, double eps,
                                 double delta) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw ParameterError("lambda must lie in (0,1]");
  if (!(eps > 0.0 && eps <= 1.0)) throw ParameterError("eps must lie in (0,1]");
  require_samples(samples);
  const double eta = eps / 2.0;
  const double gamma = std::pow(lambda * eta, static_cast<double>(samples.k));
  if (!(gamma >= 1e-300)) {
    std::ostringstream os;
    os << "gamma = (lambda*eps/2)^k underflows for k=" << samples.k
       << "; use a larger eps or fewer bidders";
    throw ParameterError(os.str());
  }
  FpEstimatorConfig cfg;
  cfg.p = eta;
  cfg.gamma = gamma;
  cfg.eps = gamma / 2.0;
  cfg.delta = delta;
  cfg.validate();
  const Ghats all = build_ghats(samples, cfg.clip_level());
  FpEstimate out;
  out.n = samples.obs.size();
  out.clip_rate = static_cast<double>(all.clipped) / static_cast<double>(out.n);
  out.p = eta;
  out.gamma = gamma;
  out.h_floor = cfg.clip_level();
  for (const auto& g : all.per_bidder) out.cdfs.push_back(exp_neg_staircase(g, eta));
  return out;
}

PiecewiseFunction estimate_density(const PiecewiseCdf& fhat, double h, double p) {
  if (!(h > 0.0)) throw ParameterError("bandwidth must be positive");
  if (!(p >= 0.0 && p < 1.0)) throw ParameterError("p must lie in [0,1)");
  std::vector<double> pts{p, 1.0};
  for (double b : fhat.breakpoints()) {
    for (double x : {b, b - h}) {
      if (x > p && x < 1.0) pts.push_back(x);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<double> vals(pts.size());
  for (std::size_t j = 0; j < pts.size(); ++j) {
    vals[j] = (fhat(pts[j] + h) - fhat(pts[j])) / h;
  }
  return PiecewiseFunction(std::move(pts), std::move(vals), fhat.interpolation());
}

double recommended_bandwidth(double eps0, double lipschitz) {
  if (!(eps0 > 0.0) || !(lipschitz > 0.0)) throw ParameterError("need eps0 > 0 and L > 0");
  return std::sqrt(eps0 / lipschitz);
}

double identify_bid_cdf(const std::function<double(double)>& H,
                        const std::function<double(double)>& hi_density, double x,
                        std::size_t pieces) {
  if (!(x > 0.0 && x <= 1.0)) throw DomainError("x must lie in (0,1]");
  if (pieces == 0) throw ParameterError("need at least one piece");
  static constexpr double node[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                     0.5384693101056831, 0.9061798459386640};
  static constexpr double weight[5] = {0.2369268850561891, 0.4786286704993665,
                                       0.5688888888888889, 0.4786286704993665,
                                       0.2369268850561891};
  const double w = (1.0 - x) / static_cast<double>(pieces);
  double integral = 0.0;
  for (std::size_t s = 0; s < pieces; ++s) {
    const double mid = x + (static_cast<double>(s) + 0.5) * w;
    for (int q = 0; q < 5; ++q) {
      const double t = mid + 0.5 * w * node[q];
      const double h = H(t);
      if (!(h > 0.0)) throw DomainError("H vanishes inside the integration range");
      integral += 0.5 * w * weight[q] * hi_density(t) / h;
    }
  }
  return std::exp(-integral);
}

FpPartialPlan plan_fp_partial(const FpPartialConfig& c, std::size_t k) {
  if (!(c.p >= 0.0 && c.p < 1.0)) throw ParameterError("p must lie in [0,1)");
  if (!(c.gamma > 0.0 && c.gamma <= 1.0)) throw ParameterError("gamma must lie in (0,1]");
  if (!(c.eps > 0.0 && c.eps < 1.0)) throw ParameterError("eps must lie in (0,1)");
  if (!(c.delta > 0.0 && c.delta < 1.0)) throw ParameterError("delta must lie in (0,1)");
  if (!(c.lipschitz > 0.0)) throw ParameterError("lipschitz constant must be positive");
  const double kk = static_cast<double>(k);
  FpPartialPlan plan{};
  if (c.paper_constants) {
    plan.grid_spacing = c.gamma * c.gamma * c.eps / 6.0;
    plan.search_tol = c.gamma * c.gamma * c.eps / 24.0;
    plan.eval_tol = c.gamma * c.eps * c.eps / (24.0 * (kk + 1.0));
  } else {
    plan.grid_spacing = c.gamma * c.eps / 2.0;
    plan.search_tol = plan.grid_spacing;
    plan.eval_tol = c.gamma * c.eps / 12.0;
  }
  if (c.grid_spacing) plan.grid_spacing = *c.grid_spacing;
  if (c.search_tol) plan.search_tol = *c.search_tol;
  if (!(plan.grid_spacing > 0.0 && plan.grid_spacing < 1.0) || !(plan.search_tol > 0.0)) {
    throw ParameterError("grid spacing and search tolerance must be positive");
  }
  plan.search_steps = static_cast<std::size_t>(
      std::max(1.0, std::ceil(std::log2(2.0 * c.lipschitz / plan.search_tol))));
  const double searches = std::ceil(1.0 / plan.grid_spacing) * (kk + 1.0);
  const double points = searches + 2.0;
  plan.search_samples = c.search_samples.value_or(static_cast<std::size_t>(std::ceil(
      std::log(2.0 * searches * static_cast<double>(plan.search_steps) / c.delta) /
      (2.0 * plan.search_tol * plan.search_tol))));
  plan.eval_samples = c.eval_samples.value_or(static_cast<std::size_t>(
      std::ceil(std::log(2.0 * points * (kk + 1.0) / c.delta) / (2.0 * plan.eval_tol * plan.eval_tol))));
  if (plan.search_samples == 0 || plan.eval_samples == 0) {
    throw ParameterError("sample sizes must be positive");
  }
  return plan;
}

namespace {

class BudgetedOracle {
 public:
  BudgetedOracle(FpPartialOracle& o, std::uint64_t budget) : o_(o), start_(o.calls()), budget_(budget) {}

  // Frequencies of every outcome in [0, k] over m queries at reserve r.
  std::vector<double> batch(double r, std::size_t m) {
    if (o_.calls() - start_ + m > budget_) {
      std::ostringstream os;
      os << "oracle budget of " << budget_ << " calls exhausted after " << (o_.calls() - start_)
         << " calls";
      throw EstimatorError(os.str());
    }
    std::vector<double> f(o_.k() + 1, 0.0);
    for (std::size_t t = 0; t < m; ++t) {
      const std::size_t z = o_.query(r);
      if (z > o_.k()) throw EstimatorError("oracle returned an out-of-range winner");
      f[z] += 1.0;
    }
    for (auto& x : f) x /= static_cast<double>(m);
    return f;
  }

  std::uint64_t used() const { return o_.calls() - start_; }

 private:
  FpPartialOracle& o_;
  std::uint64_t start_;
  std::uint64_t budget_;
};

}  // namespace

FpPartialEstimate fp_partial_estimate(FpPartialOracle& oracle, const FpPartialConfig& config) {
  const std::size_t k = oracle.k();
  if (k < 2) throw DomainError("partial oracle needs k >= 2");
  const FpPartialPlan plan = plan_fp_partial(config, k);
  BudgetedOracle bo(oracle, config.max_oracle_calls);

  const std::vector<double> base = bo.batch(0.0, plan.eval_samples);
  auto h_of = [&](const std::vector<double>& f) { return f[k]; };
  auto hi_of = [&](const std::vector<double>& f, std::size_t i) { return base[i] - f[i]; };

  const double p = config.p;
  const std::vector<double> at_p = bo.batch(p, plan.eval_samples);
  std::vector<double> xs{p, 1.0};

  auto search_h = [&](double x) { return h_of(bo.batch(x, plan.search_samples)); };
  for (double u = h_of(at_p) + plan.grid_spacing; u < 1.0; u += plan.grid_spacing) {
    xs.push_back(bisect_level(search_h, u, p, 1.0, plan.search_steps));
  }
  for (std::size_t i = 0; i < k; ++i) {
    auto search_hi = [&](double x) { return hi_of(bo.batch(x, plan.search_samples), i); };
    for (double u = hi_of(at_p, i) + plan.grid_spacing; u < base[i]; u += plan.grid_spacing) {
      xs.push_back(bisect_level(search_hi, u, p, 1.0, plan.search_steps));
    }
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  const std::size_t m = xs.size();
  std::vector<double> h(m);
  std::vector<std::vector<double>> hi(k, std::vector<double>(m));
  for (std::size_t s = 0; s < m; ++s) {
    const std::vector<double> f = s == 0 ? at_p : bo.batch(xs[s], plan.eval_samples);
    h[s] = h_of(f);
    for (std::size_t i = 0; i < k; ++i) hi[i][s] = hi_of(f, i);
  }

  FpPartialEstimate out;
  out.plan = plan;
  out.grid_points = m;
  const double floor = config.gamma / 2.0;
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> g(m, 0.0);
    for (std::size_t s = m - 1; s-- > 0;) {
      g[s] = g[s + 1] + (hi[i][s + 1] - hi[i][s]) / std::max(h[s], floor);
    }
    std::vector<double> f(m);
    for (std::size_t s = 0; s < m; ++s) f[s] = std::clamp(std::exp(-g[s]), 0.0, 1.0);
    std::vector<double> fixed = isotonic_nondecreasing(f);
    for (std::size_t s = 0; s < m; ++s) {
      if (std::abs(fixed[s] - f[s]) > 1e-15) ++out.isotonic_repairs;
      fixed[s] = std::clamp(fixed[s], 0.0, 1.0);
    }
    out.cdfs.emplace_back(xs, std::move(fixed), Interpolation::Step);
  }
  out.oracle_calls = bo.used();
  return out;
}

}  // namespace auctionmetrics

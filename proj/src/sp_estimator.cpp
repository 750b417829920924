#include "auctionmetrics/sp_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "auctionmetrics/distance.hpp"
#include "auctionmetrics/errors.hpp"
#include "auctionmetrics/random.hpp"

namespace auctionmetrics {
namespace {

constexpr double kTinyU = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_samples(const SpSampleSet& s) {
  if (s.obs.empty()) throw DomainError("second-price sample set is empty");
  if (s.k < 2) throw DomainError("second-price sample set needs k >= 2");
}

// prod_{j != i} U_j^{1/(k-1)} / U_i^{(k-2)/(k-1)} for positive U.
double ratio_formula(const std::vector<double>& u, std::size_t i) {
  const std::size_t k = u.size();
  const double kk = static_cast<double>(k - 1);
  double log_sum = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    if (j != i) log_sum += std::log(u[j]);
  }
  return std::exp(log_sum / kk - static_cast<double>(k - 2) / kk * std::log(u[i]));
}

double h_ceiling(const SpParams& p, double x) {
  return std::min(1.0 - p.alpha * (1.0 - x), p.eta * x);
}

}  // namespace

void SpParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0 && alpha <= eta)) {
    throw ParameterError("density bounds need 0 < alpha <= min(eta, 1)");
  }
  if (!(nu > 0.0 && nu < theta && theta < 1.0)) throw ParameterError("need 0 < nu < theta < 1");
  if (!(micro_delta > 0.0 && micro_delta < nu)) throw ParameterError("need 0 < micro_delta < nu");
  if (!(eps_g > 0.0)) throw ParameterError("eps_g must be positive");
  if (!(eps > 0.0)) throw ParameterError("eps must be positive");
  if (!(contractivity_cap > 0.0 && contractivity_cap < 1.0)) {
    throw ParameterError("contractivity cap must lie in (0,1)");
  }
  if (!(contraction_constant > 0.0)) throw ParameterError("contraction constant must be positive");
}

double paper_contraction_constant(double alpha, double eta) {
  return 16.0 * std::pow(eta / alpha, 6.0);
}

SpParams desk_params(std::size_t n, double alpha, double eta, double eps) {
  SpParams p;
  p.alpha = alpha;
  p.eta = eta;
  p.eps = eps;
  p.theta = std::max(eps / (16.0 * eta), 0.02);
  p.nu = std::min(0.05, p.theta / 2.0);
  p.micro_delta = 1e-3;
  p.eps_g = dkw_band(std::max<std::size_t>(n, 1), 0.05);
  p.fp_iters = static_cast<std::size_t>(
      std::ceil(std::log(4.0 / std::max(p.eps_g, 1e-9)) / std::log(4.0)));
  p.contraction_constant = paper_contraction_constant(alpha, eta);
  return p;
}

SubCdf empirical_G_sp(const SpSampleSet& samples, std::size_t i) {
  require_samples(samples);
  if (i >= samples.k) throw DomainError("bidder index out of range");
  std::vector<double> ys;
  for (const auto& o : samples.obs) {
    if (o.w == i) ys.push_back(o.y);
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

CoarseU::CoarseU(std::vector<double> ys, std::vector<double> cumulative, double domain_end)
    : ys_(std::move(ys)), cum_(std::move(cumulative)), domain_end_(domain_end) {
  if (ys_.size() != cum_.size()) throw DomainError("CoarseU: length mismatch");
}

double CoarseU::operator()(double x) const noexcept {
  const double xe = std::min(x, domain_end_);
  const auto it = std::upper_bound(ys_.begin(), ys_.end(), xe);
  if (it == ys_.begin()) return 0.0;
  return cum_[static_cast<std::size_t>(it - ys_.begin()) - 1];
}

CoarseU coarse_U(const SpSampleSet& samples, std::size_t i, double theta) {
  require_samples(samples);
  if (i >= samples.k) throw DomainError("bidder index out of range");
  if (!(theta > 0.0 && theta < 1.0)) throw ParameterError("theta must lie in (0,1)");
  const double end = 1.0 - theta / 4.0;
  std::vector<double> ys;
  for (const auto& o : samples.obs) {
    if (o.w == i && o.y <= end) ys.push_back(o.y);
  }
  std::sort(ys.begin(), ys.end());
  const double inv_n = 1.0 / static_cast<double>(samples.obs.size());
  std::vector<double> cum(ys.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < ys.size(); ++j) {
    acc += inv_n / (1.0 - ys[j]);
    cum[j] = acc;
  }
  return CoarseU(std::move(ys), std::move(cum), end);
}

SpInputs sp_inputs_from_samples(const SpSampleSet& samples, const SpParams& params) {
  require_samples(samples);
  auto gs = std::make_shared<std::vector<SubCdf>>();
  auto us = std::make_shared<std::vector<CoarseU>>();
  for (std::size_t i = 0; i < samples.k; ++i) {
    gs->push_back(empirical_G_sp(samples, i));
    us->push_back(coarse_U(samples, i, params.theta));
  }
  SpInputs in;
  in.k = samples.k;
  in.G = [gs](std::size_t i, double x) { return (*gs)[i](x); };
  in.U_coarse = [us](std::size_t i, double x) { return (*us)[i](x); };
  const double nu = params.nu;
  in.V0 = [gs, nu](std::size_t i) { return (*gs)[i](nu); };
  return in;
}

double SpGrid::micro_point(std::size_t tau, std::size_t l) const {
  if (tau == 0 || tau > T()) throw DomainError("macro interval index out of range");
  if (l == micro_counts[tau - 1]) return endpoints[tau];
  return endpoints[tau - 1] + static_cast<double>(l) * micro_widths[tau - 1];
}

std::size_t SpGrid::refined_intervals() const noexcept {
  std::size_t r = 0;
  for (double w : micro_widths) r += w < micro_delta;
  return r;
}

std::size_t SpGrid::total_micro_points() const noexcept {
  std::size_t s = 0;
  for (auto c : micro_counts) s += c;
  return s;
}

std::vector<double> contraction_statistics(const SpInputs& in, const SpParams& p, double x_prev,
                                           std::size_t max_l, std::optional<double> width) {
  const double step = width.value_or(p.micro_delta);
  const std::size_t k = in.k;
  const double kk = static_cast<double>(k - 1);
  std::vector<double> acc(k, 0.0), out;
  out.reserve(max_l);
  std::vector<double> g_prev(k), u_prev(k);
  for (std::size_t i = 0; i < k; ++i) {
    g_prev[i] = in.G(i, x_prev);
    u_prev[i] = in.U_coarse(i, x_prev);
  }
  std::vector<double> u_here(k);
  for (std::size_t l = 1; l <= max_l; ++l) {
    const double x = x_prev + static_cast<double>(l) * step;
    // the midpoint rule mixes in column l-1, whose box floor is lower
    const double x_floor = p.quadrature == Quadrature::Midpoint ? x - step : x;
    for (std::size_t i = 0; i < k; ++i) u_here[i] = std::max(in.U_coarse(i, x_floor), 0.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double g = in.G(i, x);
      const double delta = std::max(g - g_prev[i], 0.0);
      g_prev[i] = g;
      double w;
      if (p.bound == ContractionBound::Paper) {
        w = u_prev[i] > 0.0
                ? p.contraction_constant * x / ((1.0 - x) * (1.0 - x)) * delta / u_prev[i]
                : (delta > 0.0 ? kInf : 0.0);
      } else {
        const double hmax = h_ceiling(p, p.quadrature == Quadrature::Midpoint ? x - 0.5 * step : x);
        double d = 1.0;
        if (k > 2) {
          double inv = 0.0;
          for (std::size_t j = 0; j < k; ++j) {
            const double lo = std::max(u_here[j] / (2.0 * p.eta), kTinyU);
            inv += (j == i ? static_cast<double>(k - 2) : 1.0) / lo;
          }
          d = hmax / kk * inv;
        }
        w = delta / ((1.0 - hmax) * (1.0 - hmax)) * d;
      }
      acc[i] += w;
      worst = std::max(worst, acc[i]);
    }
    out.push_back(worst);
  }
  return out;
}

SpGrid build_macro_intervals(const SpInputs& in, const SpParams& p) {
  p.validate();
  if (in.k < 2) throw DomainError("second-price inputs need k >= 2");
  SpGrid grid;
  grid.nu = p.nu;
  grid.micro_delta = p.micro_delta;
  grid.endpoints.push_back(p.nu);
  const double stop = 1.0 - p.theta;
  const double ceiling = 1.0 - p.theta / 2.0;
  while (grid.endpoints.back() < stop) {
    const double x_prev = grid.endpoints.back();
    const double cap = std::min(2.0 * x_prev, ceiling);
    const std::size_t tau = grid.micro_counts.size() + 1;
    double width = p.micro_delta;
    std::size_t l = 0;
    std::vector<double> stats;
    for (std::size_t r = 0; r <= p.max_refinements; ++r, width /= 2.0) {
      const auto max_l = static_cast<std::size_t>(std::floor((cap - x_prev) / width + 1e-9));
      if (max_l == 0) continue;
      stats = contraction_statistics(in, p, x_prev, max_l, width);
      while (l < stats.size() && stats[l] <= p.contractivity_cap) ++l;
      if (l > 0) break;
    }
    if (l == 0) {
      std::ostringstream os;
      os << "macro interval " << tau << " at x=" << x_prev << " cannot take one micro step";
      if (!stats.empty()) os << ": gamma_1 = " << stats[0] << " > " << p.contractivity_cap;
      os << " after " << p.max_refinements << " halvings of micro_delta";
      throw EstimatorError(os.str());
    }
    grid.micro_counts.push_back(l);
    grid.gamma_per_interval.push_back(stats[l - 1]);
    grid.micro_widths.push_back(width);
    grid.endpoints.push_back(x_prev + static_cast<double>(l) * width);
  }
  return grid;
}

MacroContext macro_context(std::size_t tau, const SpGrid& grid, const SpInputs& in,
                           const SpParams& p) {
  if (tau == 0 || tau > grid.T()) throw DomainError("macro interval index out of range");
  const std::size_t len = grid.micro_counts[tau - 1];
  const std::size_t k = in.k;
  MacroContext ctx;
  ctx.x0 = grid.endpoints[tau - 1];
  ctx.x.resize(len);
  ctx.delta.assign(k, std::vector<double>(len));
  ctx.lo.assign(k, std::vector<double>(len));
  ctx.hi.assign(k, std::vector<double>(len));
  for (std::size_t l = 1; l <= len; ++l) ctx.x[l - 1] = grid.micro_point(tau, l);
  const double x0 = grid.endpoints[tau - 1];
  for (std::size_t i = 0; i < k; ++i) {
    double g_prev = in.G(i, x0);
    for (std::size_t m = 0; m < len; ++m) {
      const double g = in.G(i, ctx.x[m]);
      ctx.delta[i][m] = std::max(g - g_prev, 0.0);
      g_prev = g;
      const double u = in.U_coarse(i, ctx.x[m]);
      if (u > 0.0) {
        ctx.lo[i][m] = std::max(u / (2.0 * p.eta), kTinyU);
        ctx.hi[i][m] = 2.0 * u / p.alpha;
      } else {
        ++ctx.degenerate;
        ctx.lo[i][m] = kTinyU;
        ctx.hi[i][m] = kInf;
      }
    }
  }
  return ctx;
}

FixedPointState fixed_point_map(const FixedPointState& s, const MacroContext& ctx,
                                const SpParams& p, MapCounters* counters) {
  const std::size_t k = s.U.size();
  const std::size_t len = ctx.x.size();
  if (k < 2 || s.V.size() != k || ctx.delta.size() != k) {
    throw DomainError("fixed-point state does not match the macro interval");
  }
  for (const auto& row : s.U) {
    if (row.size() != len) throw DomainError("fixed-point state does not match the macro interval");
    for (double u : row) {
      if (!(u > 0.0)) throw DomainError("fixed-point state has a non-positive entry");
    }
  }
  FixedPointState out;
  out.V = s.V;
  out.U.assign(k, std::vector<double>(len));
  const bool mid = p.quadrature == Quadrature::Midpoint;
  std::vector<double> col(k), run(s.V);
  for (std::size_t m = 0; m < len; ++m) {
    const double x = mid ? 0.5 * ((m ? ctx.x[m - 1] : ctx.x0) + ctx.x[m]) : ctx.x[m];
    const double h_lo = p.alpha * x, h_hi = h_ceiling(p, x);
    for (std::size_t i = 0; i < k; ++i) {
      col[i] = mid ? 0.5 * ((m ? s.U[i][m - 1] : s.V[i]) + s.U[i][m]) : s.U[i][m];
    }
    for (std::size_t i = 0; i < k; ++i) {
      const double raw = ratio_formula(col, i);
      const double h = std::clamp(raw, h_lo, h_hi);
      run[i] += ctx.delta[i][m] / (1.0 - h);
      const double phi = std::clamp(run[i], ctx.lo[i][m], ctx.hi[i][m]);
      if (counters) {
        ++counters->entries;
        if (h != raw) ++counters->h_clips;
        if (phi != run[i]) ++counters->outer_clips;
      }
      out.U[i][m] = phi;
    }
  }
  return out;
}

FixedPointState fixed_point_map(const FixedPointState& state, std::size_t tau, const SpGrid& grid,
                                const SpInputs& inputs, const SpParams& params) {
  return fixed_point_map(state, macro_context(tau, grid, inputs, params), params);
}

bool in_clip_box(const FixedPointState& s, const MacroContext& ctx, double tol) {
  for (std::size_t i = 0; i < s.U.size(); ++i) {
    for (std::size_t m = 0; m < s.U[i].size(); ++m) {
      const double u = s.U[i][m];
      if (u < ctx.lo[i][m] * (1.0 - tol) || u > ctx.hi[i][m] * (1.0 + tol)) return false;
      if (m > 0 && u < s.U[i][m - 1] * (1.0 - tol)) return false;
    }
  }
  return true;
}

namespace {

double sup_gap(const FixedPointState& a, const FixedPointState& b) {
  double g = 0.0;
  for (std::size_t i = 0; i < a.U.size(); ++i) {
    for (std::size_t m = 0; m < a.U[i].size(); ++m) g = std::max(g, std::abs(a.U[i][m] - b.U[i][m]));
  }
  return g;
}

FixedPointState random_member(const MacroContext& ctx, const std::vector<double>& V,
                              RandomStream& rng) {
  FixedPointState s;
  s.V = V;
  s.U.resize(ctx.lo.size());
  for (std::size_t i = 0; i < ctx.lo.size(); ++i) {
    double run = 0.0;
    for (std::size_t m = 0; m < ctx.x.size(); ++m) {
      const double lo = ctx.lo[i][m];
      const double hi = std::isfinite(ctx.hi[i][m]) ? ctx.hi[i][m] : 2.0 * lo + 1.0;
      run = std::max(run, lo + rng.uniform() * (hi - lo));
      s.U[i].push_back(run);
    }
  }
  return s;
}

}  // namespace

FixedPointRun run_fixed_point(const SpGrid& grid, const SpInputs& in, const SpParams& p) {
  const std::size_t k = in.k;
  FixedPointRun run;
  run.points.push_back(grid.nu);
  run.U_tilde.assign(k, {});
  std::vector<double> V(k);
  for (std::size_t i = 0; i < k; ++i) {
    V[i] = in.V0 ? in.V0(i) : in.G(i, grid.nu);
    run.U_tilde[i].push_back(V[i]);
  }
  const RandomStream pair_root(p.contraction_seed);
  for (std::size_t tau = 1; tau <= grid.T(); ++tau) {
    const MacroContext ctx = macro_context(tau, grid, in, p);
    run.degenerate_entries += ctx.degenerate;
    FixedPointState s;
    s.V = V;
    s.U.assign(k, std::vector<double>(ctx.x.size()));
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t m = 0; m < ctx.x.size(); ++m) {
        s.U[i][m] = std::clamp(in.U_coarse(i, ctx.x[m]), ctx.lo[i][m], ctx.hi[i][m]);
      }
    }
    std::vector<double> gaps;
    MapCounters counters;
    for (std::size_t t = 0; t < p.fp_iters; ++t) {
      counters = MapCounters{};
      FixedPointState next;
      try {
        next = fixed_point_map(s, ctx, p, &counters);
      } catch (const DomainError& e) {
        std::ostringstream os;
        os << e.what() << " (macro interval " << tau << ", iteration " << t + 1 << ")";
        throw DomainError(os.str());
      }
      gaps.push_back(sup_gap(next, s));
      s = std::move(next);
    }
    run.iterate_gaps.push_back(std::move(gaps));
    const double entries = static_cast<double>(std::max<std::size_t>(counters.entries, 1));
    run.outer_clip_rate.push_back(static_cast<double>(counters.outer_clips) / entries);
    run.h_clip_rate.push_back(static_cast<double>(counters.h_clips) / entries);
    if (!in_clip_box(s, ctx)) ++run.box_violations;

    double worst = 0.0;
    const RandomStream tau_root = pair_root.split(tau);
    for (std::size_t q = 0; q < p.contraction_pairs; ++q) {
      RandomStream rng = tau_root.split(q);
      const FixedPointState a = random_member(ctx, V, rng);
      const FixedPointState b = random_member(ctx, V, rng);
      const double d = sup_gap(a, b);
      if (d > 0.0) worst = std::max(worst, sup_gap(fixed_point_map(a, ctx, p), fixed_point_map(b, ctx, p)) / d);
    }
    run.contraction_samples.push_back(worst);

    for (std::size_t m = 0; m < ctx.x.size(); ++m) {
      run.points.push_back(ctx.x[m]);
      for (std::size_t i = 0; i < k; ++i) run.U_tilde[i].push_back(s.U[i][m]);
    }
    for (std::size_t i = 0; i < k; ++i) V[i] = s.U[i].back();
    run.states.push_back(std::move(s));
  }
  return run;
}

RecoveredCdfs recover_F(const std::vector<std::vector<double>>& U_tilde,
                        const std::vector<double>& points, const SpParams& p) {
  const std::size_t k = U_tilde.size();
  if (k < 2) throw DomainError("recovery needs k >= 2");
  const std::size_t n = points.size();
  for (const auto& row : U_tilde) {
    if (row.size() != n) throw DomainError("U_tilde rows must match the grid");
  }
  if (n == 0) throw DomainError("recovery needs a non-empty grid");
  const double start = std::nextafter(p.theta, 1.0);
  const double top = 1.0 - p.theta;

  RecoveredCdfs out;
  std::vector<double> col(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> raw(n);
    for (std::size_t m = 0; m < n; ++m) {
      for (std::size_t j = 0; j < k; ++j) col[j] = U_tilde[j][m];
      bool positive = std::all_of(col.begin(), col.end(), [](double u) { return u > 0.0; });
      raw[m] = positive ? std::clamp(ratio_formula(col, i), 0.0, 1.0) : 0.0;
    }
    std::vector<double> b{0.0}, v{0.0}, interior;
    if (start < top) {
      auto it = std::lower_bound(points.begin(), points.end(), start);
      std::size_t idx;
      if (it == points.end()) {
        idx = n - 1;
      } else {
        idx = static_cast<std::size_t>(it - points.begin());
        if (idx > 0 && start - points[idx - 1] < points[idx] - start) --idx;
      }
      b.push_back(start);
      interior.push_back(raw[idx]);
      for (std::size_t m = idx; m + 1 < n; ++m) {
        const double mid = 0.5 * (points[m] + points[m + 1]);
        if (mid <= start) continue;
        if (mid >= top) break;
        b.push_back(mid);
        interior.push_back(raw[m + 1]);
      }
    }
    const std::vector<double> fixed = isotonic_nondecreasing(interior);
    for (std::size_t m = 0; m < fixed.size(); ++m) {
      const double d = std::abs(fixed[m] - interior[m]);
      out.isotonic_repair_total += d;
      if (d > 1e-15) ++out.isotonic_repairs;
      v.push_back(std::clamp(fixed[m], 0.0, 1.0));
    }
    b.push_back(std::max(top, std::nextafter(b.back(), 2.0)));
    v.push_back(1.0);
    out.cdfs.emplace_back(std::move(b), std::move(v), Interpolation::Step);
  }
  return out;
}

SpEstimate estimate_sp_from_inputs(const SpInputs& inputs, const SpParams& params) {
  params.validate();
  const SpGrid grid = build_macro_intervals(inputs, params);
  const FixedPointRun run = run_fixed_point(grid, inputs, params);
  RecoveredCdfs rec = recover_F(run.U_tilde, run.points, params);
  SpEstimate est;
  est.cdfs = std::move(rec.cdfs);
  auto& d = est.diagnostics;
  d.T = grid.T();
  d.total_micro_points = grid.total_micro_points();
  d.refined_intervals = grid.refined_intervals();
  d.macro_endpoints = grid.endpoints;
  d.gamma_per_interval = grid.gamma_per_interval;
  d.contraction_samples = run.contraction_samples;
  d.clip_rates = run.outer_clip_rate;
  d.box_violations = run.box_violations;
  d.degenerate_entries = run.degenerate_entries;
  d.isotonic_repair_total = rec.isotonic_repair_total;
  d.params = params;
  return est;
}

SpEstimate estimate_sp(const SpSampleSet& samples, double alpha, double eta, double eps,
                       const std::optional<SpParams>& overrides) {
  require_samples(samples);
  SpParams params = overrides ? *overrides : desk_params(samples.size(), alpha, eta, eps);
  params.alpha = alpha;
  params.eta = eta;
  params.eps = eps;
  params.validate();
  return estimate_sp_from_inputs(sp_inputs_from_samples(samples, params), params);
}

SpPointwise sp_partial_pointwise(SpPartialOracle& oracle, double x, std::size_t n) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("reserve outside [0,1]");
  if (n == 0) throw ParameterError("pointwise estimate needs n >= 1");
  const std::size_t k = oracle.k();
  SpPointwise out;
  out.win_and_q.assign(k, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    const SpPartialOutcome o = oracle.query(x);
    if (!o.q) continue;
    if (o.winner < k) out.win_and_q[o.winner] += 1.0; else out.reserve_and_q += 1.0;
  }
  const double nn = static_cast<double>(n);
  for (auto& c : out.win_and_q) c /= nn;
  out.reserve_and_q /= nn;
  double log_sum = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    out.means.push_back(out.win_and_q[j] + out.reserve_and_q);
    if (!(out.means[j] > 0.0)) {
      std::ostringstream os;
      os << "no reserve-triggered observations for bidder " << j + 1 << " at x=" << x;
      throw EstimatorError(os.str());
    }
    log_sum += std::log(out.means[j]);
  }
  for (std::size_t j = 0; j < k; ++j) {
    out.fhat.push_back(std::exp(log_sum / static_cast<double>(k - 1) - std::log(out.means[j])));
  }
  return out;
}

SpPartialEstimate sp_partial_estimate(SpPartialOracle& oracle, const SpPartialConfig& c) {
  if (!(c.p >= 0.0 && c.p < 1.0)) throw ParameterError("p must lie in [0,1)");
  if (!(c.gamma > 0.0 && c.gamma <= 1.0)) throw ParameterError("gamma must lie in (0,1]");
  if (!(c.eps > 0.0 && c.eps < 1.0)) throw ParameterError("eps must lie in (0,1)");
  if (!(c.delta > 0.0 && c.delta < 1.0)) throw ParameterError("delta must lie in (0,1)");
  if (!(c.lipschitz > 0.0)) throw ParameterError("lipschitz constant must be positive");
  const std::size_t k = oracle.k();
  SpPartialEstimate out;
  for (std::size_t a = 0;; ++a) {
    const double w = c.gamma + static_cast<double>(a) * c.eps / 2.0;
    if (w >= 1.0 - 1e-12) break;
    out.levels.push_back(w);
  }
  out.levels.push_back(1.0);
  const double q = c.eps / 4.0;
  out.pointwise_samples = c.pointwise_samples.value_or(static_cast<std::size_t>(
      std::ceil(48.0 / (c.gamma * q * q) * std::log(2.0 * static_cast<double>(k) / c.delta))));
  out.search_steps = c.search_steps.value_or(static_cast<std::size_t>(
      std::max(1.0, std::ceil(std::log2(4.0 * c.lipschitz * (1.0 - c.p) / c.eps)))));
  const double planned = static_cast<double>(k) * static_cast<double>(out.levels.size()) *
                         static_cast<double>(out.search_steps) *
                         static_cast<double>(out.pointwise_samples);
  if (planned > static_cast<double>(c.max_oracle_calls)) {
    std::ostringstream os;
    os << "planned " << planned << " oracle calls exceed the budget of " << c.max_oracle_calls;
    throw EstimatorError(os.str());
  }
  const std::uint64_t start = oracle.calls();
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<double> pos;
    for (double w : out.levels) {
      double lo = c.p, hi = 1.0, z = 1.0;
      for (std::size_t s = 0; s < out.search_steps; ++s) {
        const double mid = 0.5 * (lo + hi);
        const double f = sp_partial_pointwise(oracle, mid, out.pointwise_samples).fhat[j];
        if (std::abs(f - w) <= q) {
          hi = mid;
          break;
        }
        if (f >= w) hi = mid; else lo = mid;
      }
      z = hi;
      if (!pos.empty()) z = std::max(z, pos.back());
      pos.push_back(z);
    }
    std::vector<double> b{c.p}, v{c.gamma};
    for (std::size_t a = 0; a < pos.size(); ++a) {
      if (pos[a] <= b.back()) {
        v.back() = std::max(v.back(), out.levels[a]);
      } else {
        b.push_back(pos[a]);
        v.push_back(out.levels[a]);
      }
    }
    out.cdfs.emplace_back(std::move(b), std::move(v), Interpolation::Step);
    out.positions.push_back(std::move(pos));
  }
  out.oracle_calls = oracle.calls() - start;
  return out;
}

}  // namespace auctionmetrics

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "auctionmetrics/auction_model.hpp"
#include "auctionmetrics/cdf.hpp"
#include "auctionmetrics/simulate.hpp"

namespace auctionmetrics {

/// How the per-macro-interval contraction statistic gamma_l is computed.
enum class ContractionBound {
  /// Supremum over the clip box of the infinity-norm Jacobian of the map.
  Jacobian,
  /// c * (1/U_i(x_{tau-1})) * sum_m x_m/(1-x_m)^2 * Delta_{i,m}, c = contraction_constant.
  Paper,
};

/// Where the map evaluates H inside micro-interval m.
enum class Quadrature {
  /// At x_m, from column m, as published.
  Right,
  /// At (x_{m-1} + x_m)/2, from the average of columns m-1 and m (column 0 is V).
  Midpoint,
};

struct SpParams {
  double alpha = 0.5;
  double eta = 2.0;
  double eps = 0.1;
  double theta = 0.02;
  double nu = 0.01;
  double micro_delta = 1e-3;
  double eps_g = 0.01;
  std::size_t fp_iters = 6;
  double contractivity_cap = 0.25;
  ContractionBound bound = ContractionBound::Jacobian;
  Quadrature quadrature = Quadrature::Midpoint;
  double contraction_constant = 1.0;  // used by ContractionBound::Paper
  std::size_t contraction_pairs = 100;
  /// Halvings of micro_delta allowed for a macro interval whose first full
  /// micro step already breaks the cap; 0 makes that case an error.
  std::size_t max_refinements = 6;
  std::uint64_t contraction_seed = 0x5eed;

  /// Throws ParameterError unless 0 < nu < theta < 1, 0 < micro_delta < nu,
  /// eps_g > 0 and 0 < alpha <= min(eta, 1).
  void validate() const;
};

/// 16 (eta/alpha)^6, the constant in the contraction statistic as published.
double paper_contraction_constant(double alpha, double eta);

/// Desk defaults: theta = max(eps/(16 eta), 0.02), nu = min(0.05, theta/2),
/// micro_delta = 1e-3, eps_g = dkw_band(n, 0.05), fp_iters = ceil(log_4(4/eps_g)).
SpParams desk_params(std::size_t n, double alpha, double eta, double eps);

/// Pr(W = i, Y <= x) empirically.
SubCdf empirical_G_sp(const SpSampleSet& samples, std::size_t i);

/// U_i(x) = (1/n) sum_j 1{W_j = i, Y_j <= x} / (1 - Y_j), built from Y_j <= 1 - theta/4.
class CoarseU {
 public:
  CoarseU(std::vector<double> ys, std::vector<double> cumulative, double domain_end);
  double operator()(double x) const noexcept;
  double domain_end() const noexcept { return domain_end_; }

 private:
  std::vector<double> ys_;
  std::vector<double> cum_;  // cum_[j] = weight of ys_[0..j]
  double domain_end_;
};

CoarseU coarse_U(const SpSampleSet& samples, std::size_t i, double theta);

/// Everything the fixed-point pipeline reads: G_i, the coarse U_i used for the
/// clip box, and the starting values V_i (default G_i(nu)).
struct SpInputs {
  std::size_t k = 0;
  std::function<double(std::size_t, double)> G;
  std::function<double(std::size_t, double)> U_coarse;
  std::function<double(std::size_t)> V0;
};

SpInputs sp_inputs_from_samples(const SpSampleSet& samples, const SpParams& params);

struct SpGrid {
  double nu = 0.0;
  double micro_delta = 0.0;
  std::vector<double> endpoints;            // x_0 = nu, x_1, ..., x_T
  std::vector<std::size_t> micro_counts;    // l^(tau), tau = 1..T
  std::vector<double> micro_widths;         // micro_delta / 2^r per interval
  std::vector<double> gamma_per_interval;   // gamma^(tau)_{l^(tau)}

  std::size_t T() const noexcept { return micro_counts.size(); }
  /// x_{tau,l} = x_{tau-1} + l * micro_widths[tau-1]; tau is 1-based, l in 1..l^(tau).
  double micro_point(std::size_t tau, std::size_t l) const;
  std::size_t total_micro_points() const noexcept;
  std::size_t refined_intervals() const noexcept;
};

/// Greedy construction of macro intervals with the doubling cap and gamma <= cap.
/// Throws EstimatorError when an interval cannot take a single micro step.
SpGrid build_macro_intervals(const SpInputs& inputs, const SpParams& params);

/// gamma^(tau)_l for l = 1..max_l, in order, with micro steps of `width`
/// (default micro_delta).
std::vector<double> contraction_statistics(const SpInputs& inputs, const SpParams& params,
                                           double x_prev, std::size_t max_l,
                                           std::optional<double> width = std::nullopt);

struct FixedPointState {
  std::vector<std::vector<double>> U;  // U[i][l-1]
  std::vector<double> V;
};

/// Per-interval quantities the map reads.
struct MacroContext {
  double x0 = 0.0;                           // x_{tau-1}
  std::vector<double> x;                     // x_{tau,1..l}
  std::vector<std::vector<double>> delta;    // Delta_{i,m}
  std::vector<std::vector<double>> lo, hi;   // clip box
  std::size_t degenerate = 0;                // entries whose coarse U was zero
};

MacroContext macro_context(std::size_t tau, const SpGrid& grid, const SpInputs& inputs,
                           const SpParams& params);

struct MapCounters {
  std::size_t outer_clips = 0;
  std::size_t h_clips = 0;
  std::size_t entries = 0;
};

/// One application of the discretized fixed-point map. Throws DomainError on
/// non-positive entries in the input state.
FixedPointState fixed_point_map(const FixedPointState& state, const MacroContext& ctx,
                                const SpParams& params, MapCounters* counters = nullptr);

FixedPointState fixed_point_map(const FixedPointState& state, std::size_t tau, const SpGrid& grid,
                                const SpInputs& inputs, const SpParams& params);

/// True when every row is nondecreasing and inside the clip box (with tolerance).
bool in_clip_box(const FixedPointState& state, const MacroContext& ctx, double tol = 1e-12);

struct FixedPointRun {
  std::vector<FixedPointState> states;              // one per macro interval
  std::vector<double> points;                       // nu then every micro point
  std::vector<std::vector<double>> U_tilde;         // U_tilde[i][point]
  std::vector<double> contraction_samples;          // max measured ratio per interval
  std::vector<std::vector<double>> iterate_gaps;    // ||U_{t+1} - U_t|| per interval
  std::vector<double> outer_clip_rate;              // per interval, final iteration
  std::vector<double> h_clip_rate;
  std::size_t box_violations = 0;
  std::size_t degenerate_entries = 0;
};

FixedPointRun run_fixed_point(const SpGrid& grid, const SpInputs& inputs, const SpParams& params);

struct RecoveredCdfs {
  std::vector<PiecewiseCdf> cdfs;
  double isotonic_repair_total = 0.0;
  std::size_t isotonic_repairs = 0;
};

/// F_i = prod_{j != i} U_j^{1/(k-1)} / U_i^{(k-2)/(k-1)} at the nearest grid
/// point, zero up to theta, one from 1 - theta, clipped and made monotone.
RecoveredCdfs recover_F(const std::vector<std::vector<double>>& U_tilde,
                        const std::vector<double>& points, const SpParams& params);

struct SpDiagnostics {
  std::size_t T = 0;
  std::size_t total_micro_points = 0;
  std::vector<double> macro_endpoints;
  std::vector<double> gamma_per_interval;
  std::vector<double> contraction_samples;
  std::vector<double> clip_rates;  // per interval, outer clip activations / entries
  std::size_t box_violations = 0;
  std::size_t degenerate_entries = 0;
  std::size_t refined_intervals = 0;
  double isotonic_repair_total = 0.0;
  SpParams params;
};

struct SpEstimate {
  std::vector<PiecewiseCdf> cdfs;
  SpDiagnostics diagnostics;
};

/// End-to-end second-price pipeline. Parameters come from `overrides` when
/// given, otherwise from desk_params(n, alpha, eta, eps).
SpEstimate estimate_sp(const SpSampleSet& samples, double alpha, double eta, double eps,
                       const std::optional<SpParams>& overrides = std::nullopt);

/// Same pipeline on arbitrary inputs (population mode uses exact functions).
SpEstimate estimate_sp_from_inputs(const SpInputs& inputs, const SpParams& params);

struct SpPointwise {
  std::vector<double> fhat;   // F_j(x)
  std::vector<double> means;  // estimates of prod_{l != j} F_l(x)
  std::vector<double> win_and_q;
  double reserve_and_q = 0.0;
};

/// n queries at reserve x. Throws EstimatorError when some mean is zero.
SpPointwise sp_partial_pointwise(SpPartialOracle& oracle, double x, std::size_t n);

struct SpPartialConfig {
  double p = 0.5;
  double gamma = 0.5;
  double eps = 0.1;
  double delta = 0.05;
  double lipschitz = 1.0;
  std::optional<std::size_t> pointwise_samples;  // default 48/(gamma (eps/4)^2) ln(2k/delta)
  std::optional<std::size_t> search_steps;       // default ceil(log2(4 L (1-p)/eps))
  std::uint64_t max_oracle_calls = 2'000'000'000ULL;
};

struct SpPartialEstimate {
  std::vector<PiecewiseCdf> cdfs;
  std::vector<std::vector<double>> positions;  // z_{j,a} after the running max
  std::vector<double> levels;                  // w_a
  std::size_t pointwise_samples = 0;
  std::size_t search_steps = 0;
  std::uint64_t oracle_calls = 0;
};

SpPartialEstimate sp_partial_estimate(SpPartialOracle& oracle, const SpPartialConfig& config);

}  // namespace auctionmetrics

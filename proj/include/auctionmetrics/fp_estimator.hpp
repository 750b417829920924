#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "auctionmetrics/auction_model.hpp"
#include "auctionmetrics/cdf.hpp"
#include "auctionmetrics/simulate.hpp"

namespace auctionmetrics {

struct FpEstimatorConfig {
  double p = 0.0;
  double gamma = 1.0;
  double eps = 0.05;
  double delta = 0.05;
  std::optional<double> h_floor;  // defaults to gamma / 2

  double clip_level() const { return h_floor.value_or(gamma / 2.0); }
  /// Throws ParameterError unless 0 <= p <= 1, 0 < gamma <= 1,
  /// 0 < eps <= gamma / 2 and h_floor > 0.
  void validate() const;
};

/// Empirical CDF of the winning bids.
PiecewiseCdf empirical_H(const FpSampleSet& samples);

/// (1/n) #{j : Y_j <= x, Z_j = i}.
SubCdf empirical_Hi(const FpSampleSet& samples, std::size_t i);

/// G_i(x) = (1/n) sum_j 1{Y_j >= x, Z_j = i} / max(H(Y_j), h_floor).
class GHat {
 public:
  GHat(std::vector<double> ys, std::vector<double> suffix_weight);

  /// Nonincreasing, left-continuous in x.
  double operator()(double x) const noexcept;
  /// Value just to the right of x.
  double right_limit(double x) const noexcept;
  std::span<const double> support() const noexcept { return ys_; }
  bool empty() const noexcept { return ys_.empty(); }

 private:
  std::vector<double> ys_;      // ascending sample points with Z = i
  std::vector<double> suffix_;  // suffix_[j] = weight of ys_[j..], suffix_[size] = 0
};

struct GHatDiagnostics {
  std::size_t clipped = 0;  // terms whose H(Y_j) fell below h_floor
};

GHat estimate_ghat(const FpSampleSet& samples, std::size_t i, const FpEstimatorConfig& config,
                   GHatDiagnostics* diag = nullptr);

struct FpEstimate {
  std::vector<PiecewiseCdf> cdfs;
  std::size_t n = 0;
  double clip_rate = 0.0;
  double p = 0.0;
  double gamma = 0.0;
  double h_floor = 0.0;
};

/// F_i = exp(-G_i), stored right-continuously with a breakpoint at every
/// winning bid of bidder i.
FpEstimate estimate_bid_cdf_effective(const FpSampleSet& samples, const FpEstimatorConfig& config);

/// Effective-support run with eta = eps/2, p = eta, gamma = (lambda eta)^k and
/// the estimate set to zero below eta.
FpEstimate estimate_bid_cdf_full(const FpSampleSet& samples, double lambda, double eps,
                                 double delta = 0.05);

/// Forward difference (F(x + h) - F(x)) / h on [p, 1]. Step input gives a step
/// density, linear input a linear one.
PiecewiseFunction estimate_density(const PiecewiseCdf& fhat, double h, double p);

/// Bandwidth sqrt(eps0 / L).
double recommended_bandwidth(double eps0, double lipschitz);

/// exp(-int_x^1 h_i(t) / H(t) dt) for an exact winning-bid CDF H and the
/// density h_i of H_i, by 5-point Gauss-Legendre on `pieces` sub-intervals.
double identify_bid_cdf(const std::function<double(double)>& H,
                        const std::function<double(double)>& hi_density, double x,
                        std::size_t pieces = 256);

/// Knobs for the partial-observation estimator; unset fields take desk defaults
/// derived from (gamma, eps, delta). `paper_constants` swaps in the proof's plug-ins.
struct FpPartialConfig {
  double p = 0.5;
  double gamma = 0.25;
  double eps = 0.15;
  double delta = 0.05;
  double lipschitz = 1.0;
  std::optional<double> grid_spacing;  // quantile-level spacing of the search grid
  std::optional<double> search_tol;    // binary-search resolution target
  std::optional<std::size_t> search_samples;
  std::optional<std::size_t> eval_samples;
  std::uint64_t max_oracle_calls = 2'000'000'000ULL;
  bool paper_constants = false;
};

struct FpPartialPlan {
  double grid_spacing;
  double search_tol;
  double eval_tol;
  std::size_t search_steps;
  std::size_t search_samples;
  std::size_t eval_samples;
};

FpPartialPlan plan_fp_partial(const FpPartialConfig& config, std::size_t k);

struct FpPartialEstimate {
  std::vector<PiecewiseCdf> cdfs;
  FpPartialPlan plan{};
  std::uint64_t oracle_calls = 0;
  std::size_t grid_points = 0;
  std::size_t isotonic_repairs = 0;
};

/// Queries the oracle with chosen reserves: the planted-win frequency at x
/// estimates H(x), win-frequency differences estimate H_i(x), binary searches
/// place grid points at quantile levels of H and H_i, and F_i = exp(-G_i) is
/// assembled from the increments. Throws EstimatorError if the planned number
/// of oracle calls exceeds max_oracle_calls.
FpPartialEstimate fp_partial_estimate(FpPartialOracle& oracle, const FpPartialConfig& config);

/// Bisection for the smallest x in [lo, hi] with f(x) >= target, `steps` halvings.
template <class Fn>
double bisect_level(Fn&& f, double target, double lo, double hi, std::size_t steps) {
  for (std::size_t s = 0; s < steps; ++s) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) >= target) hi = mid; else lo = mid;
  }
  return hi;
}

}  // namespace auctionmetrics

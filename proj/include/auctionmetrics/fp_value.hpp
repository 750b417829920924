#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "auctionmetrics/auction_model.hpp"
#include "auctionmetrics/cdf.hpp"

namespace auctionmetrics {

struct ValueEstimatorConfig {
  double p = 0.2;
  double gamma = 0.16;
  double eps = 0.1;
  double delta = 0.05;
  double zeta = 1.0;
  std::optional<double> lipschitz;     // bid-CDF Lipschitz constant; unset means general case
  std::optional<double> d;             // interior margin for the general case, defaults to eps
  std::optional<double> grid_spacing;  // v-grid spacing, defaults to min(eps/4, 0.005)

  void validate() const;
};

/// (v - b) prod_{j != i} F_j(b).
double empirical_utility(const std::vector<PiecewiseCdf>& fhats, std::size_t i, double v, double b);

/// argmax of (v - b) P(b) over b in [lo, 1], P = prod_{j != i} F_j, smallest b on ties.
double best_response(const std::vector<PiecewiseCdf>& fhats, std::size_t i, double v, double lo);

/// Same, with the product of the other bidders' CDFs given directly.
double best_response_product(const PiecewiseCdf& others, double v, double lo);

struct ValueCdfEstimate {
  PiecewiseCdf cdf;
  std::size_t isotonic_repairs = 0;
};

/// G(v) = F_own(b(v)) for v on a grid from v_start to 1, zero below v_start,
/// where b(v) is the best response against `others` on [bid_lo, 1].
ValueCdfEstimate compose_value_cdf(const PiecewiseCdf& own, const PiecewiseCdf& others,
                                   double bid_lo, double v_start, double grid_spacing);

struct ValueDiagnostics {
  double eps0_used = 0.0;
  double eps1_used = 0.0;
  std::size_t isotonic_repairs = 0;
  double bid_lo = 0.0;
};

struct ValueEstimate {
  std::vector<PiecewiseCdf> cdfs;
  std::vector<ValueDiagnostics> diagnostics;
  double p = 0.0;
  double gamma = 0.0;
  double v_start = 0.0;
};

/// Per bidder: relabel (Y, Z) as (Y, 1{Z = i}), estimate F_i and the product
/// of the others from the two-agent data, and invert the best response.
ValueEstimate estimate_value_cdf_effective(const FpSampleSet& samples,
                                           const ValueEstimatorConfig& config);

/// Lipschitz case: eta = eps/2, p = eta, gamma = (lambda eta)^k.
/// General case (config.lipschitz unset): p = 8 eta/11, d = 3 eta/11,
/// gamma = (8 lambda eta/11)^k, zero below p + d.
ValueEstimate estimate_value_cdf_full(const FpSampleSet& samples, double lambda,
                                      const ValueEstimatorConfig& config);

/// max over x of (|F(x + eps0) - F(x)| + 2 eps) / eps0 for x in [0, 1 - eps0].
double lipschitz_estimate(const PiecewiseCdf& fhat, double eps0, double eps);

}  // namespace auctionmetrics

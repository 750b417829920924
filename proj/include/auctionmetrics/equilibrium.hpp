#pragma once

#include <cstddef>
#include <vector>

#include "auctionmetrics/auction_model.hpp"

namespace auctionmetrics {

/// beta(v) = v - int_0^v F^{k-1} / F(v)^{k-1}; zero when F(v) = 0.
double symmetric_equilibrium_bid(const PiecewiseCdf& value_cdf, std::size_t k, double v);
double symmetric_equilibrium_bid(const Distribution& value_dist, std::size_t k, double v);

/// Inverse bid functions alpha_i on a uniform bid grid b_0 = 0 < ... < b_{N-1} = eta.
struct InverseBidProfile {
  std::vector<double> b;
  std::vector<std::vector<double>> alpha;  // alpha[i][j] = alpha_i(b_j)
  double eta = 0.0;
  double boundary_defect = 0.0;  // max_i |alpha_i(0+)| before pinning alpha_i(0) = 0
  double residual = 0.0;         // identity residual on [0.1 eta, 0.9 eta]
  std::size_t bisection_steps = 0;

  /// alpha_i(b) by linear interpolation.
  double inverse_bid(std::size_t i, double bid) const;
  /// beta_i(v), the bid placed with value v.
  double bid(std::size_t i, double value) const;
};

/// Shooting method: integrate the first-order conditions backward from
/// alpha_i(eta) = 1 with RK4 and bisect on eta. Requires value_dists.
/// Throws ConvergenceError when the boundary defect stays above `tol`.
InverseBidProfile solve_asymmetric_equilibrium(const AuctionModel& model,
                                               std::size_t grid_size = 2001, double tol = 1e-3);

/// max_{i, interior b} |(alpha_i(b) - b) * sum_{j != i} d/db log G_j(alpha_j(b)) - 1|
/// with central differences, over grid points in [lo_frac*eta, hi_frac*eta].
double equilibrium_identity_residual(const AuctionModel& model, const InverseBidProfile& profile,
                                     double lo_frac = 0.1, double hi_frac = 0.9);

/// Bid CDFs F_i(b) = G_i(alpha_i(b)) on the profile grid.
std::vector<PiecewiseCdf> equilibrium_bid_cdfs(const AuctionModel& model,
                                               const InverseBidProfile& profile);

}  // namespace auctionmetrics

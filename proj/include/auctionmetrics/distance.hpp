#pragma once

#include <cstddef>

#include "auctionmetrics/cdf.hpp"

namespace auctionmetrics {

/// sup_x |F(x) - G(x)|, exact over the union of breakpoints and left limits.
double kolmogorov(const PiecewiseCdf& f, const PiecewiseCdf& g);

/// sup over x in [lo, hi] of |F(x) - G(x)|.
double sup_distance(const PiecewiseCdf& f, const PiecewiseCdf& g, double lo, double hi);

/// Smallest eps with F(x - eps) - eps <= G(x) <= F(x + eps) + eps for all x.
/// Bisection on eps with an exact check at shifted breakpoints; never exceeds
/// the Kolmogorov distance.
double levy(const PiecewiseCdf& f, const PiecewiseCdf& g);

/// True when the eps-band condition above holds.
bool levy_feasible(const PiecewiseCdf& f, const PiecewiseCdf& g, double eps);

/// Integral of |F - G| over [0, 1], piecewise in closed form.
double wasserstein1(const PiecewiseCdf& f, const PiecewiseCdf& g);

/// Integral of |f - g| over [lo, hi].
double l1_distance(const PiecewiseFunction& f, const PiecewiseFunction& g, double lo, double hi);

/// sqrt(ln(2/delta) / (2n)).
double dkw_band(std::size_t n, double delta);

}  // namespace auctionmetrics

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "auctionmetrics/random.hpp"

namespace auctionmetrics {

enum class Interpolation { Step, Linear };

/// Monotone CDF on [0, 1] stored as breakpoints.
///
/// F(x) = 0 for x below the first breakpoint (and for every x < 0) and equals
/// the terminal value at and after the last breakpoint. Between breakpoints the
/// function is either a right-continuous staircase or linear. A terminal value
/// below one makes this a sub-distribution; `is_full_cdf()` reports which.
class PiecewiseCdf {
 public:
  PiecewiseCdf(std::vector<double> breakpoints, std::vector<double> values,
               Interpolation interpolation = Interpolation::Step);

  static PiecewiseCdf uniform();
  static PiecewiseCdf point_mass(double at);
  /// Linear interpolation of `cdf` on `knots` equally spaced points of [0, 1].
  static PiecewiseCdf tabulate(const std::function<double(double)>& cdf, std::size_t knots);

  double operator()(double x) const noexcept;
  /// lim_{y -> x^-} F(y).
  double left_limit(double x) const noexcept;
  /// inf{x in [0,1] : F(x) >= q}. Throws DomainError for q outside [0, 1]
  /// or above the terminal value.
  double inverse(double q) const;

  std::span<const double> breakpoints() const noexcept { return breakpoints_; }
  std::span<const double> values() const noexcept { return values_; }
  Interpolation interpolation() const noexcept { return interpolation_; }
  double terminal_value() const noexcept { return values_.back(); }
  bool is_full_cdf() const noexcept;

 private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
  Interpolation interpolation_;
};

/// Sub-distribution such as Pr(Z = i, Y <= x); the terminal value may be below one.
class SubCdf {
 public:
  explicit SubCdf(PiecewiseCdf staircase) : staircase_(std::move(staircase)) {}

  double operator()(double x) const noexcept { return staircase_(x); }
  double left_limit(double x) const noexcept { return staircase_.left_limit(x); }
  double total_mass() const noexcept { return staircase_.terminal_value(); }
  const PiecewiseCdf& staircase() const noexcept { return staircase_; }

 private:
  PiecewiseCdf staircase_;
};

/// Piecewise function on [front, back] with no monotonicity requirement; zero
/// outside its breakpoint range. Used for densities and density estimates.
class PiecewiseFunction {
 public:
  PiecewiseFunction(std::vector<double> breakpoints, std::vector<double> values,
                    Interpolation interpolation);

  double operator()(double x) const noexcept;
  double left_limit(double x) const noexcept;

  std::span<const double> breakpoints() const noexcept { return breakpoints_; }
  std::span<const double> values() const noexcept { return values_; }
  Interpolation interpolation() const noexcept { return interpolation_; }

 private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
  Interpolation interpolation_;
};

/// Piecewise-linear density on [0, 1] with declared bounds.
///
/// The bounds are checked at every knot, which suffices because the density is
/// linear between knots.
class BoundedDensityModel {
 public:
  BoundedDensityModel(std::vector<double> knots, std::vector<double> density, double alpha_lo,
                      double eta_hi, std::optional<double> lipschitz = std::nullopt);
  /// Bounds taken as the smallest and largest knot density.
  static BoundedDensityModel from_knots(std::vector<double> knots, std::vector<double> density);
  static BoundedDensityModel uniform();

  double density(double x) const noexcept;
  double cdf(double x) const noexcept;
  double quantile(double q) const;

  double alpha_lo() const noexcept { return alpha_lo_; }
  double eta_hi() const noexcept { return eta_hi_; }
  std::optional<double> lipschitz() const noexcept { return lipschitz_; }
  std::span<const double> knots() const noexcept { return knots_; }
  std::span<const double> knot_density() const noexcept { return density_; }

  PiecewiseFunction density_function() const;
  /// Linear interpolation of the (piecewise quadratic) CDF; every model knot is
  /// kept and each piece gets `per_piece` sub-intervals.
  PiecewiseCdf to_piecewise_cdf(std::size_t per_piece = 256) const;

 private:
  std::vector<double> knots_;
  std::vector<double> density_;
  std::vector<double> mass_before_;  // CDF at each knot
  double alpha_lo_;
  double eta_hi_;
  std::optional<double> lipschitz_;
};

/// A bidder's distribution on [0, 1], given either as breakpoints or as a density.
class Distribution {
 public:
  Distribution(PiecewiseCdf cdf);           // NOLINT(google-explicit-constructor)
  Distribution(BoundedDensityModel model);  // NOLINT(google-explicit-constructor)

  double cdf(double x) const noexcept;
  double quantile(double q) const;
  /// Exact for breakpoint distributions, a fine linear table for densities.
  PiecewiseCdf to_piecewise_cdf() const;

  const PiecewiseCdf* as_piecewise() const noexcept { return std::get_if<PiecewiseCdf>(&repr_); }
  const BoundedDensityModel* as_density() const noexcept {
    return std::get_if<BoundedDensityModel>(&repr_);
  }

 private:
  std::variant<PiecewiseCdf, BoundedDensityModel> repr_;
};

/// Inverse-transform draw. Requires a full CDF.
double sample(const PiecewiseCdf& cdf, RandomStream& rng);
double sample(const Distribution& dist, RandomStream& rng);

/// Empirical CDF of a sample (staircase). Throws DomainError on an empty sample.
PiecewiseCdf empirical_cdf(std::span<const double> sample);

/// Pointwise product of CDFs on the union of their breakpoints; step
/// interpolation unless every factor is linear.
PiecewiseCdf product_cdf(std::span<const PiecewiseCdf> factors);

/// Pool-adjacent-violators fit of a nondecreasing sequence (unweighted least squares).
std::vector<double> isotonic_nondecreasing(std::span<const double> values);

}  // namespace auctionmetrics

#include "auctionmetrics/cdf.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "auctionmetrics/errors.hpp"

namespace auctionmetrics {
namespace {

constexpr double kMassTol = 1e-9;
constexpr double kFullTol = 1e-12;

void check_breakpoints(const std::vector<double>& b, const std::vector<double>& v) {
  if (b.empty()) throw DomainError("breakpoints must be non-empty");
  if (b.size() != v.size()) throw DomainError("breakpoints and values differ in length");
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (!(b[j] >= 0.0 && b[j] <= 1.0)) {
      std::ostringstream os;
      os << "breakpoint " << j << " = " << b[j] << " outside [0,1]";
      throw DomainError(os.str());
    }
    if (j > 0 && !(b[j] > b[j - 1])) throw DomainError("breakpoints must be strictly ascending");
    if (!std::isfinite(v[j])) throw DomainError("non-finite value");
  }
}

// Index of the last breakpoint <= x, or -1.
std::ptrdiff_t floor_index(std::span<const double> b, double x) {
  auto it = std::upper_bound(b.begin(), b.end(), x);
  return static_cast<std::ptrdiff_t>(it - b.begin()) - 1;
}

// Index of the last breakpoint < x, or -1.
std::ptrdiff_t strict_floor_index(std::span<const double> b, double x) {
  auto it = std::lower_bound(b.begin(), b.end(), x);
  return static_cast<std::ptrdiff_t>(it - b.begin()) - 1;
}

double lerp_at(std::span<const double> b, std::span<const double> v, std::size_t j, double x) {
  const double w = (x - b[j]) / (b[j + 1] - b[j]);
  return v[j] + w * (v[j + 1] - v[j]);
}

}  // namespace

PiecewiseCdf::PiecewiseCdf(std::vector<double> breakpoints, std::vector<double> values,
                           Interpolation interpolation)
    : breakpoints_(std::move(breakpoints)),
      values_(std::move(values)),
      interpolation_(interpolation) {
  check_breakpoints(breakpoints_, values_);
  for (std::size_t j = 0; j < values_.size(); ++j) {
    if (values_[j] < 0.0 || values_[j] > 1.0) throw DomainError("CDF value outside [0,1]");
    if (j > 0 && values_[j] < values_[j - 1]) throw DomainError("CDF values must be nondecreasing");
  }
}

PiecewiseCdf PiecewiseCdf::uniform() { return PiecewiseCdf({0.0, 1.0}, {0.0, 1.0}, Interpolation::Linear); }

PiecewiseCdf PiecewiseCdf::point_mass(double at) { return PiecewiseCdf({at}, {1.0}, Interpolation::Step); }

PiecewiseCdf PiecewiseCdf::tabulate(const std::function<double(double)>& cdf, std::size_t knots) {
  if (knots < 2) throw ParameterError("tabulate needs at least two knots");
  std::vector<double> b(knots), v(knots);
  double running = 0.0;
  for (std::size_t j = 0; j < knots; ++j) {
    b[j] = static_cast<double>(j) / static_cast<double>(knots - 1);
    running = std::max(running, std::clamp(cdf(b[j]), 0.0, 1.0));
    v[j] = running;
  }
  return PiecewiseCdf(std::move(b), std::move(v), Interpolation::Linear);
}

double PiecewiseCdf::operator()(double x) const noexcept {
  const auto j = floor_index(breakpoints_, x);
  if (j < 0) return 0.0;
  const auto u = static_cast<std::size_t>(j);
  if (interpolation_ == Interpolation::Step || u + 1 == breakpoints_.size()) return values_[u];
  return lerp_at(breakpoints_, values_, u, x);
}

double PiecewiseCdf::left_limit(double x) const noexcept {
  const auto j = strict_floor_index(breakpoints_, x);
  if (j < 0) return 0.0;
  const auto u = static_cast<std::size_t>(j);
  if (interpolation_ == Interpolation::Step || u + 1 == breakpoints_.size()) return values_[u];
  return lerp_at(breakpoints_, values_, u, x);
}

double PiecewiseCdf::inverse(double q) const {
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile level outside [0,1]");
  if (q == 0.0) return 0.0;
  auto it = std::lower_bound(values_.begin(), values_.end(), q);
  if (it == values_.end()) throw DomainError("quantile level above the terminal CDF value");
  const auto j = static_cast<std::size_t>(it - values_.begin());
  if (interpolation_ == Interpolation::Step || j == 0) return breakpoints_[j];
  const double lo = values_[j - 1], hi = values_[j];
  const double w = (q - lo) / (hi - lo);
  return breakpoints_[j - 1] + w * (breakpoints_[j] - breakpoints_[j - 1]);
}

bool PiecewiseCdf::is_full_cdf() const noexcept { return values_.back() >= 1.0 - kFullTol; }

PiecewiseFunction::PiecewiseFunction(std::vector<double> breakpoints, std::vector<double> values,
                                     Interpolation interpolation)
    : breakpoints_(std::move(breakpoints)),
      values_(std::move(values)),
      interpolation_(interpolation) {
  check_breakpoints(breakpoints_, values_);
}

double PiecewiseFunction::operator()(double x) const noexcept {
  const auto j = floor_index(breakpoints_, x);
  if (j < 0) return 0.0;
  const auto u = static_cast<std::size_t>(j);
  if (u + 1 == breakpoints_.size()) return x == breakpoints_.back() ? values_.back() : 0.0;
  if (interpolation_ == Interpolation::Step) return values_[u];
  return lerp_at(breakpoints_, values_, u, x);
}

double PiecewiseFunction::left_limit(double x) const noexcept {
  const auto j = strict_floor_index(breakpoints_, x);
  if (j < 0) return 0.0;
  const auto u = static_cast<std::size_t>(j);
  if (u + 1 == breakpoints_.size()) return 0.0;
  if (interpolation_ == Interpolation::Step) return values_[u];
  return lerp_at(breakpoints_, values_, u, x);
}

BoundedDensityModel::BoundedDensityModel(std::vector<double> knots, std::vector<double> density,
                                         double alpha_lo, double eta_hi,
                                         std::optional<double> lipschitz)
    : knots_(std::move(knots)),
      density_(std::move(density)),
      alpha_lo_(alpha_lo),
      eta_hi_(eta_hi),
      lipschitz_(lipschitz) {
  check_breakpoints(knots_, density_);
  if (knots_.size() < 2 || knots_.front() != 0.0 || knots_.back() != 1.0) {
    throw DomainError("density knots must start at 0 and end at 1");
  }
  if (!(alpha_lo_ >= 0.0) || !(eta_hi_ >= alpha_lo_)) {
    throw DomainError("density bounds need 0 <= alpha_lo <= eta_hi");
  }
  mass_before_.assign(knots_.size(), 0.0);
  for (std::size_t j = 0; j < knots_.size(); ++j) {
    if (density_[j] < alpha_lo_ - kFullTol || density_[j] > eta_hi_ + kFullTol) {
      std::ostringstream os;
      os << "density " << density_[j] << " at knot " << knots_[j] << " violates bounds ["
         << alpha_lo_ << ", " << eta_hi_ << "]";
      throw DomainError(os.str());
    }
    if (j == 0) continue;
    const double w = knots_[j] - knots_[j - 1];
    if (lipschitz_ && std::abs(density_[j] - density_[j - 1]) / w > *lipschitz_ + 1e-9) {
      throw DomainError("density slope exceeds the declared Lipschitz constant");
    }
    mass_before_[j] = mass_before_[j - 1] + 0.5 * w * (density_[j] + density_[j - 1]);
  }
  if (std::abs(mass_before_.back() - 1.0) > kMassTol) {
    std::ostringstream os;
    os << "density integrates to " << mass_before_.back() << ", expected 1";
    throw DomainError(os.str());
  }
}

BoundedDensityModel BoundedDensityModel::from_knots(std::vector<double> knots,
                                                    std::vector<double> density) {
  if (density.empty()) throw DomainError("density must be non-empty");
  const auto [lo, hi] = std::minmax_element(density.begin(), density.end());
  const double a = *lo, b = *hi;
  return BoundedDensityModel(std::move(knots), std::move(density), a, b);
}

BoundedDensityModel BoundedDensityModel::uniform() {
  return BoundedDensityModel({0.0, 1.0}, {1.0, 1.0}, 1.0, 1.0, 0.0);
}

double BoundedDensityModel::density(double x) const noexcept {
  if (x < 0.0 || x > 1.0) return 0.0;
  const auto j = static_cast<std::size_t>(std::max<std::ptrdiff_t>(floor_index(knots_, x), 0));
  if (j + 1 >= knots_.size()) return density_.back();
  return lerp_at(knots_, density_, j, x);
}

double BoundedDensityModel::cdf(double x) const noexcept {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const auto j = static_cast<std::size_t>(floor_index(knots_, x));
  const double t = x - knots_[j];
  const double slope = (density_[j + 1] - density_[j]) / (knots_[j + 1] - knots_[j]);
  const double f = mass_before_[j] + density_[j] * t + 0.5 * slope * t * t;
  return std::clamp(f, 0.0, 1.0);
}

double BoundedDensityModel::quantile(double q) const {
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile level outside [0,1]");
  if (q == 0.0) return 0.0;
  // first knot index j+1 with mass_before_[j+1] >= q
  auto it = std::lower_bound(mass_before_.begin() + 1, mass_before_.end(), q);
  if (it == mass_before_.end()) return 1.0;
  const auto j = static_cast<std::size_t>(it - mass_before_.begin()) - 1;
  const double width = knots_[j + 1] - knots_[j];
  const double slope = (density_[j + 1] - density_[j]) / width;
  const double r = q - mass_before_[j];
  const double d0 = density_[j];
  const double disc = std::max(d0 * d0 + 2.0 * slope * r, 0.0);
  const double denom = d0 + std::sqrt(disc);
  const double t = denom > 0.0 ? 2.0 * r / denom : 0.0;
  return std::clamp(knots_[j] + std::clamp(t, 0.0, width), 0.0, 1.0);
}

PiecewiseFunction BoundedDensityModel::density_function() const {
  return PiecewiseFunction(knots_, density_, Interpolation::Linear);
}

PiecewiseCdf BoundedDensityModel::to_piecewise_cdf(std::size_t per_piece) const {
  per_piece = std::max<std::size_t>(per_piece, 1);
  std::vector<double> b, v;
  b.reserve((knots_.size() - 1) * per_piece + 1);
  for (std::size_t j = 0; j + 1 < knots_.size(); ++j) {
    const double w = knots_[j + 1] - knots_[j];
    for (std::size_t s = 0; s < per_piece; ++s) {
      const double x = knots_[j] + w * static_cast<double>(s) / static_cast<double>(per_piece);
      b.push_back(x);
      v.push_back(cdf(x));
    }
  }
  b.push_back(1.0);
  v.push_back(1.0);
  for (std::size_t j = 1; j < v.size(); ++j) v[j] = std::max(v[j], v[j - 1]);
  return PiecewiseCdf(std::move(b), std::move(v), Interpolation::Linear);
}

Distribution::Distribution(PiecewiseCdf cdf) : repr_(std::move(cdf)) {}
Distribution::Distribution(BoundedDensityModel model) : repr_(std::move(model)) {}

double Distribution::cdf(double x) const noexcept {
  if (const auto* p = as_piecewise()) return (*p)(x);
  return std::get<BoundedDensityModel>(repr_).cdf(x);
}

double Distribution::quantile(double q) const {
  if (const auto* p = as_piecewise()) return p->inverse(q);
  return std::get<BoundedDensityModel>(repr_).quantile(q);
}

PiecewiseCdf Distribution::to_piecewise_cdf() const {
  if (const auto* p = as_piecewise()) return *p;
  return std::get<BoundedDensityModel>(repr_).to_piecewise_cdf();
}

double sample(const PiecewiseCdf& cdf, RandomStream& rng) {
  if (!cdf.is_full_cdf()) throw DomainError("cannot sample from a sub-distribution");
  return std::min(cdf.inverse(std::min(rng.uniform(), cdf.terminal_value())), 1.0);
}

double sample(const Distribution& dist, RandomStream& rng) {
  if (const auto* p = dist.as_piecewise()) return sample(*p, rng);
  return dist.quantile(rng.uniform());
}

PiecewiseCdf empirical_cdf(std::span<const double> sample) {
  if (sample.empty()) throw DomainError("empirical CDF of an empty sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> b, v;
  const double n = static_cast<double>(sorted.size());
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    if (j + 1 < sorted.size() && sorted[j + 1] == sorted[j]) continue;
    b.push_back(sorted[j]);
    v.push_back(static_cast<double>(j + 1) / n);
  }
  v.back() = 1.0;
  return PiecewiseCdf(std::move(b), std::move(v), Interpolation::Step);
}

PiecewiseCdf product_cdf(std::span<const PiecewiseCdf> factors) {
  if (factors.empty()) throw DomainError("product of zero CDFs");
  std::vector<double> b;
  bool all_linear = true;
  for (const auto& f : factors) {
    b.insert(b.end(), f.breakpoints().begin(), f.breakpoints().end());
    all_linear = all_linear && f.interpolation() == Interpolation::Linear;
  }
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  std::vector<double> v(b.size());
  double running = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j) {
    double prod = 1.0;
    for (const auto& f : factors) prod *= f(b[j]);
    running = std::max(running, prod);
    v[j] = running;
  }
  return PiecewiseCdf(std::move(b), std::move(v),
                      all_linear ? Interpolation::Linear : Interpolation::Step);
}

std::vector<double> isotonic_nondecreasing(std::span<const double> values) {
  struct Block {
    double sum;
    std::size_t count;
  };
  std::vector<Block> stack;
  stack.reserve(values.size());
  for (double y : values) {
    stack.push_back({y, 1});
    while (stack.size() > 1) {
      const Block& top = stack.back();
      const Block& prev = stack[stack.size() - 2];
      if (prev.sum / static_cast<double>(prev.count) <= top.sum / static_cast<double>(top.count)) break;
      Block merged{prev.sum + top.sum, prev.count + top.count};
      stack.pop_back();
      stack.back() = merged;
    }
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& blk : stack) out.insert(out.end(), blk.count, blk.sum / static_cast<double>(blk.count));
  return out;
}

}  // namespace auctionmetrics

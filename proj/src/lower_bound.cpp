#include "auctionmetrics/lower_bound.hpp"

#include <cmath>
#include <sstream>

#include "auctionmetrics/errors.hpp"

namespace auctionmetrics {
namespace {

void check(std::size_t k, double eps, double lambda) {
  if (k < 2) throw DomainError("lower-bound fixture needs k >= 2");
  if (!(eps > 0.0 && eps < 0.5) || !(lambda > 0.0 && lambda < 0.5)) {
    std::ostringstream os;
    os << "lower-bound fixture needs eps, lambda in (0, 1/2); got eps=" << eps
       << " lambda=" << lambda;
    throw DomainError(os.str());
  }
}

}  // namespace

std::pair<AuctionModel, AuctionModel> lower_bound_fixture(std::size_t k, double eps,
                                                          double lambda) {
  check(k, eps, lambda);
  const double heavy = 1.0 - lambda;
  // lambda * Unif[0,1] + (1 - lambda) * Unif[lo, hi], CDF is linear between kinks
  auto mixture = [&](double lo, double hi) {
    std::vector<double> b, v;
    if (lo > 0.0) {
      b = {0.0, lo, hi, 1.0};
      v = {0.0, lambda * lo, lambda * hi + heavy, 1.0};
    } else {
      b = {0.0, hi, 1.0};
      v = {0.0, lambda * hi + heavy, 1.0};
    }
    if (hi == 1.0) {
      b.pop_back();
      v.pop_back();
      v.back() = 1.0;
    }
    return PiecewiseCdf(std::move(b), std::move(v), Interpolation::Linear);
  };
  std::vector<Distribution> d, dp;
  d.emplace_back(mixture(0.0, eps / 4.0));
  dp.emplace_back(mixture(0.75 * eps, eps));
  for (std::size_t i = 1; i < k; ++i) {
    d.emplace_back(mixture(0.75, 1.0));
    dp.emplace_back(mixture(0.75, 1.0));
  }
  ModelMetadata meta;
  meta.lambda = lambda;
  return {AuctionModel(std::move(d), meta, {}, "lower-bound-D"),
          AuctionModel(std::move(dp), meta, {}, "lower-bound-D'")};
}

double lower_bound_event_probability(std::size_t k, double eps, double lambda) {
  check(k, eps, lambda);
  const double f1 = lambda * eps + (1.0 - lambda);
  return f1 * std::pow(lambda * eps, static_cast<double>(k - 1));
}

}  // namespace auctionmetrics

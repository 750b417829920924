#include "auctionmetrics/auction_model.hpp"

#include <sstream>

#include "auctionmetrics/errors.hpp"

namespace auctionmetrics {
namespace {

constexpr double kBoundTol = 1e-9;

void check_density_bounds(const BoundedDensityModel& m, const ModelMetadata& meta, std::size_t i) {
  for (double d : m.knot_density()) {
    if ((meta.alpha && d < *meta.alpha - kBoundTol) || (meta.eta && d > *meta.eta + kBoundTol)) {
      std::ostringstream os;
      os << "bid density of bidder " << i + 1 << " leaves the declared [alpha, eta] range";
      throw DomainError(os.str());
    }
  }
}

}  // namespace

AuctionModel::AuctionModel(std::vector<Distribution> bid_dists, ModelMetadata metadata,
                           std::vector<BoundedDensityModel> value_dists, std::string id)
    : bids_(std::move(bid_dists)),
      values_(std::move(value_dists)),
      meta_(metadata),
      id_(std::move(id)) {
  if (bids_.size() < 2) throw DomainError("an auction model needs k >= 2 bidders");
  if (!values_.empty() && values_.size() != bids_.size()) {
    throw DomainError("value distributions must match the number of bidders");
  }
  if (meta_.alpha && meta_.eta && *meta_.alpha > *meta_.eta) {
    throw DomainError("declared alpha exceeds eta");
  }
  for (std::size_t i = 0; i < bids_.size(); ++i) {
    if (const auto* p = bids_[i].as_piecewise(); p && !p->is_full_cdf()) {
      throw DomainError("bid distributions must be full CDFs");
    }
    if (const auto* d = bids_[i].as_density()) check_density_bounds(*d, meta_, i);
  }
  if (meta_.zeta) {
    for (const auto& v : values_) {
      for (double d : v.knot_density()) {
        if (d > *meta_.zeta + kBoundTol) throw DomainError("value density exceeds declared zeta");
      }
    }
  }
}

std::vector<PiecewiseCdf> AuctionModel::bid_cdfs() const {
  std::vector<PiecewiseCdf> out;
  out.reserve(bids_.size());
  for (const auto& d : bids_) out.push_back(d.to_piecewise_cdf());
  return out;
}

AuctionModel uniform_model(std::size_t k) {
  std::vector<Distribution> d(k, Distribution(PiecewiseCdf::uniform()));
  ModelMetadata meta;
  meta.lambda = 1.0;
  meta.alpha = 1.0;
  meta.eta = 1.0;
  meta.lipschitz = 0.0;
  return AuctionModel(std::move(d), meta, {}, "uniform" + std::to_string(k));
}

void FpSampleSet::validate() const {
  for (std::size_t j = 0; j < obs.size(); ++j) {
    if (!(obs[j].y >= 0.0 && obs[j].y <= 1.0) || obs[j].z >= k) {
      std::ostringstream os;
      os << "observation " << j + 1 << " out of range";
      throw DomainError(os.str());
    }
  }
}

void SpSampleSet::validate() const {
  for (std::size_t j = 0; j < obs.size(); ++j) {
    if (!(obs[j].y >= 0.0 && obs[j].y <= 1.0) || obs[j].w >= k) {
      std::ostringstream os;
      os << "observation " << j + 1 << " out of range";
      throw DomainError(os.str());
    }
  }
}

}  // namespace auctionmetrics

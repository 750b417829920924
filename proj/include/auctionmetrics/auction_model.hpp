#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "auctionmetrics/cdf.hpp"

namespace auctionmetrics {

/// Declared bounds; none of these are inferred from data.
struct ModelMetadata {
  std::optional<double> lambda;     // growth: |F(x) - F(y)| >= lambda |x - y|
  std::optional<double> alpha;      // density lower bound
  std::optional<double> eta;        // density upper bound
  std::optional<double> lipschitz;  // density Lipschitz constant
  std::optional<double> zeta;       // value density cap
};

class AuctionModel {
 public:
  AuctionModel(std::vector<Distribution> bid_dists, ModelMetadata metadata = {},
               std::vector<BoundedDensityModel> value_dists = {}, std::string id = {});

  std::size_t k() const noexcept { return bids_.size(); }
  const std::vector<Distribution>& bid_dists() const noexcept { return bids_; }
  const std::vector<BoundedDensityModel>& value_dists() const noexcept { return values_; }
  bool has_values() const noexcept { return !values_.empty(); }
  const ModelMetadata& metadata() const noexcept { return meta_; }
  const std::string& id() const noexcept { return id_; }

  double bid_cdf(std::size_t i, double x) const { return bids_.at(i).cdf(x); }
  /// Breakpoint form of every bid CDF (exact or finely tabulated).
  std::vector<PiecewiseCdf> bid_cdfs() const;

 private:
  std::vector<Distribution> bids_;
  std::vector<BoundedDensityModel> values_;
  ModelMetadata meta_;
  std::string id_;
};

/// k symmetric uniform bidders on [0, 1].
AuctionModel uniform_model(std::size_t k);

// Bidder indices are 0-based in memory; the planted bid / reserve is index k.
struct FpObservation {
  double y;
  std::size_t z;
  bool operator==(const FpObservation&) const = default;
};

struct SpObservation {
  double y;
  std::size_t w;
  bool operator==(const SpObservation&) const = default;
};

struct PartialFpObservation {
  double r;
  std::size_t z;
  bool operator==(const PartialFpObservation&) const = default;
};

struct PartialSpObservation {
  double r;
  std::size_t z;
  bool q;
  bool operator==(const PartialSpObservation&) const = default;
};

struct Provenance {
  std::uint64_t seed = 0;
  std::string model_id;
};

struct FpSampleSet {
  std::size_t k = 0;
  std::vector<FpObservation> obs;
  Provenance provenance;

  std::size_t size() const noexcept { return obs.size(); }
  /// Throws DomainError on y outside [0,1] or z >= k.
  void validate() const;
};

struct SpSampleSet {
  std::size_t k = 0;
  std::vector<SpObservation> obs;
  Provenance provenance;

  std::size_t size() const noexcept { return obs.size(); }
  void validate() const;
};

}  // namespace auctionmetrics

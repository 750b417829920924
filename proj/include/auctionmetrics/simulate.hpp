#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "auctionmetrics/auction_model.hpp"
#include "auctionmetrics/random.hpp"

namespace auctionmetrics {

/// n draws of (max bid, argmax); ties go to the lowest index. Auction t draws
/// bidder i from RandomStream(seed).split(t).split(i).
FpSampleSet simulate_fp(const AuctionModel& model, std::size_t n, std::uint64_t seed);

/// n draws of (second-highest bid, argmax).
SpSampleSet simulate_sp(const AuctionModel& model, std::size_t n, std::uint64_t seed);

/// Winner among the k bidders and a planted bid r. Returns k when the planted
/// bid wins, which it does on ties.
std::size_t fp_partial_oracle(const AuctionModel& model, double r, RandomStream& rng);

struct SpPartialOutcome {
  std::size_t winner;  // k for the reserve
  bool q;              // at most one bidder above r, so r is the price or wins
};

SpPartialOutcome sp_partial_oracle(const AuctionModel& model, double r, RandomStream& rng);

/// Query interface used by the partial-observation estimators.
class FpPartialOracle {
 public:
  virtual ~FpPartialOracle() = default;
  virtual std::size_t k() const = 0;
  virtual std::size_t query(double r) = 0;
  virtual std::uint64_t calls() const = 0;
};

class SpPartialOracle {
 public:
  virtual ~SpPartialOracle() = default;
  virtual std::size_t k() const = 0;
  virtual SpPartialOutcome query(double r) = 0;
  virtual std::uint64_t calls() const = 0;
};

/// Simulator-backed oracle; call c uses RandomStream(seed).split(c).
class SimulatedFpOracle final : public FpPartialOracle {
 public:
  SimulatedFpOracle(const AuctionModel& model, std::uint64_t seed, bool keep_log = false);
  std::size_t k() const override { return model_.k(); }
  std::size_t query(double r) override;
  std::uint64_t calls() const override { return calls_; }
  const std::vector<PartialFpObservation>& log() const noexcept { return log_; }

 private:
  AuctionModel model_;
  RandomStream root_;
  std::uint64_t calls_ = 0;
  bool keep_log_;
  std::vector<PartialFpObservation> log_;
};

class SimulatedSpOracle final : public SpPartialOracle {
 public:
  SimulatedSpOracle(const AuctionModel& model, std::uint64_t seed, bool keep_log = false);
  std::size_t k() const override { return model_.k(); }
  SpPartialOutcome query(double r) override;
  std::uint64_t calls() const override { return calls_; }
  const std::vector<PartialSpObservation>& log() const noexcept { return log_; }

 private:
  AuctionModel model_;
  RandomStream root_;
  std::uint64_t calls_ = 0;
  bool keep_log_;
  std::vector<PartialSpObservation> log_;
};

}  // namespace auctionmetrics

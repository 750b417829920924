#include "auctionmetrics/simulate.hpp"

#include "auctionmetrics/errors.hpp"
#include "parallel.hpp"

namespace auctionmetrics {
namespace {

void check_reserve(double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw DomainError("reserve price outside [0,1]");
}

struct Draw {
  double top = -1.0;
  double second = -1.0;
  std::size_t arg = 0;
};

Draw draw_auction(const AuctionModel& model, const RandomStream& stream) {
  Draw d;
  for (std::size_t i = 0; i < model.k(); ++i) {
    RandomStream s = stream.split(i);
    const double x = sample(model.bid_dists()[i], s);
    if (x > d.top) {
      d.second = d.top;
      d.top = x;
      d.arg = i;
    } else if (x > d.second) {
      d.second = x;
    }
  }
  return d;
}

template <class Obs, class Make>
std::vector<Obs> simulate(const AuctionModel& model, std::size_t n, std::uint64_t seed, Make make) {
  std::vector<Obs> out(n);
  const RandomStream root(seed);
  detail::parallel_chunks(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t t = b; t < e; ++t) out[t] = make(draw_auction(model, root.split(t)));
  });
  return out;
}

}  // namespace

FpSampleSet simulate_fp(const AuctionModel& model, std::size_t n, std::uint64_t seed) {
  FpSampleSet s;
  s.k = model.k();
  s.provenance = {seed, model.id()};
  s.obs = simulate<FpObservation>(model, n, seed, [](const Draw& d) {
    return FpObservation{d.top, d.arg};
  });
  return s;
}

SpSampleSet simulate_sp(const AuctionModel& model, std::size_t n, std::uint64_t seed) {
  SpSampleSet s;
  s.k = model.k();
  s.provenance = {seed, model.id()};
  s.obs = simulate<SpObservation>(model, n, seed, [](const Draw& d) {
    return SpObservation{d.second, d.arg};
  });
  return s;
}

std::size_t fp_partial_oracle(const AuctionModel& model, double r, RandomStream& rng) {
  check_reserve(r);
  const Draw d = draw_auction(model, rng.split(rng()));
  return r >= d.top ? model.k() : d.arg;
}

SpPartialOutcome sp_partial_oracle(const AuctionModel& model, double r, RandomStream& rng) {
  check_reserve(r);
  const Draw d = draw_auction(model, rng.split(rng()));
  const std::size_t winner = r >= d.top ? model.k() : d.arg;
  return {winner, r >= d.second};
}

SimulatedFpOracle::SimulatedFpOracle(const AuctionModel& model, std::uint64_t seed, bool keep_log)
    : model_(model), root_(seed), keep_log_(keep_log) {}

std::size_t SimulatedFpOracle::query(double r) {
  RandomStream s = root_.split(calls_++);
  const std::size_t z = fp_partial_oracle(model_, r, s);
  if (keep_log_) log_.push_back({r, z});
  return z;
}

SimulatedSpOracle::SimulatedSpOracle(const AuctionModel& model, std::uint64_t seed, bool keep_log)
    : model_(model), root_(seed), keep_log_(keep_log) {}

SpPartialOutcome SimulatedSpOracle::query(double r) {
  RandomStream s = root_.split(calls_++);
  const SpPartialOutcome o = sp_partial_oracle(model_, r, s);
  if (keep_log_) log_.push_back({r, o.winner, o.q});
  return o;
}

}  // namespace auctionmetrics

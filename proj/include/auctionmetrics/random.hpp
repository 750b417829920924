#pragma once

#include <cstdint>
#include <limits>

namespace auctionmetrics {

/// Counter-based SplitMix64 stream.
///
/// A stream is a (key, counter) pair, so it is cheap to copy and to split:
/// `split(i)` derives an independent child keyed on the parent key and `i`.
/// Simulations take one child per auction and one grandchild per bidder, so
/// the drawn values do not depend on evaluation order or thread count.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed) noexcept : key_(mix(seed ^ kSeedSalt)) {}

  RandomStream split(std::uint64_t index) const noexcept {
    RandomStream child(0);
    child.key_ = mix(key_ ^ mix(index + kGolden));
    return child;
  }

  result_type operator()() noexcept {
    ++counter_;
    return mix(key_ + counter_ * kGolden);
  }

  /// Uniform double in the open interval (0, 1).
  double uniform() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kSeedSalt = 0x243F6A8885A308D3ULL;

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace auctionmetrics

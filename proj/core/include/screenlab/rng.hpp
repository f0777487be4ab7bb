#pragma once

#include <cmath>
#include <cstdint>

namespace screenlab {

/// Counter-based pseudo-random stream.
///
/// Every draw is a pure function of (key, counter), so streams can be
/// split into independent substreams (one per candidate, per shard, ...)
/// and replayed exactly from a 64-bit seed. No global state anywhere.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(mix(seed ^ kStreamSalt) + stream * kGolden)) {}

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * kGolden); }

  /// Uniform double in [0, 1), 53 random mantissa bits.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return next_unit() < p; }

  /// Standard normal draw (Marsaglia polar method, spare cached).
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * next_unit() - 1.0;
      v = 2.0 * next_unit() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * scale;
    has_spare_ = true;
    return u * scale;
  }

  /// Independent child stream; result does not depend on how many values
  /// were already drawn from the parent.
  RandomStream substream(std::uint64_t index) const {
    return RandomStream(key_ ^ kChildSalt, index);
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
  static constexpr std::uint64_t kStreamSalt = 0x6A09E667F3BCC909ull;
  static constexpr std::uint64_t kChildSalt = 0xBB67AE8584CAA73Bull;

  // SplitMix64 finalizer.
  static std::uint64_t mix(std::uint64_t x) {
    x += kGolden;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace screenlab

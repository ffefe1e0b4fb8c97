#pragma once

#include <cstdint>

namespace statelp {

// SplitMix64 output function (Steele, Lea & Flood 2014).
inline std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Standard normal quantile, Wichura's AS 241 (PPND16). Accurate to ~1e-15.
double normal_quantile(double p);

/// Counter-based SplitMix64 stream.
///
/// Draw k of stream `key` is splitmix64_mix(key + (k+1)*gamma), so a stream is
/// a pure function of (key, counter) and streams can be split without shared
/// state. Substreams are derived with derive_stream(master, index); the
/// bootstrap uses one stream per draw index and the Monte Carlo harness one
/// stream per replication.
class Rng {
 public:
  explicit Rng(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64() { return splitmix64_mix(key_ + (++counter_) * kGamma); }

  /// Uniform draw strictly inside (0,1).
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  /// Standard normal via inverse-CDF transform of uniform().
  double normal() { return normal_quantile(uniform()); }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Key of substream `index` of `master`.
inline std::uint64_t derive_stream(std::uint64_t master, std::uint64_t index) {
  return splitmix64_mix(master ^ splitmix64_mix(index + 0x1F123BB5159A55E5ULL));
}

inline Rng make_stream(std::uint64_t master, std::uint64_t index) {
  return Rng(derive_stream(master, index));
}

}  // namespace statelp

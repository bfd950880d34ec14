#pragma once

#include <cstdint>
#include <random>

namespace mpoi {

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

/// Seedable generator with a bit-reproducible uniform draw.
///
/// Streams are derived from (master seed, stream id) so that each Markov
/// system sees the same transitions no matter how a strategy interleaves
/// its advancement with other systems.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  static RandomStream derive(std::uint64_t master_seed, std::uint64_t stream_id) {
    return RandomStream(mix_seed(master_seed, stream_id));
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mpoi

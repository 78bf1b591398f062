// rng.hpp — counter-based random streams
//
// Each stream is the SplitMix64 sequence: output_i = mix(key + i*GAMMA),
// where mix is the SplitMix64 finalizer and GAMMA the golden-ratio constant.
// Stream keys are derived by hashing, so (base_seed, replication) and
// (stream, substream id) each map to statistically independent streams and
// any draw is reproducible from the tuple that named its stream.

#pragma once

#include <cstdint>

namespace busq {

class RandomStream {
 public:
  static constexpr uint64_t kGamma = 0x9e3779b97f4a7c15ull;

  static uint64_t mix(uint64_t x) {
    x += kGamma;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  explicit RandomStream(uint64_t key) : key_(key) {}

  static RandomStream from(uint64_t base_seed, uint64_t replication) {
    return RandomStream(mix(mix(base_seed) + kGamma * (replication + 1)));
  }

  // Derives an independent stream; the parent's own sequence is untouched.
  RandomStream substream(uint64_t id) const {
    return RandomStream(mix(key_ + kGamma * (id + 1)));
  }

  uint64_t next_u64() { return mix(key_ + kGamma * (counter_++)); }

  // Uniform in [0, 1); never returns exactly 1, so 1-u stays positive.
  double next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

 private:
  uint64_t key_;
  uint64_t counter_ = 0;
};

} // namespace busq

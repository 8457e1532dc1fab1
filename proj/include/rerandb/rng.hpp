#pragma once

#include <cstdint>

namespace rerandb {

// Seedable, splittable random stream built on splitmix64 (Steele, Lea,
// Flood 2014; mixer by Vigna). Statistical quality and reproducibility are
// what matter here, NOT unpredictability: every experiment in this project
// must replay bit-identically from (seed, stream), and nothing in the
// security model depends on the simulator's RNG being cryptographic.
//
// Distinct stream ids derived from the same seed behave as independent
// streams, so each Monte Carlo trial can own stream id = trial index.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : seed_(seed), stream_id_(stream_id),
        state_(mix(mix(seed + 0x9e3779b97f4a7c15ULL) ^
                   mix(stream_id + 0xbf58476d1ce4e5b9ULL))) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // Independent stream; the parent's stream id folds into the derived seed
  // so substreams of distinct streams never collide.
  RngStream substream(std::uint64_t id) const {
    return RngStream(seed_ ^ mix(stream_id_ + 0x94d049bb133111ebULL), id);
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // Uniform integer in [0, bound), bound >= 1. Rejection sampling keeps the
  // distribution exactly uniform.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t v = next_u64();
      if (v >= threshold) return v % bound;
    }
  }

  bool next_bit() { return (next_u64() >> 63) != 0; }

  // Uniform double in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t state_;
};

}  // namespace rerandb

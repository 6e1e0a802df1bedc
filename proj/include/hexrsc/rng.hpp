#pragma once

#include <cstdint>

namespace hexrsc {

// Counter-based RNG. Every random decision is a pure function of
// (seed, stream, index), so sampled data is identical no matter how work
// is partitioned across threads.
class CounterRng {
 public:
  explicit CounterRng(uint64_t seed) : seed_(seed) {}

  static uint64_t mix(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  uint64_t word(uint64_t stream, uint64_t index) const {
    uint64_t h = mix(seed_ ^ 0x243f6a8885a308d3ULL);
    h = mix(h ^ stream);
    h = mix(h ^ index);
    return h;
  }

  // Uniform in [0, 1).
  double uniform(uint64_t stream, uint64_t index) const {
    return static_cast<double>(word(stream, index) >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p, uint64_t stream, uint64_t index) const {
    return uniform(stream, index) < p;
  }

  uint64_t seed() const { return seed_; }

 private:
  uint64_t seed_;
};

}  // namespace hexrsc

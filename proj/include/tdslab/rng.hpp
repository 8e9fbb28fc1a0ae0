#pragma once

#include <cmath>
#include <cstdint>

namespace tdslab {

// Counter-style deterministic RNG built on SplitMix64. Substreams are derived
// by hashing the parent state with integer keys, so independent streams can be
// reconstructed from (seed, key...) without sharing mutable state. All
// distributions are implemented here; nothing depends on libstdc++
// distribution internals, so sequences are identical across toolchains.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // (0, 1]
  double uniform_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller (cosine branch only).
  double normal() {
    double u1 = uniform_pos();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  // Uniform integer in [lo, hi], both inclusive. Debiased by rejection.
  int64_t uniform_int(int64_t lo, int64_t hi) {
    uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    if (span == 0) return lo + static_cast<int64_t>(next_u64());  // full range
    uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return lo + static_cast<int64_t>(x % span);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Gumbel(0,1) noise; used for weighted sampling without replacement.
  double gumbel() { return -std::log(-std::log(uniform_pos())); }

  // Derive an independent substream keyed by up to three integers.
  Rng fork(uint64_t a, uint64_t b = 0, uint64_t c = 0) const {
    uint64_t h = state_;
    h = mix(h ^ (a + 0x9e3779b97f4a7c15ULL));
    h = mix(h ^ (b + 0xbf58476d1ce4e5b9ULL));
    h = mix(h ^ (c + 0x94d049bb133111ebULL));
    return Rng(h);
  }

  uint64_t state() const { return state_; }
  void set_state(uint64_t s) { state_ = s; }

 private:
  static uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdULL;
    z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ULL;
    return z ^ (z >> 33);
  }

  uint64_t state_;
};

}  // namespace tdslab

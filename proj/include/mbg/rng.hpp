#pragma once

#include <cstdint>
#include <random>

namespace mbg {

// SplitMix64 finalizer (Steele, Lea, Flood 2014). Fixed forever: trial seeds
// and every derived sub-seed go through this function.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

// Seed of trial t under a master seed: the (t+1)-th output of a SplitMix64
// stream started at `master`.
constexpr std::uint64_t trial_seed(std::uint64_t master, std::uint64_t t) {
  return mix64(master + (t + 1) * kGoldenGamma);
}

// Independent stream for a named purpose inside one trial (market, breaker
// coin flips, ...).
constexpr std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed ^ mix64(stream + kGoldenGamma));
}

// mt19937_64 output is fully specified by the standard; the two conversions
// below are written out so that results do not depend on the library's
// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % bound;
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mbg

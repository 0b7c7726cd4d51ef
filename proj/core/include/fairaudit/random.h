#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace fairaudit {

// SplitMix64 finalizer. Stable across platforms and releases; every derived
// seed in the library goes through it.
constexpr std::uint64_t Mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives a child seed from `base` and a path of integer components:
//   h = Mix64(base); for each c: h = Mix64(h ^ c).
std::uint64_t DeriveSeed(std::uint64_t base,
                         std::initializer_list<std::uint64_t> path) noexcept;

// Named stream tags used with DeriveSeed.
enum class Stream : std::uint64_t {
  kScores = 1,
  kLoadings = 2,
  kFeatures = 3,
  kReassign = 4,
  kSample = 5,
  kSplit = 6,
  kTrial = 7,
  kPopulation = 8,
};

constexpr std::uint64_t Tag(Stream s) noexcept {
  return static_cast<std::uint64_t>(s);
}

// Reproducible random source. Draws are built from raw mt19937_64 output
// rather than <random> distributions, whose algorithms are left to the
// standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double Uniform() noexcept;
  // Uniform on (0, 1).
  double UniformOpen() noexcept;
  // Standard normal (Box-Muller, one value per call).
  double Normal() noexcept;
  // Uniform integer in [0, n). n must be positive.
  std::uint64_t Below(std::uint64_t n) noexcept;
  // True with probability p; p <= 0 never, p >= 1 always.
  bool Bernoulli(double p) noexcept { return Uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace fairaudit

#include "fairaudit/random.h"

#include <cmath>
#include <numbers>

namespace fairaudit {

std::uint64_t DeriveSeed(std::uint64_t base,
                         std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = Mix64(base);
  for (std::uint64_t c : path) h = Mix64(h ^ c);
  return h;
}

double Rng::Uniform() noexcept {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::UniformOpen() noexcept {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::Normal() noexcept {
  const double u1 = UniformOpen();
  const double u2 = Uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::Below(std::uint64_t n) noexcept {
  // Reject the low 2^64 mod n values so every residue is equally likely.
  const std::uint64_t limit = -n % n;
  for (;;) {
    const std::uint64_t r = engine_();
    if (r >= limit) return r % n;
  }
}

}  // namespace fairaudit

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hurstlab {

struct Seed {
  std::uint64_t value = 0;
  friend bool operator==(Seed, Seed) = default;
};

// std::mt19937_64 is specified bit-for-bit by the standard, so streams are
// identical across compilers. The std:: distributions are not, hence the
// hand-rolled conversions below.
class Rng {
 public:
  explicit Rng(Seed seed) : engine_(seed.value) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0, 1) with 53 bits of resolution.
  double open_unit() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform on (lo, hi), never touching the endpoints.
  double open_interval(double lo, double hi) {
    return lo + (hi - lo) * open_unit();
  }

  // Unit-mean exponential by inversion.
  double unit_exponential() { return -std::log(open_unit()); }

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer: a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Folds a sequence of words into one seed. Order-sensitive; depends only on
// the words, never on call history.
template <typename... Words>
constexpr Seed derive_seed(Seed master, Words... words) noexcept {
  std::uint64_t h = mix64(master.value);
  ((h = mix64(h ^ static_cast<std::uint64_t>(words))), ...);
  return Seed{h};
}

}  // namespace hurstlab

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace rcook::prng {

// Version tag archived next to every stored seed. Any change to the
// sequences below requires a bump, or archived score maps stop being
// regenerable.
inline constexpr std::string_view kVersion = "splitmix64-boxmuller/1";

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

// splitmix64: the state walks a fixed-increment Weyl sequence and each
// output is mix64 of the state. Counter-based, trivially seekable.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit constexpr SplitMix64(std::uint64_t seed) : state(seed) {}

  constexpr std::uint64_t next() {
    state += kGamma;
    return mix64(state);
  }

  // uniform in [0, 1), 53-bit resolution
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // uniform integer in [0, n), multiply-shift reduction
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }
};

// Seed of a named substream. Index-keyed so per-fold / per-grid-point
// streams never depend on evaluation order.
constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed + (stream + 1) * kGamma);
}

constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t a,
                               std::uint64_t b) {
  return derive(derive(seed, a), b);
}

// Standard normals: Box-Muller over the splitmix64 stream, pairs emitted
// cos-first.
struct GaussianStream {
  SplitMix64 gen;
  double spare = 0.0;
  bool has_spare = false;

  explicit GaussianStream(std::uint64_t seed) : gen(seed) {}

  double next() {
    if (has_spare) {
      has_spare = false;
      return spare;
    }
    const double u1 = 1.0 - gen.next_unit();  // (0, 1], keeps log finite
    const double u2 = gen.next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare = r * std::sin(a);
    has_spare = true;
    return r * std::cos(a);
  }
};

}  // namespace rcook::prng

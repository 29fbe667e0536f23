#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace newtpot {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent stream seed for (seed, stream, index). Streams keep the
/// samplers of unrelated zones from sharing random numbers.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return splitmix64(splitmix64(seed ^ splitmix64(stream)) ^ index);
}

namespace stream {
inline constexpr std::uint64_t midfield = 0x6d6964;
inline constexpr std::uint64_t inner_midfield = 0x696e6e;
inline constexpr std::uint64_t near_sphere = 0x6e656172;
inline constexpr std::uint64_t shell_sphere = 0x7368656c;
inline constexpr std::uint64_t lorentz = 0x6c6f72;
inline constexpr std::uint64_t harness = 0x68726e;
inline constexpr std::uint64_t level_set = 0x6c7673;
inline constexpr std::uint64_t replicate = 0x726570;
inline constexpr std::uint64_t verify_points = 0x707473;
inline constexpr std::uint64_t sup_grid = 0x737570;
inline constexpr std::uint64_t compare = 0x636d70;
}  // namespace stream

/// mt19937_64 with explicit conversions so results do not depend on the
/// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_open_low() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal by Box-Muller.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open_low();
    const double u2 = uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    spare_ = rad * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return rad * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace newtpot

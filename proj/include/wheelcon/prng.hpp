#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace wheelcon {

/// Identifier stored in script and log headers. The engine of std::mt19937_64
/// is fully specified by the C++ standard, so raw outputs are identical on
/// every conforming platform. Distributions are implemented here with integer
/// and IEEE arithmetic only, since the std:: distributions are not portable.
inline constexpr std::string_view kPrngId = "mt19937_64";

class Prng {
 public:
  explicit Prng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n); rejection sampling avoids modulo bias.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

  bool coin() { return (engine_() >> 63) != 0; }

  /// Approximately standard normal: Irwin-Hall sum of twelve uniforms.
  /// Only additions, so the result is bit-identical everywhere.
  double normal() {
    double s = 0.0;
    for (int i = 0; i < 12; ++i) s += uniform();
    return s - 6.0;
  }

 private:
  std::mt19937_64 engine_;
};

/// Derives an independent stream seed from a base seed and a stream tag
/// (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace wheelcon

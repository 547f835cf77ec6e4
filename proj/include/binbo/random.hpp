#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace binbo
{
  /// splitmix64 finalizer; used to decorrelate derived seeds.
  constexpr std::uint64_t mix64(std::uint64_t z)
  {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// FNV-1a, stable across platforms (std::hash is not).
  constexpr std::uint64_t stable_hash(std::string_view s)
  {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s)
    {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  template <typename... Parts>
  std::uint64_t derive_seed(std::uint64_t base, Parts const&... parts)
  {
    std::uint64_t s = mix64(base);
    ((s = mix64(s ^ stable_hash(std::string_view(parts)))), ...);
    return s;
  }

  /*
   * Thin wrapper over mt19937_64. The distributions are written out here
   * rather than taken from <random> because the standard leaves their
   * algorithms unspecified, and traces must be bit-identical across
   * standard libraries.
   */
  class Rng
  {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; both variates are used.
    double normal()
    {
      if (has_spare_)
      {
        has_spare_ = false;
        return spare_;
      }
      double u1 = 0.0;
      while (u1 <= 0.0)
        u1 = uniform();
      const double u2 = uniform();
      const double r = std::sqrt(-2.0 * std::log(u1));
      const double angle = 2.0 * std::numbers::pi * u2;
      spare_ = r * std::sin(angle);
      has_spare_ = true;
      return r * std::cos(angle);
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n)
    {
      // rejection removes the modulo bias
      const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
      std::uint64_t v;
      do
        v = engine_();
      while (v >= limit);
      return v % n;
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
  };
}

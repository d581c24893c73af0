#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace ffseq {

// splitmix64 finalizer; used to derive independent stream seeds from a master
// seed plus stream coordinates (e.g. snr index, trial index).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                    std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = mix64(master);
  s = mix64(s ^ mix64(a + 0x100000001b3ULL));
  s = mix64(s ^ mix64(b + 0x2545f4914f6cdd1dULL));
  s = mix64(s ^ mix64(c + 0x9e3779b97f4a7c15ULL));
  return s;
}

// Deterministic random stream. The distributions are implemented here rather
// than with std:: distribution objects so the byte stream is stable across
// standard libraries.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // [0, 1)
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // inclusive bounds, rejection sampling
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % span;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return lo + static_cast<std::int64_t>(x % span);
  }

  // standard normal via Box-Muller, pair cached
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    cached_ = radius * std::sin(angle);
    have_cached_ = true;
    return radius * std::cos(angle);
  }

  // circular complex Gaussian with total variance sigma^2 (sigma^2/2 per part)
  std::complex<double> circular_normal(double sigma) {
    const double s = sigma * 0.7071067811865475244;
    return {s * normal(), s * normal()};
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace ffseq

#pragma once

// Counter-based random numbers: the k-th draw of stream s under seed is a pure
// function of (seed, s, k), so per-trial streams do not depend on scheduling.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace wgnls {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(splitmix64(splitmix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL))) {}

  std::uint64_t next_u64() { return splitmix64(key_ ^ splitmix64(counter_++)); }

  /// Uniform on (0, 1).
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  double normal() {
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    return r * std::cos(2.0 * std::numbers::pi * uniform());
  }

  /// Standard complex Gaussian, E|z|^2 = 1.
  std::complex<double> complex_normal() {
    const double r = std::sqrt(-std::log(uniform()));
    return std::polar(r, 2.0 * std::numbers::pi * uniform());
  }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace wgnls

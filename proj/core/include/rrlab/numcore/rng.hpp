#pragma once

#include <cmath>
#include <cstdint>

namespace rrlab::numcore {

// Splitmix64 generator. Integer state only, so sequences are identical on
// every platform; std::mt19937 + std::*_distribution are deliberately not
// used anywhere in the library.
class Rng {
public:
  explicit Rng(uint64_t seed = 0) : state_(seed) {}

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double next_in(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Uniform integer in [0, n). Multiply-shift map; bias is < n / 2^64.
  uint64_t next_below(uint64_t n) {
    return static_cast<uint64_t>((static_cast<__uint128_t>(next_u64()) * n) >> 64);
  }

  // Standard normal via Box-Muller. Consumes two uniforms per value so the
  // generator state stays a single u64 (no cached spare to serialize).
  double next_gaussian() {
    double u1 = 1.0 - next_double();  // (0, 1]
    double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Derive an independently seeded child stream.
  Rng split() { return Rng(next_u64()); }

  uint64_t state() const { return state_; }
  void set_state(uint64_t s) { state_ = s; }

private:
  uint64_t state_;
};

}  // namespace rrlab::numcore

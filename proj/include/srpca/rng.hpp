#ifndef SRPCA_RNG_HPP
#define SRPCA_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace srpca {

// Seeded random stream with pinned draw disciplines so that results are
// reproducible across platforms. The engine is std::mt19937_64 (bit-exact
// per the standard); the distributions are spelled out here instead of
// using std::*_distribution, whose streams are implementation-defined.
//
// Disciplines, in terms of raw 64-bit engine outputs x:
//   unit_open():    ((x >> 11) + 1) * 2^-53, a double in (0, 1]
//   normal():       Box-Muller cosine branch, two draws per variate:
//                   sqrt(-2 ln u1) * cos(2 pi u2)
//   uniform_below(n): unbiased rejection sampling, then x % n
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }

  double unit_open() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  double normal() {
    const double u1 = unit_open();
    const double u2 = unit_open();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  // Uniform integer in [0, n), n >= 1.
  std::uint64_t uniform_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t x = engine_();
      if (x >= threshold) return x % n;
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace srpca

#endif

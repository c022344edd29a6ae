#ifndef DDSBM_RNG_HPP
#define DDSBM_RNG_HPP

#include <cmath>
#include <cstdint>

namespace ddsbm {

// Counter-style generator: splitmix64 finalizer over a Weyl sequence.
// Chosen over the std engines because every draw must be bit-reproducible
// across platforms and standard libraries.  Streams obtained through
// derive_seed() are independent, so replicate pipelines can run in parallel
// without sharing state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
  }

  // Derived seed for substream `index`; double-mixed so derived streams do
  // not collide with the parent's own output sequence.
  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return mix64(mix64(seed) + (index + 1) * kGamma);
  }

  std::uint64_t next_u64() {
    state_ += kGamma;
    return mix64(state_);
  }

  // Uniform on the open interval (0,1); never returns 0 or 1, safe under log.
  double uniform01() {
    return static_cast<double>((next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in [0, m), m >= 1.  Fixed-point multiply keeps the draw
  // identical on every platform.
  std::uint32_t below(std::uint32_t m) {
    return static_cast<std::uint32_t>(
        (static_cast<unsigned __int128>(next_u64()) * m) >> 64);
  }

  // Box-Muller; two uniforms per call, no cached spare.
  double normal() {
    double u1 = uniform01();
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  // Marsaglia-Tsang; valid for shape >= 1, which is all the sampler needs
  // (Beta parameters are integer counts plus one).
  double gamma(double shape) {
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / (3.0 * std::sqrt(d));
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  // Boundary values are redrawn so the support stays strictly inside (0,1).
  double beta(double a, double b) {
    for (;;) {
      const double x = gamma(a);
      const double y = gamma(b);
      const double r = x / (x + y);
      if (r > 0.0 && r < 1.0) return r;
    }
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  std::uint64_t state_;
};

}  // namespace ddsbm

#endif  // DDSBM_RNG_HPP

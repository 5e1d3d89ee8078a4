#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <random>

namespace fsocast {

// Seeded random source. The distribution transforms live here instead of
// using <random> distribution classes so that a generated stream depends only
// on the mt19937_64 bit sequence, not on standard library internals. Every
// stochastic component of the simulator owns one of these.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Unbiased integer in [0, n); rejection sampled.
  std::uint64_t below(std::uint64_t n);

  // Standard normal (Box-Muller; one value per call).
  double normal();

 private:
  std::mt19937_64 engine_;
};

// Fill with iid standard normals. Bulk path works in single precision so the
// log/sin/cos evaluate vectorized, then widens; the value stream is a pure
// function of the generator state.
void fill_standard_normal(Eigen::Ref<Eigen::ArrayXXd> out, Rng& rng);
Eigen::ArrayXXd normal_raster(Eigen::Index rows, Eigen::Index cols, Rng& rng);

}  // namespace fsocast

#include "fsocast/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fsocast {

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
  const std::uint64_t reject = (0 - n) % n;  // 2^64 mod n
  for (;;) {
    const std::uint64_t r = engine_();
    if (r >= reject) return r % n;
  }
}

double Rng::normal() {
  const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void fill_standard_normal(Eigen::Ref<Eigen::ArrayXXd> out, Rng& rng) {
  if (out.outerStride() != out.rows())
    throw std::invalid_argument("fill_standard_normal: needs a contiguous array");
  const Eigen::Index n = out.size();
  const Eigen::Index pairs = (n + 1) / 2;
  static thread_local Eigen::ArrayXf u1, u2, radius, angle, z0, z1;
  u1.resize(pairs);
  u2.resize(pairs);
  for (Eigen::Index i = 0; i < pairs; ++i) {
    const std::uint64_t bits = rng.next_u64();
    u1[i] = 1.0f - static_cast<float>(bits >> 41) * 0x1.0p-23f;        // (0, 1]
    u2[i] = static_cast<float>((bits >> 9) & 0x7fffffu) * 0x1.0p-23f;  // [0, 1)
  }
  constexpr float kTwoPi = 6.28318530717958647692f;
  radius = (-2.0f * u1.log()).sqrt();
  angle = kTwoPi * u2;
  z0 = radius * angle.cos();
  z1 = radius * angle.sin();

  double* o = out.data();
  for (Eigen::Index i = 0; i < pairs; ++i) {
    o[2 * i] = static_cast<double>(z0[i]);
    if (2 * i + 1 < n) o[2 * i + 1] = static_cast<double>(z1[i]);
  }
}

Eigen::ArrayXXd normal_raster(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::ArrayXXd out(rows, cols);
  fill_standard_normal(out, rng);
  return out;
}

}  // namespace fsocast

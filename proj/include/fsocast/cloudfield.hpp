#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "fsocast/rng.hpp"

namespace fsocast {

struct CloudConfig {
  int nx = 600, ny = 600;          // raster size [px]; multiples of coarse_factor
  double pixel_size_m = 50.0;
  int coarse_factor = 30;          // blob-scale downsample coefficient, >= 2
  double wind_px_x = 1.0;          // drift [px/step]; fractional parts accumulate
  double wind_px_y = 1.0;
  double innovation = 0.01;        // fresh-noise fraction blended per step, [0, 1]
  double coverage_threshold = 0.125;  // applied to the unit-variance latent raster
  double blur_sigma_px = 2.0;
  int blur_halfwidth_px = 6;       // 0 = identity kernel
  double mean_thickness_km = 0.30; // target mean over cloudy pixels
  double layer_altitude_km = 8.0;  // [2, 10]
  std::uint64_t seed = 1;

  double extent_x_m() const { return nx * pixel_size_m; }
  double extent_y_m() const { return ny * pixel_size_m; }
  void validate() const;  // throws std::invalid_argument
};

struct ThicknessHistogram {
  std::vector<double> edges;    // bins + 1, [km]
  std::vector<double> density;  // bins, [1/km]; integrates to 1
};

// Evolving cloud-thickness raster. The latent field is the sum of a fine and
// a coarse (upsampled) Gaussian raster; each step wraps it along the wind,
// blends in fresh noise, renormalizes to unit variance, and derives the
// thickness raster by thresholding into a cloud mask, blurring, and rescaling
// so the cloudy-pixel mean matches the configured target. The world is a
// torus: wrapping, blurring and upsampling are all circular.
//
// Wind is tracked as a cumulative index offset rather than by moving storage,
// so a pure-advection step (innovation = 0) relabels pixel coordinates
// without touching any stored value.
class CloudGrid {
 public:
  explicit CloudGrid(const CloudConfig& cfg);

  // Wraps an existing thickness raster (replay and test hook); the latent
  // field is left equal to the raster and no derivation pass runs.
  static CloudGrid from_thickness(const CloudConfig& cfg, const Eigen::ArrayXXd& thickness_km);

  void step();

  // Bilinear sample of the thickness raster [km] at a point in the layer
  // plane, meters east/north of the grid center. The outermost half-pixel
  // band replicates edge values. Throws std::out_of_range outside the extent.
  double thickness_at(double x_m, double y_m) const;

  const CloudConfig& config() const { return cfg_; }
  long step_count() const { return step_count_; }
  double cloud_fraction() const;

  // Copies in the drifted (logical) frame.
  Eigen::ArrayXXd latent() const;
  Eigen::ArrayXXd thickness() const;

  // Empirical PDF of thickness over cloudy (thickness > 0) pixels.
  // Throws std::runtime_error on an all-clear raster.
  ThicknessHistogram thickness_histogram(int bins) const;

 private:
  CloudConfig cfg_;
  Rng rng_;
  Eigen::ArrayXXd noise_;      // latent field, storage frame
  Eigen::ArrayXXd thickness_;  // [km], storage frame
  long off_x_ = 0, off_y_ = 0; // logical (i,j) lives at storage ((i+off) mod n)
  double wind_rem_x_ = 0.0, wind_rem_y_ = 0.0;
  long step_count_ = 0;

  // step scratch, persistent so the per-second loop stays allocation-free
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> mask_;
  Eigen::ArrayXXd scratch_a_, scratch_b_, scratch_coarse_;
  std::vector<double> kernel_;
  // precomputed periodic bilinear upsample tables (node indices and weights)
  std::vector<int> up_x0_, up_x1_, up_y0_, up_y1_;
  std::vector<double> up_wx_, up_wy_;

  void fresh_noise_into(Eigen::ArrayXXd& out);
  void refresh_thickness();
  void materialize_into(const Eigen::ArrayXXd& storage, Eigen::ArrayXXd& out) const;
  Eigen::ArrayXXd materialize(const Eigen::ArrayXXd& storage) const;
};

// Normalized truncated Gaussian, taps -halfwidth..halfwidth. halfwidth 0
// yields the identity kernel {1}.
std::vector<double> gaussian_kernel(double sigma_px, int halfwidth_px);

// Separable circular convolution with the above kernel; exposed for the
// conservation property tests.
Eigen::ArrayXXd circular_gaussian_blur(const Eigen::ArrayXXd& in, double sigma_px,
                                       int halfwidth_px);

// Periodic bilinear upsample of a coarse raster to nx x ny; coarse node (a,b)
// maps to the center of its block of fine pixels.
Eigen::ArrayXXd upsample_bilinear_periodic(const Eigen::ArrayXXd& coarse, int nx, int ny);

// Raster frame dump, little-endian binary: "FCLD", u32 nx, u32 ny,
// f64 pixel_size_m, i64 step, then f32 thickness values in storage order
// (x fastest), drifted frame.
void write_raster_dump(const std::string& path, const CloudGrid& grid, long step);

}  // namespace fsocast

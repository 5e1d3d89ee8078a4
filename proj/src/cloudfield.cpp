#include "fsocast/cloudfield.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace fsocast {

namespace {

long wrap_index(long i, long n) {
  long r = i % n;
  if (r < 0) r += n;
  return r;
}

void normalize_unit(Eigen::ArrayXXd& z) {
  const double mean = z.mean();
  z -= mean;
  const double sd = std::sqrt(z.square().mean());
  if (sd > 0.0) z /= sd;
}

// Convolve along the first index of each column (contiguous in memory);
// each tap is a shifted vector accumulate split at the wrap seam.
void convolve_columns_into(const Eigen::ArrayXXd& in, const std::vector<double>& kernel,
                           Eigen::ArrayXXd& out) {
  const Eigen::Index n = in.rows();
  const Eigen::Index cols = in.cols();
  const Eigen::Index h = static_cast<Eigen::Index>(kernel.size() / 2);
  out.resize(n, cols);
  out.setZero();
  for (Eigen::Index j = 0; j < cols; ++j) {
    auto src = in.col(j);
    auto dst = out.col(j);
    for (Eigen::Index k = -h; k <= h; ++k) {
      const double g = kernel[static_cast<std::size_t>(k + h)];
      if (k >= 0) {
        dst.segment(k, n - k) += g * src.head(n - k);
        if (k > 0) dst.head(k) += g * src.tail(k);
      } else {
        dst.head(n + k) += g * src.segment(-k, n + k);
        dst.tail(-k) += g * src.head(-k);
      }
    }
  }
}

// Second separable pass: whole-column accumulates across wrapped columns.
void convolve_rows_into(const Eigen::ArrayXXd& in, const std::vector<double>& kernel,
                        Eigen::ArrayXXd& out) {
  const Eigen::Index cols = in.cols();
  const Eigen::Index h = static_cast<Eigen::Index>(kernel.size() / 2);
  out.resize(in.rows(), cols);
  out.setZero();
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index k = -h; k <= h; ++k)
      out.col(j) += kernel[static_cast<std::size_t>(k + h)] * in.col(wrap_index(j - k, cols));
}

}  // namespace

void CloudConfig::validate() const {
  if (nx < 2 || ny < 2) throw std::invalid_argument("cloud: grid must be at least 2x2");
  if (coarse_factor < 2) throw std::invalid_argument("cloud: coarse_factor must be >= 2");
  if (nx % coarse_factor != 0 || ny % coarse_factor != 0)
    throw std::invalid_argument("cloud: grid size must be a multiple of coarse_factor");
  if (!(pixel_size_m > 0.0)) throw std::invalid_argument("cloud: pixel_size_m must be > 0");
  if (!(innovation >= 0.0 && innovation <= 1.0))
    throw std::invalid_argument("cloud: innovation must be in [0, 1]");
  if (std::isnan(coverage_threshold)) throw std::invalid_argument("cloud: threshold is NaN");
  if (blur_halfwidth_px < 0) throw std::invalid_argument("cloud: negative blur halfwidth");
  if (blur_halfwidth_px > 0 && !(blur_sigma_px > 0.0))
    throw std::invalid_argument("cloud: blur_sigma_px must be > 0");
  if (2 * blur_halfwidth_px + 1 > nx || 2 * blur_halfwidth_px + 1 > ny)
    throw std::invalid_argument("cloud: blur kernel wider than the raster");
  if (!(mean_thickness_km > 0.0)) throw std::invalid_argument("cloud: mean_thickness_km must be > 0");
  if (!(layer_altitude_km >= 2.0 && layer_altitude_km <= 10.0))
    throw std::invalid_argument("cloud: layer altitude must be in [2, 10] km");
  if (!std::isfinite(wind_px_x) || !std::isfinite(wind_px_y))
    throw std::invalid_argument("cloud: wind must be finite");
}

std::vector<double> gaussian_kernel(double sigma_px, int halfwidth_px) {
  if (halfwidth_px < 0) throw std::invalid_argument("gaussian_kernel: negative halfwidth");
  if (halfwidth_px == 0) return {1.0};
  if (!(sigma_px > 0.0)) throw std::invalid_argument("gaussian_kernel: sigma must be > 0");
  std::vector<double> g(static_cast<std::size_t>(2 * halfwidth_px + 1));
  double sum = 0.0;
  for (int k = -halfwidth_px; k <= halfwidth_px; ++k) {
    const double t = k / sigma_px;
    g[static_cast<std::size_t>(k + halfwidth_px)] = std::exp(-0.5 * t * t);
    sum += g[static_cast<std::size_t>(k + halfwidth_px)];
  }
  for (double& v : g) v /= sum;
  return g;
}

Eigen::ArrayXXd circular_gaussian_blur(const Eigen::ArrayXXd& in, double sigma_px,
                                       int halfwidth_px) {
  if (halfwidth_px == 0) return in;
  const std::vector<double> g = gaussian_kernel(sigma_px, halfwidth_px);
  if (2 * halfwidth_px + 1 > in.rows() || 2 * halfwidth_px + 1 > in.cols())
    throw std::invalid_argument("circular_gaussian_blur: kernel wider than the raster");
  // separable: within columns first, then across columns as whole-column
  // accumulates (both passes stream contiguous memory)
  Eigen::ArrayXXd tmp, out;
  convolve_columns_into(in, g, tmp);
  convolve_rows_into(tmp, g, out);
  return out;
}

Eigen::ArrayXXd upsample_bilinear_periodic(const Eigen::ArrayXXd& coarse, int nx, int ny) {
  const int ncx = static_cast<int>(coarse.rows());
  const int ncy = static_cast<int>(coarse.cols());
  const double ux = static_cast<double>(nx) / ncx;
  const double uy = static_cast<double>(ny) / ncy;

  std::vector<int> a0(static_cast<std::size_t>(nx)), a1(static_cast<std::size_t>(nx));
  std::vector<double> wa(static_cast<std::size_t>(nx));
  for (int i = 0; i < nx; ++i) {
    const double fa = (i + 0.5) / ux - 0.5;
    const double fl = std::floor(fa);
    a0[static_cast<std::size_t>(i)] = static_cast<int>(wrap_index(static_cast<long>(fl), ncx));
    a1[static_cast<std::size_t>(i)] = static_cast<int>(wrap_index(static_cast<long>(fl) + 1, ncx));
    wa[static_cast<std::size_t>(i)] = fa - fl;
  }
  std::vector<int> b0(static_cast<std::size_t>(ny)), b1(static_cast<std::size_t>(ny));
  std::vector<double> wb(static_cast<std::size_t>(ny));
  for (int j = 0; j < ny; ++j) {
    const double fb = (j + 0.5) / uy - 0.5;
    const double fl = std::floor(fb);
    b0[static_cast<std::size_t>(j)] = static_cast<int>(wrap_index(static_cast<long>(fl), ncy));
    b1[static_cast<std::size_t>(j)] = static_cast<int>(wrap_index(static_cast<long>(fl) + 1, ncy));
    wb[static_cast<std::size_t>(j)] = fb - fl;
  }

  Eigen::ArrayXXd out(nx, ny);
  for (int j = 0; j < ny; ++j) {
    const double tb = wb[static_cast<std::size_t>(j)];
    const int jb0 = b0[static_cast<std::size_t>(j)], jb1 = b1[static_cast<std::size_t>(j)];
    for (int i = 0; i < nx; ++i) {
      const double ta = wa[static_cast<std::size_t>(i)];
      const int ia0 = a0[static_cast<std::size_t>(i)], ia1 = a1[static_cast<std::size_t>(i)];
      out(i, j) = (1.0 - ta) * (1.0 - tb) * coarse(ia0, jb0) + ta * (1.0 - tb) * coarse(ia1, jb0) +
                  (1.0 - ta) * tb * coarse(ia0, jb1) + ta * tb * coarse(ia1, jb1);
    }
  }
  return out;
}

CloudGrid::CloudGrid(const CloudConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {
  cfg_.validate();
  kernel_ = gaussian_kernel(cfg_.blur_sigma_px, cfg_.blur_halfwidth_px);

  // periodic bilinear upsample tables: coarse node a sits at fine coordinate
  // (a + 0.5) * factor - 0.5 along each axis
  const int ncx = cfg_.nx / cfg_.coarse_factor;
  const int ncy = cfg_.ny / cfg_.coarse_factor;
  const auto build_axis = [](int n, int nc, std::vector<int>& i0, std::vector<int>& i1,
                             std::vector<double>& w) {
    const double factor = static_cast<double>(n) / nc;
    i0.resize(static_cast<std::size_t>(n));
    i1.resize(static_cast<std::size_t>(n));
    w.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const double f = (i + 0.5) / factor - 0.5;
      const double fl = std::floor(f);
      i0[static_cast<std::size_t>(i)] = static_cast<int>(wrap_index(static_cast<long>(fl), nc));
      i1[static_cast<std::size_t>(i)] = static_cast<int>(wrap_index(static_cast<long>(fl) + 1, nc));
      w[static_cast<std::size_t>(i)] = f - fl;
    }
  };
  build_axis(cfg_.nx, ncx, up_x0_, up_x1_, up_wx_);
  build_axis(cfg_.ny, ncy, up_y0_, up_y1_, up_wy_);
  scratch_coarse_.resize(ncx, ncy);

  noise_.resize(cfg_.nx, cfg_.ny);
  fresh_noise_into(noise_);
  normalize_unit(noise_);
  refresh_thickness();
}

CloudGrid CloudGrid::from_thickness(const CloudConfig& cfg, const Eigen::ArrayXXd& thickness_km) {
  if (thickness_km.rows() != cfg.nx || thickness_km.cols() != cfg.ny)
    throw std::invalid_argument("from_thickness: raster shape does not match the config");
  CloudGrid g(cfg);
  g.noise_ = thickness_km;
  g.thickness_ = thickness_km;
  g.mask_ = thickness_km > 0.0;
  g.off_x_ = g.off_y_ = 0;
  return g;
}

void CloudGrid::fresh_noise_into(Eigen::ArrayXXd& out) {
  out.resize(cfg_.nx, cfg_.ny);
  fill_standard_normal(out, rng_);
  fill_standard_normal(scratch_coarse_, rng_);
  for (int j = 0; j < cfg_.ny; ++j) {
    const double tb = up_wy_[static_cast<std::size_t>(j)];
    const int jb0 = up_y0_[static_cast<std::size_t>(j)], jb1 = up_y1_[static_cast<std::size_t>(j)];
    for (int i = 0; i < cfg_.nx; ++i) {
      const double ta = up_wx_[static_cast<std::size_t>(i)];
      const int ia0 = up_x0_[static_cast<std::size_t>(i)], ia1 = up_x1_[static_cast<std::size_t>(i)];
      out(i, j) += (1.0 - ta) * (1.0 - tb) * scratch_coarse_(ia0, jb0) +
                   ta * (1.0 - tb) * scratch_coarse_(ia1, jb0) +
                   (1.0 - ta) * tb * scratch_coarse_(ia0, jb1) +
                   ta * tb * scratch_coarse_(ia1, jb1);
    }
  }
}

void CloudGrid::step() {
  // pixel-based wrap: integer drift applied now, fractional remainder carried
  wind_rem_x_ += cfg_.wind_px_x;
  wind_rem_y_ += cfg_.wind_px_y;
  const long sx = static_cast<long>(std::trunc(wind_rem_x_));
  const long sy = static_cast<long>(std::trunc(wind_rem_y_));
  wind_rem_x_ -= static_cast<double>(sx);
  wind_rem_y_ -= static_cast<double>(sy);
  off_x_ = wrap_index(off_x_ + sx, cfg_.nx);
  off_y_ = wrap_index(off_y_ + sy, cfg_.ny);
  ++step_count_;

  if (cfg_.innovation > 0.0) {
    materialize_into(noise_, scratch_a_);
    fresh_noise_into(scratch_b_);
    noise_ = (1.0 - cfg_.innovation) * scratch_a_ + cfg_.innovation * scratch_b_;
    normalize_unit(noise_);
    off_x_ = off_y_ = 0;
    refresh_thickness();
  }
  // innovation == 0: pure advection. The offset relabeling is the whole step;
  // threshold/blur/normalize all commute with the circular shift, so the
  // stored thickness stays valid pixel-for-pixel.
}

void CloudGrid::refresh_thickness() {
  mask_ = noise_ > cfg_.coverage_threshold;
  scratch_a_ = mask_.select(noise_, 0.0);
  if (cfg_.blur_halfwidth_px > 0) {
    convolve_columns_into(scratch_a_, kernel_, scratch_b_);
    convolve_rows_into(scratch_b_, kernel_, scratch_a_);
  }
  // thickness lives on cloudy pixels only
  thickness_ = mask_.select(scratch_a_, 0.0);
  const long cloudy = mask_.count();
  const double total = thickness_.sum();
  const double scale =
      (cloudy > 0 && total != 0.0) ? cfg_.mean_thickness_km * static_cast<double>(cloudy) / total
                                   : 0.0;
  thickness_ = (thickness_ * scale).max(0.0);
}

void CloudGrid::materialize_into(const Eigen::ArrayXXd& s, Eigen::ArrayXXd& out) const {
  const int nx = cfg_.nx, ny = cfg_.ny;
  const int ox = static_cast<int>(off_x_), oy = static_cast<int>(off_y_);
  out.resize(nx, ny);
  for (int j = 0; j < ny; ++j) {
    const int js = static_cast<int>(wrap_index(j + oy, ny));
    const double* src = s.data() + static_cast<std::size_t>(js) * nx;
    double* dst = out.data() + static_cast<std::size_t>(j) * nx;
    const int head = nx - ox;  // logical i in [0, head) <- storage [ox, nx)
    std::memcpy(dst, src + ox, sizeof(double) * static_cast<std::size_t>(head));
    std::memcpy(dst + head, src, sizeof(double) * static_cast<std::size_t>(ox));
  }
}

Eigen::ArrayXXd CloudGrid::materialize(const Eigen::ArrayXXd& s) const {
  Eigen::ArrayXXd out;
  materialize_into(s, out);
  return out;
}

double CloudGrid::thickness_at(double x_m, double y_m) const {
  const double hx = 0.5 * cfg_.extent_x_m();
  const double hy = 0.5 * cfg_.extent_y_m();
  if (!(x_m >= -hx && x_m <= hx && y_m >= -hy && y_m <= hy))
    throw std::out_of_range("thickness_at: point outside the cloud grid extent");

  // fractional pixel coordinates; pixel i center sits at (i - (n-1)/2) * pixel
  double px = x_m / cfg_.pixel_size_m + 0.5 * (cfg_.nx - 1);
  double py = y_m / cfg_.pixel_size_m + 0.5 * (cfg_.ny - 1);
  px = std::clamp(px, 0.0, static_cast<double>(cfg_.nx - 1));
  py = std::clamp(py, 0.0, static_cast<double>(cfg_.ny - 1));
  const int i0 = std::min(static_cast<int>(px), cfg_.nx - 2);
  const int j0 = std::min(static_cast<int>(py), cfg_.ny - 2);
  const double tx = px - i0;
  const double ty = py - j0;

  const auto at = [&](int i, int j) {
    return thickness_(wrap_index(i + off_x_, cfg_.nx), wrap_index(j + off_y_, cfg_.ny));
  };
  return (1.0 - tx) * (1.0 - ty) * at(i0, j0) + tx * (1.0 - ty) * at(i0 + 1, j0) +
         (1.0 - tx) * ty * at(i0, j0 + 1) + tx * ty * at(i0 + 1, j0 + 1);
}

double CloudGrid::cloud_fraction() const {
  return static_cast<double>(mask_.count()) / static_cast<double>(noise_.size());
}

Eigen::ArrayXXd CloudGrid::latent() const { return materialize(noise_); }

Eigen::ArrayXXd CloudGrid::thickness() const { return materialize(thickness_); }

void write_raster_dump(const std::string& path, const CloudGrid& grid, long step) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open raster dump " + path);
  const char magic[4] = {'F', 'C', 'L', 'D'};
  os.write(magic, 4);
  const std::uint32_t nx = static_cast<std::uint32_t>(grid.config().nx);
  const std::uint32_t ny = static_cast<std::uint32_t>(grid.config().ny);
  const double pixel = grid.config().pixel_size_m;
  const std::int64_t st = step;
  os.write(reinterpret_cast<const char*>(&nx), 4);
  os.write(reinterpret_cast<const char*>(&ny), 4);
  os.write(reinterpret_cast<const char*>(&pixel), 8);
  os.write(reinterpret_cast<const char*>(&st), 8);
  const Eigen::ArrayXXf tf = grid.thickness().cast<float>();
  os.write(reinterpret_cast<const char*>(tf.data()),
           static_cast<std::streamsize>(sizeof(float) * static_cast<std::size_t>(tf.size())));
  if (!os) throw std::runtime_error("raster dump failed: " + path);
}

ThicknessHistogram CloudGrid::thickness_histogram(int bins) const {
  if (bins < 1) throw std::invalid_argument("thickness_histogram: bins must be >= 1");
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(thickness_.size()));
  const double* p = thickness_.data();
  for (Eigen::Index k = 0; k < thickness_.size(); ++k)
    if (p[k] > 0.0) values.push_back(p[k]);
  if (values.empty()) throw std::runtime_error("thickness_histogram: all-clear raster");

  const double top = *std::max_element(values.begin(), values.end());
  const double width = top / bins;
  ThicknessHistogram h;
  h.edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int b = 0; b <= bins; ++b) h.edges[static_cast<std::size_t>(b)] = width * b;
  std::vector<long> counts(static_cast<std::size_t>(bins), 0);
  for (double v : values) {
    int b = static_cast<int>(v / width);
    if (b >= bins) b = bins - 1;  // top edge closes the last bin
    ++counts[static_cast<std::size_t>(b)];
  }
  h.density.resize(static_cast<std::size_t>(bins));
  const double norm = static_cast<double>(values.size()) * width;
  for (int b = 0; b < bins; ++b)
    h.density[static_cast<std::size_t>(b)] = static_cast<double>(counts[static_cast<std::size_t>(b)]) / norm;
  return h;
}

}  // namespace fsocast

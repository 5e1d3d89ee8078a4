#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "fsocast/rng.hpp"

namespace fsocast {

// Which past samples feed the network: one RF feature per (beacon, lookback)
// pair, plus range/azimuth/elevation at the most recent lookback instant and
// the azimuth/elevation increments between the two most recent instants.
struct FeatureLayout {
  int beacon_count = 0;
  std::vector<int> lookback_s;  // ascending, unique, positive [s]

  int feature_count() const { return beacon_count * static_cast<int>(lookback_s.size()) + 5; }
  void validate() const;  // throws std::invalid_argument
};

struct FeatureVector {
  Eigen::VectorXd rf_db;  // beacon-major: index b * lookbacks + k
  double range_km = 0.0;
  double azimuth_rad = 0.0;
  double elevation_rad = 0.0;
  double d_azimuth_rad = 0.0;
  double d_elevation_rad = 0.0;

  Eigen::VectorXd flat() const;  // [rf..., R, AZ, EL, dAZ, dEL]
};

// One per-second view of a satellite from the ground segment.
struct LinkObservation {
  double range_km = 0.0;
  double azimuth_rad = 0.0;
  double elevation_rad = 0.0;
  std::vector<double> rf_db;  // per beacon, site order
};

// Fixed-span ring of per-second observations for one satellite. Seconds with
// no entry (satellite below the elevation gate then) read back as missing.
class ObservationRing {
 public:
  explicit ObservationRing(int span_s);
  void record(long t_s, LinkObservation obs);
  const LinkObservation* at(long t_s) const;  // nullptr when missing

 private:
  struct Slot {
    long t = -1;
    LinkObservation obs;
  };
  std::vector<Slot> slots_;
};

// nullopt when any required lookback instant has no observation.
std::optional<FeatureVector> assemble_features(const ObservationRing& history,
                                               const FeatureLayout& layout, long t_s);

struct ExperienceSample {
  Eigen::VectorXd features;
  double label_db = 0.0;  // detector-capped FSO attenuation at sample time
  long time_s = 0;
  int sat_id = 0;
};

// Bounded FIFO; pushing at capacity evicts the oldest sample.
class ExperienceBuffer {
 public:
  explicit ExperienceBuffer(std::size_t capacity);
  void push(ExperienceSample s);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  const ExperienceSample& operator[](std::size_t i) const { return items_[i]; }  // 0 = oldest

 private:
  std::size_t capacity_;
  std::deque<ExperienceSample> items_;
};

// Uniform sample without replacement; deterministic per rng state.
std::vector<std::size_t> sample_batch(const ExperienceBuffer& buffer, std::size_t batch_size,
                                      Rng& rng);

// Standardization statistics over the buffer (population moments;
// near-constant columns fall back to unit scale). Labels are standardized
// with the same running statistics: the network trains against z-scored
// attenuations and predictions map back through label_mean/label_stddev.
struct FeatureStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;
  double label_mean = 0.0;
  double label_stddev = 1.0;

  static FeatureStats identity(int dim);
  static FeatureStats from_buffer(const ExperienceBuffer& buffer);
  Eigen::VectorXd standardize(const Eigen::VectorXd& x) const;
  double standardize_label(double label_db) const { return (label_db - label_mean) / label_stddev; }
  double destandardize_label(double z) const { return z * label_stddev + label_mean; }
};

// Fully connected network: rectified-linear hidden layers, linear output.
// Scalar is float for the production model and double where tests need
// finite-difference-grade arithmetic.
template <typename Scalar>
struct Mlp {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

  std::vector<Matrix> weights;  // per layer, [out x in]
  std::vector<Vector> biases;

  static Mlp zeros(const std::vector<int>& layer_sizes);
  // Fan-in scaled uniform init U(-sqrt(3/fan_in), sqrt(3/fan_in)), biases 0.
  static Mlp fan_in_uniform(const std::vector<int>& layer_sizes, Rng& rng);

  int input_size() const;
  std::vector<int> layer_sizes() const;
  Scalar forward(const Vector& x) const;
  RowVector forward_batch(const Matrix& x) const;  // features per column
};

// {feature_count, 350 x5, 1}
std::vector<int> default_layer_sizes(int feature_count);

// One averaged-gradient step on the squared-error loss over the batch
// (features per column, already standardized). Returns the pre-update batch
// mean loss. Throws std::runtime_error on non-finite loss or gradients.
template <typename Scalar>
Scalar sgd_step(Mlp<Scalar>& model, const typename Mlp<Scalar>::Matrix& features,
                const typename Mlp<Scalar>::RowVector& labels, Scalar learning_rate);

// Standardize, run the network, clamp to [0, cap_db] for reporting.
double predict_fso(const Mlp<float>& model, const FeatureStats& stats,
                   const Eigen::VectorXd& features, double cap_db);

struct TrainingConfig {
  std::size_t buffer_capacity = 5000;
  std::size_t batch_size = 500;
  double learning_rate = 1e-2;
  std::uint64_t seed = 3;
};

}  // namespace fsocast

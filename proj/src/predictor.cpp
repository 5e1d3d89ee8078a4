#include "fsocast/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "fsocast/orbits.hpp"

namespace fsocast {

void FeatureLayout::validate() const {
  if (beacon_count < 1) throw std::invalid_argument("feature layout: need at least one beacon");
  if (lookback_s.empty()) throw std::invalid_argument("feature layout: empty lookback set");
  for (std::size_t k = 0; k < lookback_s.size(); ++k) {
    if (lookback_s[k] < 1) throw std::invalid_argument("feature layout: lookbacks must be >= 1 s");
    if (k > 0 && lookback_s[k] <= lookback_s[k - 1])
      throw std::invalid_argument("feature layout: lookbacks must be strictly ascending");
  }
}

Eigen::VectorXd FeatureVector::flat() const {
  Eigen::VectorXd out(rf_db.size() + 5);
  out.head(rf_db.size()) = rf_db;
  out[rf_db.size() + 0] = range_km;
  out[rf_db.size() + 1] = azimuth_rad;
  out[rf_db.size() + 2] = elevation_rad;
  out[rf_db.size() + 3] = d_azimuth_rad;
  out[rf_db.size() + 4] = d_elevation_rad;
  return out;
}

ObservationRing::ObservationRing(int span_s) {
  if (span_s < 1) throw std::invalid_argument("ObservationRing: span must be >= 1");
  slots_.resize(static_cast<std::size_t>(span_s));
}

void ObservationRing::record(long t_s, LinkObservation obs) {
  Slot& s = slots_[static_cast<std::size_t>(t_s % static_cast<long>(slots_.size()))];
  s.t = t_s;
  s.obs = std::move(obs);
}

const LinkObservation* ObservationRing::at(long t_s) const {
  if (t_s < 0) return nullptr;
  const Slot& s = slots_[static_cast<std::size_t>(t_s % static_cast<long>(slots_.size()))];
  return s.t == t_s ? &s.obs : nullptr;
}

std::optional<FeatureVector> assemble_features(const ObservationRing& history,
                                               const FeatureLayout& layout, long t_s) {
  const int m = static_cast<int>(layout.lookback_s.size());
  FeatureVector fv;
  fv.rf_db.resize(static_cast<Eigen::Index>(layout.beacon_count) * m);

  const LinkObservation* newest = nullptr;
  const LinkObservation* second = nullptr;
  for (int k = 0; k < m; ++k) {
    const LinkObservation* o = history.at(t_s - layout.lookback_s[static_cast<std::size_t>(k)]);
    if (o == nullptr) return std::nullopt;
    if (static_cast<int>(o->rf_db.size()) != layout.beacon_count)
      throw std::invalid_argument("assemble_features: beacon count mismatch");
    for (int b = 0; b < layout.beacon_count; ++b)
      fv.rf_db[static_cast<Eigen::Index>(b) * m + k] = o->rf_db[static_cast<std::size_t>(b)];
    if (k == 0) newest = o;
    if (k == 1) second = o;
  }

  fv.range_km = newest->range_km;
  fv.azimuth_rad = newest->azimuth_rad;
  fv.elevation_rad = newest->elevation_rad;
  if (second != nullptr) {  // single-lookback layouts carry zero increments
    fv.d_azimuth_rad = wrap_to_pi(newest->azimuth_rad - second->azimuth_rad);
    fv.d_elevation_rad = newest->elevation_rad - second->elevation_rad;
  }
  return fv;
}

ExperienceBuffer::ExperienceBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("ExperienceBuffer: zero capacity");
}

void ExperienceBuffer::push(ExperienceSample s) {
  items_.push_back(std::move(s));
  if (items_.size() > capacity_) items_.pop_front();
}

std::vector<std::size_t> sample_batch(const ExperienceBuffer& buffer, std::size_t batch_size,
                                      Rng& rng) {
  if (batch_size == 0) throw std::invalid_argument("sample_batch: empty batch");
  if (batch_size > buffer.size()) throw std::invalid_argument("sample_batch: not enough samples");
  std::vector<std::size_t> idx(buffer.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < batch_size; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(idx.size() - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(batch_size);
  return idx;
}

FeatureStats FeatureStats::identity(int dim) {
  FeatureStats s;
  s.mean = Eigen::VectorXd::Zero(dim);
  s.stddev = Eigen::VectorXd::Ones(dim);
  return s;
}

FeatureStats FeatureStats::from_buffer(const ExperienceBuffer& buffer) {
  if (buffer.size() == 0) throw std::invalid_argument("FeatureStats: empty buffer");
  const Eigen::Index dim = buffer[0].features.size();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd sumsq = Eigen::VectorXd::Zero(dim);
  double lsum = 0.0, lsumsq = 0.0;
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    sum += buffer[i].features;
    sumsq += buffer[i].features.cwiseAbs2();
    lsum += buffer[i].label_db;
    lsumsq += buffer[i].label_db * buffer[i].label_db;
  }
  const double n = static_cast<double>(buffer.size());
  FeatureStats s;
  s.mean = sum / n;
  s.stddev = (sumsq / n - s.mean.cwiseAbs2()).cwiseMax(0.0).cwiseSqrt();
  for (Eigen::Index k = 0; k < dim; ++k)
    if (s.stddev[k] < 1e-12) s.stddev[k] = 1.0;
  s.label_mean = lsum / n;
  s.label_stddev = std::sqrt(std::max(0.0, lsumsq / n - s.label_mean * s.label_mean));
  if (s.label_stddev < 1e-12) s.label_stddev = 1.0;
  return s;
}

Eigen::VectorXd FeatureStats::standardize(const Eigen::VectorXd& x) const {
  return (x - mean).cwiseQuotient(stddev);
}

std::vector<int> default_layer_sizes(int feature_count) {
  return {feature_count, 350, 350, 350, 350, 350, 1};
}

namespace {

void check_layer_sizes(const std::vector<int>& sizes) {
  if (sizes.size() < 2) throw std::invalid_argument("Mlp: need input and output sizes");
  for (int s : sizes)
    if (s < 1) throw std::invalid_argument("Mlp: layer sizes must be positive");
}

}  // namespace

template <typename Scalar>
Mlp<Scalar> Mlp<Scalar>::zeros(const std::vector<int>& sizes) {
  check_layer_sizes(sizes);
  Mlp m;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    m.weights.push_back(Matrix::Zero(sizes[l + 1], sizes[l]));
    m.biases.push_back(Vector::Zero(sizes[l + 1]));
  }
  return m;
}

template <typename Scalar>
Mlp<Scalar> Mlp<Scalar>::fan_in_uniform(const std::vector<int>& sizes, Rng& rng) {
  check_layer_sizes(sizes);
  Mlp m;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    // unit-variance fan-in scaling; the rectifier then halves the activation
    // energy per layer, which keeps the output-layer curvature low enough for
    // the default step size at this depth and width
    const double limit = std::sqrt(3.0 / sizes[l]);
    Matrix w(sizes[l + 1], sizes[l]);
    Scalar* p = w.data();
    for (Eigen::Index k = 0; k < w.size(); ++k)
      p[k] = static_cast<Scalar>(rng.uniform(-limit, limit));
    m.weights.push_back(std::move(w));
    m.biases.push_back(Vector::Zero(sizes[l + 1]));
  }
  return m;
}

template <typename Scalar>
int Mlp<Scalar>::input_size() const {
  return static_cast<int>(weights.front().cols());
}

template <typename Scalar>
std::vector<int> Mlp<Scalar>::layer_sizes() const {
  std::vector<int> sizes{input_size()};
  for (const Matrix& w : weights) sizes.push_back(static_cast<int>(w.rows()));
  return sizes;
}

template <typename Scalar>
Scalar Mlp<Scalar>::forward(const Vector& x) const {
  if (x.size() != input_size()) throw std::invalid_argument("Mlp::forward: dimension mismatch");
  Vector a = x;
  for (std::size_t l = 0; l + 1 < weights.size(); ++l)
    a = ((weights[l] * a + biases[l]).array().max(Scalar(0))).matrix();
  return (weights.back() * a + biases.back())(0);
}

template <typename Scalar>
typename Mlp<Scalar>::RowVector Mlp<Scalar>::forward_batch(const Matrix& x) const {
  if (x.rows() != input_size())
    throw std::invalid_argument("Mlp::forward_batch: dimension mismatch");
  Matrix a = x;
  for (std::size_t l = 0; l + 1 < weights.size(); ++l)
    a = (((weights[l] * a).colwise() + biases[l]).array().max(Scalar(0))).matrix();
  return ((weights.back() * a).colwise() + biases.back()).row(0);
}

template <typename Scalar>
Scalar sgd_step(Mlp<Scalar>& model, const typename Mlp<Scalar>::Matrix& features,
                const typename Mlp<Scalar>::RowVector& labels, Scalar learning_rate) {
  using Matrix = typename Mlp<Scalar>::Matrix;
  using Vector = typename Mlp<Scalar>::Vector;
  using RowVector = typename Mlp<Scalar>::RowVector;

  const Eigen::Index n = features.cols();
  if (n == 0) throw std::invalid_argument("sgd_step: empty batch");
  if (labels.size() != n) throw std::invalid_argument("sgd_step: label count mismatch");
  if (features.rows() != model.input_size())
    throw std::invalid_argument("sgd_step: feature dimension mismatch");

  const std::size_t depth = model.weights.size();

  // activation and delta storage persists across steps (sizes are stable
  // within a run); the batch GEMM operands are large enough that per-step
  // allocation would dominate
  struct Workspace {
    std::vector<Matrix> acts;
    std::vector<Matrix> deltas;
  };
  static thread_local Workspace ws;
  ws.acts.resize(depth);
  ws.deltas.resize(depth);

  // forward, keeping post-activation outputs for backprop; acts[l] holds the
  // output of layer l (the input itself is read from `features`)
  const auto act_in = [&](std::size_t l) -> const Matrix& {
    return l == 0 ? features : ws.acts[l - 1];
  };
  for (std::size_t l = 0; l < depth; ++l) {
    ws.acts[l].resize(model.weights[l].rows(), n);
    ws.acts[l].noalias() = model.weights[l] * act_in(l);
    ws.acts[l].colwise() += model.biases[l];
    if (l + 1 < depth) ws.acts[l] = ws.acts[l].cwiseMax(Scalar(0));
  }

  const RowVector err = ws.acts[depth - 1].row(0) - labels;
  const Scalar loss = err.squaredNorm() / static_cast<Scalar>(n);
  if (!std::isfinite(static_cast<double>(loss))) {
    std::ostringstream msg;
    msg << "sgd_step: non-finite batch loss (" << static_cast<double>(loss) << ")";
    throw std::runtime_error(msg.str());
  }

  // d(mean loss)/d(output); the 1/n of the batch average folds in here
  ws.deltas[depth - 1].resize(1, n);
  ws.deltas[depth - 1].noalias() = (Scalar(2) / static_cast<Scalar>(n)) * err;
  for (std::size_t l = depth; l-- > 0;) {
    const Matrix& delta = ws.deltas[l];
    const Vector grad_b = delta.rowwise().sum();
    if (l > 0) {
      // propagate through the rectifier slope before touching weights[l]
      ws.deltas[l - 1].resize(model.weights[l].cols(), n);
      ws.deltas[l - 1].noalias() = model.weights[l].transpose() * delta;
      ws.deltas[l - 1].array() *= (ws.acts[l - 1].array() > Scalar(0)).template cast<Scalar>();
    }
    model.weights[l].noalias() -= learning_rate * (delta * act_in(l).transpose());
    model.biases[l] -= learning_rate * grad_b;
    if (!model.weights[l].allFinite() || !model.biases[l].allFinite())
      throw std::runtime_error("sgd_step: non-finite gradient at layer " + std::to_string(l));
  }
  return loss;
}

double predict_fso(const Mlp<float>& model, const FeatureStats& stats,
                   const Eigen::VectorXd& features, double cap_db) {
  const Eigen::VectorXd z = stats.standardize(features);
  const double raw = stats.destandardize_label(static_cast<double>(model.forward(z.cast<float>())));
  return std::clamp(raw, 0.0, cap_db);
}

template struct Mlp<float>;
template struct Mlp<double>;
template float sgd_step<float>(Mlp<float>&, const Mlp<float>::Matrix&, const Mlp<float>::RowVector&,
                               float);
template double sgd_step<double>(Mlp<double>&, const Mlp<double>::Matrix&,
                                 const Mlp<double>::RowVector&, double);

}  // namespace fsocast

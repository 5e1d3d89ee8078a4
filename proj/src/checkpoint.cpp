#include "fsocast/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace fsocast {

namespace {

constexpr char kMagic[4] = {'F', 'S', 'O', 'M'};
constexpr std::uint8_t kVersion = 1;

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("checkpoint: truncated file");
  return v;
}

template <typename T>
void put_array(std::ostream& os, const T* data, std::size_t n) {
  os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(T)));
}

template <typename T>
void get_array(std::istream& is, T* data, std::size_t n) {
  is.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * sizeof(T)));
  if (!is) throw std::runtime_error("checkpoint: truncated file");
}

}  // namespace

void save_checkpoint(const std::string& path, const ModelCheckpoint& ckpt) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("checkpoint: cannot open " + path + " for writing");

  os.write(kMagic, sizeof(kMagic));
  put(os, kVersion);

  put(os, static_cast<std::uint32_t>(ckpt.layout.beacon_count));
  put(os, static_cast<std::uint32_t>(ckpt.layout.lookback_s.size()));
  for (int tau : ckpt.layout.lookback_s) put(os, static_cast<std::int32_t>(tau));

  const std::vector<int> sizes = ckpt.model.layer_sizes();
  put(os, static_cast<std::uint32_t>(sizes.size()));
  for (int s : sizes) put(os, static_cast<std::uint32_t>(s));

  put_array(os, ckpt.stats.mean.data(), static_cast<std::size_t>(ckpt.stats.mean.size()));
  put_array(os, ckpt.stats.stddev.data(), static_cast<std::size_t>(ckpt.stats.stddev.size()));

  for (std::size_t l = 0; l < ckpt.model.weights.size(); ++l) {
    put_array(os, ckpt.model.weights[l].data(),
              static_cast<std::size_t>(ckpt.model.weights[l].size()));
    put_array(os, ckpt.model.biases[l].data(),
              static_cast<std::size_t>(ckpt.model.biases[l].size()));
  }
  if (!os) throw std::runtime_error("checkpoint: write failed for " + path);
}

ModelCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot open " + path);

  char magic[4];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("checkpoint: bad magic in " + path);
  if (get<std::uint8_t>(is) != kVersion)
    throw std::runtime_error("checkpoint: unsupported version in " + path);

  ModelCheckpoint ckpt;
  ckpt.layout.beacon_count = static_cast<int>(get<std::uint32_t>(is));
  const auto taus = get<std::uint32_t>(is);
  ckpt.layout.lookback_s.resize(taus);
  for (std::uint32_t k = 0; k < taus; ++k)
    ckpt.layout.lookback_s[k] = static_cast<int>(get<std::int32_t>(is));
  ckpt.layout.validate();

  const auto n_sizes = get<std::uint32_t>(is);
  std::vector<int> sizes(n_sizes);
  for (std::uint32_t k = 0; k < n_sizes; ++k) sizes[k] = static_cast<int>(get<std::uint32_t>(is));
  if (sizes.empty() || sizes.front() != ckpt.layout.feature_count())
    throw std::runtime_error("checkpoint: layout and network sizes disagree");

  const int dim = sizes.front();
  ckpt.stats.mean.resize(dim);
  ckpt.stats.stddev.resize(dim);
  get_array(is, ckpt.stats.mean.data(), static_cast<std::size_t>(dim));
  get_array(is, ckpt.stats.stddev.data(), static_cast<std::size_t>(dim));

  ckpt.model = Mlp<float>::zeros(sizes);
  for (std::size_t l = 0; l < ckpt.model.weights.size(); ++l) {
    get_array(is, ckpt.model.weights[l].data(),
              static_cast<std::size_t>(ckpt.model.weights[l].size()));
    get_array(is, ckpt.model.biases[l].data(),
              static_cast<std::size_t>(ckpt.model.biases[l].size()));
  }
  return ckpt;
}

}  // namespace fsocast

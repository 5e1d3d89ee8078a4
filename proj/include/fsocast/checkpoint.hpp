#pragma once

#include <string>

#include "fsocast/predictor.hpp"

namespace fsocast {

// Serialized predictor state: network parameters plus the feature layout and
// the standardization statistics the parameters were trained against.
struct ModelCheckpoint {
  FeatureLayout layout;
  FeatureStats stats;
  Mlp<float> model;
};

// Binary, little-endian:
//   magic "FSOM", u8 version (1)
//   u32 beacon_count, u32 lookback count, i32 lookbacks[]
//   u32 layer-size count, u32 sizes[]
//   f64 mean[feature_count], f64 stddev[feature_count]
//   per layer: f32 weights (column-major, out x in), f32 biases
void save_checkpoint(const std::string& path, const ModelCheckpoint& ckpt);
ModelCheckpoint load_checkpoint(const std::string& path);

}  // namespace fsocast

#pragma once

#include <cstdint>
#include <istream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fsocast/channel.hpp"
#include "fsocast/cloudfield.hpp"
#include "fsocast/predictor.hpp"

namespace fsocast {

// Invalid scenario input (file syntax, unknown keys, out-of-range values).
// The CLI maps this to exit code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EvalConfig {
  double threshold_db = 30.0;
  long sample_count = 5000;
  long start_s = 30000;
};

struct OutputConfig {
  bool write_trace = true;
  bool save_model = false;
  long cloud_raster_every_s = 0;  // 0 = no raster dumps
};

// Full description of one experiment. Scenario files are flat `key = value`
// text with dotted keys; see key_documentation() for every key and default.
struct ScenarioConfig {
  std::string name = "scenario";

  int sat_count = 300;
  double altitude_min_km = 400.0;
  double altitude_max_km = 2000.0;
  std::uint64_t constellation_seed = 1;

  double station_lat_deg = 0.0;
  double station_lon_deg = 0.0;

  CloudConfig cloud;  // cloud.seed defaults to 2 here

  int beacon_count = 16;
  double beacon_radius_m = 250.0;

  // Empty = derive from beacon_radius_m (250/500/750/1000 m presets).
  std::vector<int> lookback_s;

  double min_elevation_deg = 30.0;
  long duration_s = 40000;

  BandCoefficients band;
  double rf_noise_stddev_db = 0.0;
  std::uint64_t noise_seed = 4;

  TrainingConfig training;
  EvalConfig eval;
  OutputConfig output;

  ScenarioConfig() { cloud.seed = 2; }

  static ScenarioConfig from_file(const std::string& path);
  static ScenarioConfig parse(std::istream& in, const std::string& name_hint);

  // Derives the four rng streams from one base seed (base, base+1, ...).
  void apply_seed_override(std::uint64_t base_seed);

  void validate() const;  // throws ConfigError

  // lookback_s with the per-radius default applied.
  std::vector<int> resolved_lookback_s() const;
  FeatureLayout feature_layout() const;

  // Canonically ordered key/value echo of every setting.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

// Lookback presets for the standard ring radii; throws ConfigError for any
// other radius (those need an explicit features.lookback_s).
std::vector<int> default_lookback_for_radius(double radius_m);

// One "key -- default -- meaning" line per scenario key, for --help output
// and the README.
std::string key_documentation();

// Shortest round-trip decimal formatting (used anywhere a double must be
// reproduced exactly from text).
std::string format_double(double v);
double parse_double(const std::string& s);  // strict; throws ConfigError

}  // namespace fsocast

#include "fsocast/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <climits>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

namespace fsocast {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last)
    throw ConfigError("not a number: '" + s + "'");
  return v;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

long parse_long(const std::string& s) {
  long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw ConfigError("not an integer: '" + s + "'");
  return v;
}

int parse_int(const std::string& s) {
  const long v = parse_long(s);
  if (v < INT_MIN || v > INT_MAX) throw ConfigError("integer out of range: '" + s + "'");
  return static_cast<int>(v);
}

std::uint64_t parse_seed(const std::string& s) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw ConfigError("not a seed value: '" + s + "'");
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError("not a boolean: '" + s + "'");
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("empty entry in list: '" + s + "'");
    out.push_back(parse_int(item));
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) s += ",";
    s += std::to_string(v[i]);
  }
  return s;
}

void apply_key(ScenarioConfig& c, const std::string& key, const std::string& value) {
  if (key == "scenario.name") c.name = value;
  else if (key == "constellation.count") c.sat_count = parse_int(value);
  else if (key == "constellation.altitude_min_km") c.altitude_min_km = parse_double(value);
  else if (key == "constellation.altitude_max_km") c.altitude_max_km = parse_double(value);
  else if (key == "constellation.seed") c.constellation_seed = parse_seed(value);
  else if (key == "station.lat_deg") c.station_lat_deg = parse_double(value);
  else if (key == "station.lon_deg") c.station_lon_deg = parse_double(value);
  else if (key == "cloud.nx") c.cloud.nx = parse_int(value);
  else if (key == "cloud.ny") c.cloud.ny = parse_int(value);
  else if (key == "cloud.pixel_size_m") c.cloud.pixel_size_m = parse_double(value);
  else if (key == "cloud.coarse_factor") c.cloud.coarse_factor = parse_int(value);
  else if (key == "cloud.wind_px_x") c.cloud.wind_px_x = parse_double(value);
  else if (key == "cloud.wind_px_y") c.cloud.wind_px_y = parse_double(value);
  else if (key == "cloud.innovation") c.cloud.innovation = parse_double(value);
  else if (key == "cloud.coverage_threshold") c.cloud.coverage_threshold = parse_double(value);
  else if (key == "cloud.blur_sigma_px") c.cloud.blur_sigma_px = parse_double(value);
  else if (key == "cloud.blur_halfwidth_px") c.cloud.blur_halfwidth_px = parse_int(value);
  else if (key == "cloud.mean_thickness_km") c.cloud.mean_thickness_km = parse_double(value);
  else if (key == "cloud.altitude_km") c.cloud.layer_altitude_km = parse_double(value);
  else if (key == "cloud.seed") c.cloud.seed = parse_seed(value);
  else if (key == "beacons.count") c.beacon_count = parse_int(value);
  else if (key == "beacons.radius_m") c.beacon_radius_m = parse_double(value);
  else if (key == "features.lookback_s") c.lookback_s = parse_int_list(value);
  else if (key == "sim.min_elevation_deg") c.min_elevation_deg = parse_double(value);
  else if (key == "sim.duration_s") c.duration_s = parse_long(value);
  else if (key == "band.rf_db_per_km") c.band.rf_db_per_km = parse_double(value);
  else if (key == "band.fso_db_per_km") c.band.fso_db_per_km = parse_double(value);
  else if (key == "band.fso_cap_db") c.band.fso_detector_cap_db = parse_double(value);
  else if (key == "band.rf_noise_db") c.rf_noise_stddev_db = parse_double(value);
  else if (key == "band.noise_seed") c.noise_seed = parse_seed(value);
  else if (key == "training.buffer_capacity") c.training.buffer_capacity = static_cast<std::size_t>(parse_long(value));
  else if (key == "training.batch_size") c.training.batch_size = static_cast<std::size_t>(parse_long(value));
  else if (key == "training.learning_rate") c.training.learning_rate = parse_double(value);
  else if (key == "training.seed") c.training.seed = parse_seed(value);
  else if (key == "eval.threshold_db") c.eval.threshold_db = parse_double(value);
  else if (key == "eval.sample_count") c.eval.sample_count = parse_long(value);
  else if (key == "eval.start_s") c.eval.start_s = parse_long(value);
  else if (key == "output.write_trace") c.output.write_trace = parse_bool(value);
  else if (key == "output.save_model") c.output.save_model = parse_bool(value);
  else if (key == "output.cloud_raster_every_s") c.output.cloud_raster_every_s = parse_long(value);
  else throw ConfigError("unknown scenario key: '" + key + "'");
}

}  // namespace

std::vector<int> default_lookback_for_radius(double radius_m) {
  if (radius_m == 250.0) return {7, 8, 9, 10};
  if (radius_m == 500.0) return {14, 15, 16, 17, 18, 19};
  if (radius_m == 750.0) return {21, 22, 24, 26, 27, 28};
  if (radius_m == 1000.0) return {28, 30, 32, 34, 36, 38};
  throw ConfigError("no lookback preset for beacons.radius_m = " + format_double(radius_m) +
                    "; set features.lookback_s explicitly");
}

ScenarioConfig ScenarioConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path);
  return parse(in, std::filesystem::path(path).stem().string());
}

ScenarioConfig ScenarioConfig::parse(std::istream& in, const std::string& name_hint) {
  ScenarioConfig cfg;
  if (!name_hint.empty()) cfg.name = name_hint;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": empty key or value");
    try {
      apply_key(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

void ScenarioConfig::apply_seed_override(std::uint64_t base_seed) {
  constellation_seed = base_seed;
  cloud.seed = base_seed + 1;
  training.seed = base_seed + 2;
  noise_seed = base_seed + 3;
}

std::vector<int> ScenarioConfig::resolved_lookback_s() const {
  if (!lookback_s.empty()) return lookback_s;
  return default_lookback_for_radius(beacon_radius_m);
}

FeatureLayout ScenarioConfig::feature_layout() const {
  return FeatureLayout{beacon_count, resolved_lookback_s()};
}

void ScenarioConfig::validate() const {
  if (name.empty()) throw ConfigError("scenario.name must not be empty");
  for (char ch : name)
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.'))
      throw ConfigError("scenario.name may only contain [A-Za-z0-9_.-]");

  if (sat_count < 1) throw ConfigError("constellation.count must be >= 1");
  if (!(altitude_min_km > 0.0) || altitude_max_km < altitude_min_km)
    throw ConfigError("invalid constellation altitude range");
  if (altitude_min_km <= cloud.layer_altitude_km)
    throw ConfigError("satellites must orbit above the cloud layer");
  if (std::abs(station_lat_deg) > 90.0) throw ConfigError("station.lat_deg out of range");

  try {
    cloud.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  if (beacon_count < 1) throw ConfigError("beacons.count must be >= 1");
  if (!(beacon_radius_m > 0.0)) throw ConfigError("beacons.radius_m must be > 0");

  FeatureLayout layout;
  try {
    layout = feature_layout();
    layout.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  if (!(min_elevation_deg > 0.0 && min_elevation_deg < 90.0))
    throw ConfigError("sim.min_elevation_deg must be in (0, 90)");
  if (duration_s < 1) throw ConfigError("sim.duration_s must be >= 1");
  if (eval.start_s < 1 || eval.start_s > duration_s)
    throw ConfigError("eval.start_s must lie within the simulated span");
  if (eval.sample_count < 1) throw ConfigError("eval.sample_count must be >= 1");
  if (!std::isfinite(eval.threshold_db)) throw ConfigError("eval.threshold_db must be finite");
  const int max_lookback = layout.lookback_s.back();
  if (max_lookback >= eval.start_s)
    throw ConfigError("largest lookback must be smaller than eval.start_s");

  if (!(band.rf_db_per_km > 0.0) || !(band.fso_db_per_km > 0.0))
    throw ConfigError("band specific attenuations must be > 0");
  if (band.fso_detector_cap_db < 0.0) throw ConfigError("band.fso_cap_db must be >= 0");
  if (rf_noise_stddev_db < 0.0) throw ConfigError("band.rf_noise_db must be >= 0");

  if (training.batch_size < 1) throw ConfigError("training.batch_size must be >= 1");
  if (training.batch_size > training.buffer_capacity)
    throw ConfigError("training.batch_size cannot exceed the buffer capacity");
  if (!(training.learning_rate > 0.0)) throw ConfigError("training.learning_rate must be > 0");

  if (output.cloud_raster_every_s < 0) throw ConfigError("output.cloud_raster_every_s must be >= 0");

  // every beacon->satellite intercept must land inside the raster extent:
  // ring radius + cone radius at the elevation gate + an allowance for the
  // beacon seeing the satellite slightly lower than the station does
  const double min_el = min_elevation_deg * std::numbers::pi / 180.0;
  const double layer_m = cloud.layer_altitude_km * 1000.0;
  const double sin_el = std::sin(min_el);
  const double elevation_slack_m =
      layer_m / (sin_el * sin_el) * (beacon_radius_m / (altitude_min_km * 1000.0));
  const double required_m =
      beacon_radius_m + layer_m / std::tan(min_el) + elevation_slack_m + cloud.pixel_size_m;
  const double half_extent_m = 0.5 * std::min(cloud.extent_x_m(), cloud.extent_y_m());
  if (required_m > half_extent_m) {
    std::ostringstream msg;
    msg << "cloud grid too small: the " << min_elevation_deg << " deg elevation cone needs "
        << required_m << " m of half-extent but the raster provides " << half_extent_m << " m";
    throw ConfigError(msg.str());
  }
}

std::vector<std::pair<std::string, std::string>> ScenarioConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> kv;
  const auto add = [&kv](const std::string& k, const std::string& v) { kv.emplace_back(k, v); };
  add("scenario.name", name);
  add("constellation.count", std::to_string(sat_count));
  add("constellation.altitude_min_km", format_double(altitude_min_km));
  add("constellation.altitude_max_km", format_double(altitude_max_km));
  add("constellation.seed", std::to_string(constellation_seed));
  add("station.lat_deg", format_double(station_lat_deg));
  add("station.lon_deg", format_double(station_lon_deg));
  add("cloud.nx", std::to_string(cloud.nx));
  add("cloud.ny", std::to_string(cloud.ny));
  add("cloud.pixel_size_m", format_double(cloud.pixel_size_m));
  add("cloud.coarse_factor", std::to_string(cloud.coarse_factor));
  add("cloud.wind_px_x", format_double(cloud.wind_px_x));
  add("cloud.wind_px_y", format_double(cloud.wind_px_y));
  add("cloud.innovation", format_double(cloud.innovation));
  add("cloud.coverage_threshold", format_double(cloud.coverage_threshold));
  add("cloud.blur_sigma_px", format_double(cloud.blur_sigma_px));
  add("cloud.blur_halfwidth_px", std::to_string(cloud.blur_halfwidth_px));
  add("cloud.mean_thickness_km", format_double(cloud.mean_thickness_km));
  add("cloud.altitude_km", format_double(cloud.layer_altitude_km));
  add("cloud.seed", std::to_string(cloud.seed));
  add("beacons.count", std::to_string(beacon_count));
  add("beacons.radius_m", format_double(beacon_radius_m));
  add("features.lookback_s", join_ints(resolved_lookback_s()));
  add("sim.min_elevation_deg", format_double(min_elevation_deg));
  add("sim.duration_s", std::to_string(duration_s));
  add("band.rf_db_per_km", format_double(band.rf_db_per_km));
  add("band.fso_db_per_km", format_double(band.fso_db_per_km));
  add("band.fso_cap_db", format_double(band.fso_detector_cap_db));
  add("band.rf_noise_db", format_double(rf_noise_stddev_db));
  add("band.noise_seed", std::to_string(noise_seed));
  add("training.buffer_capacity", std::to_string(training.buffer_capacity));
  add("training.batch_size", std::to_string(training.batch_size));
  add("training.learning_rate", format_double(training.learning_rate));
  add("training.seed", std::to_string(training.seed));
  add("eval.threshold_db", format_double(eval.threshold_db));
  add("eval.sample_count", std::to_string(eval.sample_count));
  add("eval.start_s", std::to_string(eval.start_s));
  add("output.write_trace", output.write_trace ? "true" : "false");
  add("output.save_model", output.save_model ? "true" : "false");
  add("output.cloud_raster_every_s", std::to_string(output.cloud_raster_every_s));
  return kv;
}

std::string key_documentation() {
  return
      "scenario.name                  (file stem)  identifier; also the output subdirectory\n"
      "constellation.count            300          number of satellites\n"
      "constellation.altitude_min_km  400          lower edge of the altitude band\n"
      "constellation.altitude_max_km  2000         upper edge of the altitude band\n"
      "constellation.seed             1            constellation sampling stream\n"
      "station.lat_deg                0            FSO station latitude\n"
      "station.lon_deg                0            FSO station longitude\n"
      "cloud.nx, cloud.ny             600          raster size [px]\n"
      "cloud.pixel_size_m             50           raster resolution\n"
      "cloud.coarse_factor            30           blob-scale downsample coefficient (>= 2)\n"
      "cloud.wind_px_x/_y             1            drift per step [px]; fractions accumulate\n"
      "cloud.innovation               0.01         fresh-noise fraction per step [0, 1]\n"
      "cloud.coverage_threshold       0.125        cloud mask cut on the unit-variance latent\n"
      "cloud.blur_sigma_px            2            smoothing kernel sigma\n"
      "cloud.blur_halfwidth_px        6            smoothing kernel halfwidth (0 = identity)\n"
      "cloud.mean_thickness_km        0.30         target mean thickness over cloudy pixels\n"
      "cloud.altitude_km              8            cloud layer altitude [2, 10]\n"
      "cloud.seed                     2            cloud evolution stream\n"
      "beacons.count                  16           RF beacons on the ring\n"
      "beacons.radius_m               250          ring radius around the FSO station\n"
      "features.lookback_s            (per radius) RF lookback offsets, e.g. 7,8,9,10\n"
      "sim.min_elevation_deg          30           measurement elevation gate\n"
      "sim.duration_s                 40000        simulated seconds\n"
      "band.rf_db_per_km              3            RF through-cloud specific attenuation\n"
      "band.fso_db_per_km             300          FSO through-cloud specific attenuation\n"
      "band.fso_cap_db                100          FSO detector measurement ceiling\n"
      "band.rf_noise_db               0            stddev of RF measurement noise [dB]\n"
      "band.noise_seed                4            RF measurement noise stream\n"
      "training.buffer_capacity       5000         experience buffer size\n"
      "training.batch_size            500          minibatch size\n"
      "training.learning_rate         0.01         SGD step size\n"
      "training.seed                  3            init + batch sampling stream\n"
      "eval.threshold_db              30           availability threshold\n"
      "eval.sample_count              5000         evaluation pairs to collect\n"
      "eval.start_s                   30000        first second of the evaluation window\n"
      "output.write_trace             true         write the per-second trace CSV\n"
      "output.save_model              false        write the final model checkpoint\n"
      "output.cloud_raster_every_s    0            dump thickness rasters every N s (0 = off)\n";
}

}  // namespace fsocast

#include "fsocast/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>
#include <thread>

#include "fsocast/channel.hpp"
#include "fsocast/checkpoint.hpp"
#include "fsocast/cloudfield.hpp"
#include "fsocast/geometry.hpp"
#include "fsocast/orbits.hpp"
#include "fsocast/predictor.hpp"
#include "fsocast/rng.hpp"

namespace fsocast {

double prediction_accuracy(std::span<const double> truth, std::span<const double> predicted,
                           double threshold_db) {
  if (truth.size() != predicted.size())
    throw std::invalid_argument("prediction_accuracy: length mismatch");
  if (truth.empty()) throw std::invalid_argument("prediction_accuracy: empty input");
  long correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i)
    if ((truth[i] > threshold_db) == (predicted[i] > threshold_db)) ++correct;
  return static_cast<double>(correct) / static_cast<double>(truth.size());
}

ConfusionCounts confusion_counts(std::span<const double> truth, std::span<const double> predicted,
                                 double threshold_db) {
  if (truth.size() != predicted.size())
    throw std::invalid_argument("confusion_counts: length mismatch");
  ConfusionCounts c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool t = truth[i] > threshold_db;
    const bool p = predicted[i] > threshold_db;
    if (t && p) ++c.both_above;
    else if (t) ++c.truth_above_only;
    else if (p) ++c.pred_above_only;
    else ++c.both_below;
  }
  return c;
}

namespace {

std::string raster_name(long t) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "cloud_%06ld.bin", t);
  return buf;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg, const RunOptions& opt) {
  cfg.validate();

  namespace fs = std::filesystem;
  const bool write_files = !opt.out_dir.empty();
  fs::path dir;
  if (write_files) {
    dir = fs::path(opt.out_dir) / cfg.name;
    fs::create_directories(dir);
  }

  const PhysicalConstants constants;
  const double deg = std::numbers::pi / 180.0;

  GroundSite station;
  station.site_id = 0;
  station.kind = SiteKind::FsoStation;
  station.position_km =
      surface_position(cfg.station_lat_deg * deg, cfg.station_lon_deg * deg, constants);
  const LocalFrame frame = LocalFrame::at(station.position_km);
  const BeaconRing ring =
      build_beacon_ring(station, cfg.beacon_radius_m, cfg.beacon_count, 1, constants);

  const std::vector<OrbitalElements> constellation = generate_constellation(
      cfg.sat_count, cfg.altitude_min_km, cfg.altitude_max_km, cfg.constellation_seed, constants);

  CloudGrid cloud(cfg.cloud);

  const FeatureLayout layout = cfg.feature_layout();
  const double min_elevation = cfg.min_elevation_deg * deg;
  const int history_span = layout.lookback_s.back() + 1;
  std::vector<ObservationRing> history(static_cast<std::size_t>(cfg.sat_count),
                                       ObservationRing(history_span));

  Rng train_rng(cfg.training.seed);
  Mlp<float> model = Mlp<float>::fan_in_uniform(default_layer_sizes(layout.feature_count()), train_rng);
  ExperienceBuffer buffer(cfg.training.buffer_capacity);
  Rng noise_rng(cfg.noise_seed);

  RunResult result;
  std::unique_ptr<TraceWriter> trace;
  if (write_files && cfg.output.write_trace) {
    result.trace_path = (dir / "trace.csv").string();
    trace = std::make_unique<TraceWriter>(result.trace_path, cfg.beacon_count);
  }

  std::vector<double> eval_truth, eval_pred;
  eval_truth.reserve(static_cast<std::size_t>(cfg.eval.sample_count));
  eval_pred.reserve(static_cast<std::size_t>(cfg.eval.sample_count));

  long train_steps = 0;
  long record_count = 0;
  double last_loss = std::numeric_limits<double>::quiet_NaN();

  FeatureStats stats = FeatureStats::identity(layout.feature_count());
  bool stats_fresh = false;  // true when the last training step already rebuilt them
  const std::size_t batch = cfg.training.batch_size;
  Mlp<float>::Matrix batch_x(layout.feature_count(), static_cast<Eigen::Index>(batch));
  Mlp<float>::RowVector batch_y(static_cast<Eigen::Index>(batch));

  for (long t = 1; t <= cfg.duration_s; ++t) {
    cloud.step();
    if (write_files && cfg.output.cloud_raster_every_s > 0 &&
        t % cfg.output.cloud_raster_every_s == 0)
      write_raster_dump((dir / raster_name(t)).string(), cloud, t);

    // statistics for this second's predictions come from the buffer as of the
    // end of the previous second (the buffer has not changed since the last
    // training step rebuilt them, so that rebuild can stand in)
    if (!stats_fresh && buffer.size() > 0) stats = FeatureStats::from_buffer(buffer);

    for (const OrbitalElements& el : constellation) {
      const SatelliteState st = propagate(el, static_cast<double>(t), constants);
      const Topocentric topo = topocentric(st.position_km, station);
      if (topo.elevation_rad < min_elevation) continue;

      LinkObservation obs;
      obs.range_km = topo.range_km;
      obs.azimuth_rad = topo.azimuth_rad;
      obs.elevation_rad = topo.elevation_rad;
      obs.rf_db.resize(static_cast<std::size_t>(cfg.beacon_count));
      for (int b = 0; b < cfg.beacon_count; ++b) {
        const GroundSite& site = ring.sites[static_cast<std::size_t>(b)];
        const CloudIntercept ci =
            los_cloud_intersection(frame, site, st.position_km, cfg.cloud.layer_altitude_km);
        const double thickness = cloud.thickness_at(ci.grid_x_m, ci.grid_y_m);
        double rf = slant_attenuation(thickness, ci.elevation_at_site_rad, cfg.band.rf_db_per_km);
        if (cfg.rf_noise_stddev_db > 0.0) rf += cfg.rf_noise_stddev_db * noise_rng.normal();
        obs.rf_db[static_cast<std::size_t>(b)] = rf;
      }

      const CloudIntercept fso_ci =
          los_cloud_intersection(frame, station, st.position_km, cfg.cloud.layer_altitude_km);
      const double fso_raw = slant_attenuation(cloud.thickness_at(fso_ci.grid_x_m, fso_ci.grid_y_m),
                                               fso_ci.elevation_at_site_rad, cfg.band.fso_db_per_km);
      const double fso = fso_observed_attenuation(fso_raw, cfg.band);

      ObservationRing& ringbuf = history[static_cast<std::size_t>(el.sat_id)];
      ringbuf.record(t, obs);

      TraceRecord rec;
      rec.time_s = t;
      rec.sat_id = el.sat_id;
      rec.range_km = topo.range_km;
      rec.azimuth_rad = topo.azimuth_rad;
      rec.elevation_rad = topo.elevation_rad;
      rec.rf_db = obs.rf_db;
      rec.fso_db = fso;

      // prequential: predict against the label, then let the sample train
      if (const auto features = assemble_features(ringbuf, layout, t)) {
        const double pred =
            predict_fso(model, stats, features->flat(), cfg.band.fso_detector_cap_db);
        rec.prediction_db = pred;
        ExperienceSample sample{features->flat(), fso, t, el.sat_id};
        if (opt.keep_samples) result.samples.push_back(sample);
        buffer.push(std::move(sample));
        if (t >= cfg.eval.start_s &&
            static_cast<long>(eval_truth.size()) < cfg.eval.sample_count) {
          eval_truth.push_back(fso);
          eval_pred.push_back(pred);
        }
      }

      if (trace) trace->write(rec);
      if (opt.keep_trace) result.trace.push_back(std::move(rec));
      ++record_count;
    }

    if (buffer.size() >= batch) {
      stats = FeatureStats::from_buffer(buffer);  // refreshed each training step
      stats_fresh = true;
      const std::vector<std::size_t> idx = sample_batch(buffer, batch, train_rng);
      for (std::size_t i = 0; i < batch; ++i) {
        const ExperienceSample& s = buffer[idx[i]];
        batch_x.col(static_cast<Eigen::Index>(i)) = stats.standardize(s.features).cast<float>();
        batch_y(static_cast<Eigen::Index>(i)) =
            static_cast<float>(stats.standardize_label(s.label_db));
      }
      last_loss = static_cast<double>(
          sgd_step(model, batch_x, batch_y, static_cast<float>(cfg.training.learning_rate)));
      ++train_steps;
    } else {
      stats_fresh = false;
    }

    if (opt.progress && t % 5000 == 0)
      std::cerr << cfg.name << ": t=" << t << "/" << cfg.duration_s << " buffer=" << buffer.size()
                << " eval=" << eval_truth.size() << "/" << cfg.eval.sample_count
                << " loss=" << last_loss << "\n";
  }

  if (trace) trace->close();

  if (eval_truth.empty())
    throw std::runtime_error("run_scenario: no evaluation pairs collected; extend sim.duration_s "
                             "or lower eval.start_s");

  AccuracyReport& rep = result.report;
  rep.scenario = cfg.name;
  rep.confusion = confusion_counts(eval_truth, eval_pred, cfg.eval.threshold_db);
  rep.sample_count = rep.confusion.total();
  rep.sample_target = cfg.eval.sample_count;
  rep.a_pred = static_cast<double>(rep.confusion.both_above + rep.confusion.both_below) /
               static_cast<double>(rep.sample_count);
  rep.threshold_db = cfg.eval.threshold_db;
  rep.eval_start_s = cfg.eval.start_s;
  rep.feature_count = layout.feature_count();
  rep.train_steps = train_steps;
  rep.record_count = record_count;
  rep.final_train_loss = last_loss;
  rep.config_echo = cfg.echo();

  if (write_files) {
    result.report_path = (dir / "report.txt").string();
    std::ofstream os(result.report_path, std::ios::binary);
    os << format_report(rep);
    if (!os) throw std::runtime_error("cannot write report " + result.report_path);
  }
  if (write_files && (cfg.output.save_model || opt.save_model)) {
    result.model_path = (dir / "model.bin").string();
    FeatureStats final_stats =
        buffer.size() > 0 ? FeatureStats::from_buffer(buffer) : FeatureStats::identity(layout.feature_count());
    save_checkpoint(result.model_path, ModelCheckpoint{layout, std::move(final_stats), model});
  }
  return result;
}

std::string format_report(const AccuracyReport& r) {
  std::ostringstream os;
  os << "scenario = " << r.scenario << "\n";
  os << "a_pred = " << format_double(r.a_pred) << "\n";
  os << "samples = " << r.sample_count << "\n";
  os << "samples_target = " << r.sample_target << "\n";
  os << "both_above = " << r.confusion.both_above << "\n";
  os << "truth_above_only = " << r.confusion.truth_above_only << "\n";
  os << "pred_above_only = " << r.confusion.pred_above_only << "\n";
  os << "both_below = " << r.confusion.both_below << "\n";
  os << "threshold_db = " << format_double(r.threshold_db) << "\n";
  os << "eval_start_s = " << r.eval_start_s << "\n";
  os << "feature_count = " << r.feature_count << "\n";
  os << "train_steps = " << r.train_steps << "\n";
  os << "records = " << r.record_count << "\n";
  os << "final_train_loss = " << format_double(r.final_train_loss) << "\n";
  for (const auto& [k, v] : r.config_echo) os << "config." << k << " = " << v << "\n";
  return os.str();
}

std::string format_sweep_table(const std::vector<AccuracyReport>& reports) {
  std::ostringstream os;
  os << "scenario,beacons,radius_m,lookback_s,a_pred,samples\n";
  for (const AccuracyReport& r : reports) {
    std::string beacons, radius, lookback;
    for (const auto& [k, v] : r.config_echo) {
      if (k == "beacons.count") beacons = v;
      if (k == "beacons.radius_m") radius = v;
      if (k == "features.lookback_s") lookback = v;
    }
    os << r.scenario << ',' << beacons << ',' << radius << ",\"" << lookback << "\","
       << format_double(r.a_pred) << ',' << r.sample_count << "\n";
  }
  return os.str();
}

std::vector<AccuracyReport> sweep(const std::vector<ScenarioConfig>& configs,
                                  const RunOptions& opt, int jobs) {
  if (configs.empty()) throw std::invalid_argument("sweep: no scenarios");
  if (jobs < 1) throw std::invalid_argument("sweep: jobs must be >= 1");
  for (std::size_t i = 0; i < configs.size(); ++i)
    for (std::size_t j = i + 1; j < configs.size(); ++j)
      if (configs[i].name == configs[j].name)
        throw ConfigError("sweep: duplicate scenario name '" + configs[i].name + "'");
  for (const ScenarioConfig& c : configs) c.validate();

  std::vector<AccuracyReport> reports(configs.size());
  std::vector<std::string> errors(configs.size());
  std::atomic<std::size_t> next{0};

  const auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= configs.size()) return;
      try {
        RunOptions each = opt;
        each.keep_trace = false;
        reports[i] = run_scenario(configs[i], each).report;
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };

  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    const int n = std::min<int>(jobs, static_cast<int>(configs.size()));
    pool.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  for (std::size_t i = 0; i < configs.size(); ++i)
    if (!errors[i].empty())
      throw std::runtime_error("sweep: scenario '" + configs[i].name + "' failed: " + errors[i]);

  if (!opt.out_dir.empty()) {
    const auto path = std::filesystem::path(opt.out_dir) / "sweep_summary.csv";
    std::ofstream os(path, std::ios::binary);
    os << format_sweep_table(reports);
    if (!os) throw std::runtime_error("cannot write sweep summary");
  }
  return reports;
}

}  // namespace fsocast

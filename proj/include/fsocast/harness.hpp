#pragma once

#include <span>
#include <string>
#include <vector>

#include "fsocast/scenario.hpp"
#include "fsocast/trace.hpp"

namespace fsocast {

struct ConfusionCounts {
  long both_above = 0;
  long truth_above_only = 0;
  long pred_above_only = 0;
  long both_below = 0;
  long total() const { return both_above + truth_above_only + pred_above_only + both_below; }
};

// Fraction of samples where truth and prediction fall on the same side of the
// threshold. Throws std::invalid_argument on length mismatch or empty input.
double prediction_accuracy(std::span<const double> truth, std::span<const double> predicted,
                           double threshold_db);

ConfusionCounts confusion_counts(std::span<const double> truth, std::span<const double> predicted,
                                 double threshold_db);

struct AccuracyReport {
  std::string scenario;
  double a_pred = 0.0;
  long sample_count = 0;         // evaluation pairs actually collected
  long sample_target = 0;        // eval.sample_count from the config
  ConfusionCounts confusion;
  double threshold_db = 0.0;
  long eval_start_s = 0;
  int feature_count = 0;
  long train_steps = 0;
  long record_count = 0;
  double final_train_loss = 0.0;
  std::vector<std::pair<std::string, std::string>> config_echo;
};

struct RunOptions {
  std::string out_dir;        // empty = write nothing
  bool keep_trace = false;    // retain the trace records in memory
  bool keep_samples = false;  // retain every pushed experience sample
  bool progress = false;      // stderr progress lines
  bool save_model = false;    // in addition to output.save_model in the config
};

struct RunResult {
  AccuracyReport report;
  std::vector<TraceRecord> trace;          // populated when keep_trace
  std::vector<ExperienceSample> samples;   // populated when keep_samples
  std::string trace_path;
  std::string report_path;
  std::string model_path;
};

// The full experiment: per second the cloud advances, every satellite above
// the elevation gate is measured against all sites, features are assembled,
// the model predicts (prequentially, before the sample enters the buffer),
// and one SGD step runs once the buffer can fill a batch. After eval.start_s
// the first eval.sample_count (truth, prediction) pairs feed the report.
// Deterministic for a fixed config, including all file output.
RunResult run_scenario(const ScenarioConfig& cfg, const RunOptions& opt = {});

// Runs each scenario (jobs > 1 uses a worker pool; scenario names must be
// unique) and writes a combined summary table when out_dir is set.
std::vector<AccuracyReport> sweep(const std::vector<ScenarioConfig>& configs,
                                  const RunOptions& opt = {}, int jobs = 1);

std::string format_report(const AccuracyReport& report);
std::string format_sweep_table(const std::vector<AccuracyReport>& reports);

}  // namespace fsocast

#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace fsocast {

// One eligible (satellite above the elevation gate, second) observation.
struct TraceRecord {
  long time_s = 0;
  int sat_id = 0;
  double range_km = 0.0;
  double azimuth_rad = 0.0;
  double elevation_rad = 0.0;
  std::vector<double> rf_db;              // per beacon, site order
  double fso_db = 0.0;                    // detector-capped
  std::optional<double> prediction_db;    // absent while the lookback window is incomplete
};

// Streaming CSV writer. Numbers are written in shortest round-trip form so a
// parsed trace reproduces the simulated values bit for bit.
class TraceWriter {
 public:
  TraceWriter(const std::string& path, int beacon_count);
  void write(const TraceRecord& rec);
  void close();

 private:
  std::ofstream out_;
  int beacon_count_;
};

std::string trace_header(int beacon_count);
std::string format_trace_record(const TraceRecord& rec);

std::vector<TraceRecord> read_trace_csv(const std::string& path);

}  // namespace fsocast

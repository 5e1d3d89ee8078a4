#include "fsocast/trace.hpp"

#include <sstream>
#include <stdexcept>

#include "fsocast/scenario.hpp"

namespace fsocast {

std::string trace_header(int beacon_count) {
  std::string h = "time_s,sat_id,range_km,azimuth_rad,elevation_rad";
  for (int b = 0; b < beacon_count; ++b) h += ",rf_" + std::to_string(b) + "_db";
  h += ",fso_db,prediction_db";
  return h;
}

std::string format_trace_record(const TraceRecord& rec) {
  std::string line = std::to_string(rec.time_s);
  line += ',';
  line += std::to_string(rec.sat_id);
  line += ',';
  line += format_double(rec.range_km);
  line += ',';
  line += format_double(rec.azimuth_rad);
  line += ',';
  line += format_double(rec.elevation_rad);
  for (double v : rec.rf_db) {
    line += ',';
    line += format_double(v);
  }
  line += ',';
  line += format_double(rec.fso_db);
  line += ',';
  if (rec.prediction_db) line += format_double(*rec.prediction_db);
  return line;
}

TraceWriter::TraceWriter(const std::string& path, int beacon_count)
    : out_(path, std::ios::binary), beacon_count_(beacon_count) {
  if (!out_) throw std::runtime_error("trace: cannot open " + path + " for writing");
  out_ << trace_header(beacon_count) << '\n';
}

void TraceWriter::write(const TraceRecord& rec) {
  if (static_cast<int>(rec.rf_db.size()) != beacon_count_)
    throw std::invalid_argument("trace: beacon column count mismatch");
  out_ << format_trace_record(rec) << '\n';
}

void TraceWriter::close() {
  if (out_.is_open()) {
    out_.flush();
    if (!out_) throw std::runtime_error("trace: write failed");
    out_.close();
  }
}

std::vector<TraceRecord> read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("trace: cannot open " + path);

  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("trace: empty file " + path);
  int beacons = 0;
  {
    std::stringstream ss(header);
    std::string col;
    while (std::getline(ss, col, ','))
      if (col.rfind("rf_", 0) == 0) ++beacons;
  }

  std::vector<TraceRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (line.back() == ',') fields.push_back("");  // empty trailing prediction
    const std::size_t expected = 7 + static_cast<std::size_t>(beacons);
    if (fields.size() != expected)
      throw std::runtime_error("trace: malformed row in " + path);

    TraceRecord r;
    r.time_s = std::stol(fields[0]);
    r.sat_id = std::stoi(fields[1]);
    r.range_km = parse_double(fields[2]);
    r.azimuth_rad = parse_double(fields[3]);
    r.elevation_rad = parse_double(fields[4]);
    r.rf_db.resize(static_cast<std::size_t>(beacons));
    for (int b = 0; b < beacons; ++b) r.rf_db[static_cast<std::size_t>(b)] = parse_double(fields[5 + static_cast<std::size_t>(b)]);
    r.fso_db = parse_double(fields[5 + static_cast<std::size_t>(beacons)]);
    const std::string& pred = fields[6 + static_cast<std::size_t>(beacons)];
    if (!pred.empty()) r.prediction_db = parse_double(pred);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace fsocast

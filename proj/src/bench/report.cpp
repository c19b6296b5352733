// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#include <charconv>

#include "flatlift/bench/bench.hpp"

namespace flatlift::bench {

using nlohmann::json;

BenchAggregates aggregate(std::span<const BenchRow> rows) {
  BenchAggregates a;
  a.n = rows.size();
  if (rows.empty()) return a;
  std::size_t flat = 0, base_thin = 0, pipe_thin = 0;
  double gain = 0;
  for (const auto& r : rows) {
    flat += r.is_flat;
    base_thin += r.baseline_flagged;
    pipe_thin += r.pipeline_flagged;
    gain += r.pipeline_thinness - r.baseline_thinness;
  }
  const double n = static_cast<double>(rows.size());
  a.flat_fraction = static_cast<double>(flat) / n;
  a.baseline_thin_rate = static_cast<double>(base_thin) / n;
  a.pipeline_thin_rate = static_cast<double>(pipe_thin) / n;
  a.mean_thinness_gain = gain / n;
  return a;
}

json to_json(const BenchReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"id", r.id},
                    {"is_flat", r.is_flat},
                    {"baseline_thinness", r.baseline_thinness},
                    {"pipeline_thinness", r.pipeline_thinness},
                    {"baseline_flagged", r.baseline_flagged},
                    {"pipeline_flagged", r.pipeline_flagged},
                    {"chosen_index", r.chosen_index},
                    {"selection_method", r.selection_method},
                    {"wall_time_ms", r.wall_time_ms}});
  }
  json errors = json::array();
  for (const auto& e : report.errors) errors.push_back({{"id", e.id}, {"stage", e.stage}, {"message", e.message}});
  const auto& a = report.aggregates;
  return {{"schema", kReportSchema},
          {"dataset", report.dataset},
          {"rows", rows},
          {"errors", errors},
          {"aggregates",
           {{"n", a.n},
            {"flat_fraction", a.flat_fraction},
            {"baseline_thin_rate", a.baseline_thin_rate},
            {"pipeline_thin_rate", a.pipeline_thin_rate},
            {"mean_thinness_gain", a.mean_thinness_gain}}}};
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Shortest text that reads back as the same double.
std::string number(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string boolean(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string write_report(const BenchReport& report, ReportFormat format) {
  if (format == ReportFormat::Json) return to_json(report).dump(2) + "\n";
  std::string out =
      "id,is_flat,baseline_thinness,pipeline_thinness,baseline_flagged,pipeline_flagged,chosen_index,"
      "selection_method,wall_time_ms\r\n";
  for (const auto& r : report.rows) {
    out += csv_field(r.id) + "," + boolean(r.is_flat) + "," + number(r.baseline_thinness) + "," +
           number(r.pipeline_thinness) + "," + boolean(r.baseline_flagged) + "," + boolean(r.pipeline_flagged) + "," +
           std::to_string(r.chosen_index) + "," + csv_field(r.selection_method) + "," + number(r.wall_time_ms) +
           "\r\n";
  }
  return out;
}

}  // namespace flatlift::bench

// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#include <json.hpp>
#include <numeric>
#include <set>

#include "doctest.h"
#include "flatlift/bench/bench.hpp"
#include "flatlift/condition/flatness.hpp"
#include "flatlift/core/error.hpp"
#include "flatlift/core/png.hpp"
#include "flatlift/mesh/geometry.hpp"
#include "flatlift/mesh/mesh_io.hpp"
#include "support/synth.hpp"

using namespace flatlift;
using namespace flatlift::bench;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string violation_text(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ManifestInvalid);
    return e.what();
  }
  FAIL("no error thrown");
  return {};
}

// One dataset shared by the tests in this file.
const fs::path& dataset() {
  static const fs::path dir = [] {
    auto d = testing::temp_dir("bench_dataset");
    write_procedural_dataset(d, 100);
    return d;
  }();
  return dir;
}

json manifest_doc() {
  const auto bytes = read_file(dataset() / "manifest.json");
  return json::parse(bytes.begin(), bytes.end());
}

// Straight recount from the rows, written without the library's helper.
BenchAggregates fold(const std::vector<BenchRow>& rows) {
  BenchAggregates a;
  a.n = rows.size();
  if (rows.empty()) return a;
  const double n = static_cast<double>(rows.size());
  a.flat_fraction = std::count_if(rows.begin(), rows.end(), [](const BenchRow& r) { return r.is_flat; }) / n;
  a.baseline_thin_rate =
      std::count_if(rows.begin(), rows.end(), [](const BenchRow& r) { return r.baseline_flagged; }) / n;
  a.pipeline_thin_rate =
      std::count_if(rows.begin(), rows.end(), [](const BenchRow& r) { return r.pipeline_flagged; }) / n;
  a.mean_thinness_gain = std::accumulate(rows.begin(), rows.end(), 0.0,
                                         [](double s, const BenchRow& r) {
                                           return s + (r.pipeline_thinness - r.baseline_thinness);
                                         }) /
                         n;
  return a;
}

json without_wall_time(const BenchReport& r) {
  json j = to_json(r);
  for (auto& row : j["rows"]) row.erase("wall_time_ms");
  return j;
}

// Minimal RFC 4180 reader for checking the writer.
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows(1, std::vector<std::string>(1));
  bool quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        rows.back().back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        rows.back().back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      rows.back().emplace_back();
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      ++i;
      rows.emplace_back(1);
    } else {
      rows.back().back() += c;
    }
  }
  if (rows.back().size() == 1 && rows.back()[0].empty()) rows.pop_back();
  return rows;
}

}  // namespace

TEST_CASE("dataset: the procedural 100-entry manifest loads") {
  const auto m = load_manifest(dataset() / "manifest.json");
  CHECK(m.entries.size() == 100);
  CHECK(m.name == "procedural-flat-100");
  std::set<std::string> styles;
  for (const auto& e : m.entries) styles.insert(e.style);
  CHECK(styles == std::set<std::string>{"icon", "outlined cartoon", "flat fill"});
  CHECK(to_json(m) == manifest_doc());

  // Generation is deterministic.
  const auto again = testing::temp_dir("bench_dataset_again");
  write_procedural_dataset(again, 100);
  for (const auto& e : m.entries) REQUIRE(read_file(again / e.path) == read_file(dataset() / e.path));

  // The sprites are flat-coloured by the library's own criterion.
  int flat = 0;
  for (const auto& e : m.entries) {
    const auto img = decode_image(read_file(m.resolve(e)));
    flat += condition::flatness_report(img, condition::foreground_mask(img)).is_flat;
  }
  CHECK(flat == 100);
}

TEST_CASE("dataset: violations are all reported with entry ids") {
  json doc = manifest_doc();
  doc["entries"][3]["id"] = doc["entries"][1]["id"];
  doc["entries"][5]["path"] = "sprites/missing.png";
  doc["entries"][7].erase("license");
  const auto text = violation_text([&] { parse_manifest(doc, dataset()); });
  CHECK(text.find("3 violation(s)") != std::string::npos);
  CHECK(text.find("duplicate id 'sprite-001'") != std::string::npos);
  CHECK(text.find("entry 'sprite-005': file not found") != std::string::npos);
  CHECK(text.find("entry 'sprite-007': license must be a string") != std::string::npos);
  CHECK(manifest_violations(doc, dataset()).size() == 3);

  json empty = manifest_doc();
  empty["entries"] = json::array();
  CHECK(violation_text([&] { parse_manifest(empty, dataset()); }).find("entries list is empty") != std::string::npos);

  json bad = manifest_doc();
  bad["schema"] = 2;
  bad["entries"][0]["id"] = "../escape";
  bad["entries"][1]["path"] = "/etc/passwd";
  bad["entries"][2]["path"] = "manifest.json";  // exists but is not a PNG
  CHECK(manifest_violations(bad, dataset()).size() == 4);

  CHECK(violation_text([] { load_manifest("/nonexistent/manifest.json"); }).find("cannot read") !=
        std::string::npos);
}

TEST_CASE("bench: limit, determinism, row order and aggregates") {
  const auto m = load_manifest(dataset() / "manifest.json");
  pipeline::PipelineConfig cfg;
  BenchOptions opts;
  opts.limit = 3;
  opts.work_dir = testing::temp_dir("bench_runs_a");
  const auto a = run_benchmark(m, cfg, opts);
  REQUIRE(a.rows.size() == 3);
  CHECK(a.errors.empty());
  for (int i = 0; i < 3; ++i) CHECK(a.rows[i].id == m.entries[i].id);

  opts.work_dir = testing::temp_dir("bench_runs_b");
  opts.parallelism = 3;
  const auto b = run_benchmark(m, cfg, opts);
  CHECK(without_wall_time(a) == without_wall_time(b));

  const auto f = fold(a.rows);
  CHECK(a.aggregates.n == f.n);
  CHECK(a.aggregates.flat_fraction == f.flat_fraction);
  CHECK(a.aggregates.baseline_thin_rate == f.baseline_thin_rate);
  CHECK(a.aggregates.pipeline_thin_rate == f.pipeline_thin_rate);
  CHECK(a.aggregates.mean_thinness_gain == f.mean_thinness_gain);
}

TEST_CASE("bench: ten sprites, thin rates against the written meshes") {
  const auto m = load_manifest(dataset() / "manifest.json");
  BenchOptions opts;
  opts.limit = 10;
  opts.parallelism = 2;
  opts.work_dir = testing::temp_dir("bench_runs_ten");
  const auto report = run_benchmark(m, pipeline::PipelineConfig{}, opts);
  REQUIRE(report.rows.size() == 10);

  // Oracle: PCA of the meshes on disk, counted directly.
  int base_thin = 0, pipe_thin = 0;
  for (const auto& row : report.rows) {
    const auto base = mesh::thinness_report(mesh::load_mesh(read_file(opts.work_dir / row.id / "baseline.ply")));
    const auto fin = mesh::thinness_report(mesh::load_mesh(read_file(opts.work_dir / row.id / "final.ply")));
    CHECK(row.baseline_thinness == doctest::Approx(base.thinness_ratio).epsilon(1e-9));
    CHECK(row.pipeline_thinness == doctest::Approx(fin.thinness_ratio).epsilon(1e-9));
    base_thin += base.flagged_thin;
    pipe_thin += fin.flagged_thin;
  }
  CHECK(report.aggregates.baseline_thin_rate == base_thin / 10.0);
  CHECK(report.aggregates.pipeline_thin_rate == pipe_thin / 10.0);
  CHECK(report.aggregates.pipeline_thin_rate <= report.aggregates.baseline_thin_rate);
  CHECK(report.aggregates.flat_fraction == 1.0);
}

TEST_CASE("bench: failing entries are isolated") {
  const auto dir = testing::temp_dir("bench_isolation");
  write_file_atomic(dir / "ok.png", encode_image(testing::disk_image(48, 16, {40, 120, 220}, {255, 255, 255})));
  write_file_atomic(dir / "blank.png", encode_image(testing::constant_image(48, 48, {255, 255, 255})));
  const json doc = {{"schema", 1},
                    {"name", "isolation"},
                    {"entries",
                     {{{"id", "blank"}, {"path", "blank.png"}, {"style", "x"}, {"license", "y"}},
                      {{"id", "ok"}, {"path", "ok.png"}, {"style", "x"}, {"license", "y"}}}}};
  const auto m = parse_manifest(doc, dir);
  BenchOptions opts;
  opts.work_dir = dir / "runs";
  const auto report = run_benchmark(m, pipeline::PipelineConfig{}, opts);
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].id == "ok");
  REQUIRE(report.errors.size() == 1);
  CHECK(report.errors[0].id == "blank");
  CHECK(report.errors[0].stage == "mask");
  CHECK(report.aggregates.n == 1);
}

TEST_CASE("report: CSV quoting and JSON shape") {
  BenchReport empty;
  empty.dataset = "none";
  const std::string header =
      "id,is_flat,baseline_thinness,pipeline_thinness,baseline_flagged,pipeline_flagged,chosen_index,"
      "selection_method,wall_time_ms\r\n";
  CHECK(write_report(empty, ReportFormat::Csv) == header);

  BenchReport r;
  r.rows.push_back({"plain", true, 0.25, 0.875, false, false, 2, "Vqa", 12.5});
  r.rows.push_back({"comma,id", false, 0.05, 0.1, true, false, 1, "say \"hi\"", 3});
  r.aggregates = aggregate(r.rows);
  const auto csv = write_report(r, ReportFormat::Csv);
  CHECK(csv.find("\"comma,id\"") != std::string::npos);
  CHECK(csv.find("\"say \"\"hi\"\"\"") != std::string::npos);
  const auto rows = parse_csv(csv);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1] == std::vector<std::string>{"plain", "true", "0.25", "0.875", "false", "false", "2", "Vqa", "12.5"});
  CHECK(rows[2][0] == "comma,id");
  CHECK(rows[2][7] == "say \"hi\"");
  CHECK(std::stod(rows[2][2]) == 0.05);  // shortest round-trip text

  const json j = json::parse(write_report(r, ReportFormat::Json));
  CHECK(j["schema"] == 1);
  CHECK(j["rows"].size() == 2);
  CHECK(j["aggregates"]["n"] == 2);
  CHECK(j["aggregates"]["baseline_thin_rate"] == 0.5);
  CHECK(j["aggregates"]["pipeline_thin_rate"] == 0.0);
  CHECK(j["aggregates"]["mean_thinness_gain"].get<double>() == doctest::Approx((0.625 + 0.05) / 2));
}

// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flatlift/pipeline/config.hpp"
#include "flatlift/pipeline/pipeline.hpp"

namespace flatlift::bench {

inline constexpr int kDatasetSchema = 1;
inline constexpr int kReportSchema = 1;

struct DatasetEntry {
  std::string id;       // [A-Za-z0-9._-]+, also the run directory name
  std::string path;     // PNG, relative to the manifest's directory
  std::string style;    // free tag
  std::string license;
};

struct DatasetManifest {
  std::string name;
  std::vector<DatasetEntry> entries;
  std::filesystem::path root;  // directory the entry paths are relative to

  std::filesystem::path resolve(const DatasetEntry& e) const { return root / e.path; }
};

/// Every problem with a manifest document, each naming the entry it concerns.
/// Empty when the manifest is valid. Images are decoded to check them.
std::vector<std::string> manifest_violations(const nlohmann::json& doc, const std::filesystem::path& root);

/// Throws Error{ManifestInvalid} listing every violation.
DatasetManifest parse_manifest(const nlohmann::json& doc, const std::filesystem::path& root);
DatasetManifest load_manifest(const std::filesystem::path& path);

nlohmann::json to_json(const DatasetManifest& m);

struct BenchRow {
  std::string id;
  bool is_flat = false;
  double baseline_thinness = 0;
  double pipeline_thinness = 0;
  bool baseline_flagged = false;
  bool pipeline_flagged = false;
  int chosen_index = 0;
  std::string selection_method;
  double wall_time_ms = 0;
};

struct BenchFailure {
  std::string id;
  std::string stage;  // empty when the failure is outside a stage
  std::string message;
};

struct BenchAggregates {
  std::size_t n = 0;
  double flat_fraction = 0;
  double baseline_thin_rate = 0;
  double pipeline_thin_rate = 0;
  double mean_thinness_gain = 0;  // mean of pipeline - baseline thinness
};

struct BenchReport {
  std::string dataset;
  std::vector<BenchRow> rows;  // manifest order
  std::vector<BenchFailure> errors;
  BenchAggregates aggregates;
};

/// Fraction and mean statistics over the rows; all zero for no rows.
BenchAggregates aggregate(std::span<const BenchRow> rows);

struct BenchOptions {
  std::optional<std::size_t> limit;  // first N entries
  int parallelism = 1;
  // One run directory per entry id; empty means a fresh temporary directory.
  std::filesystem::path work_dir;
  pipeline::RunOptions run_options;
};

/// Runs the pipeline on each entry. Failing entries are listed in `errors`
/// and left out of the rows and aggregates; nothing is fatal.
BenchReport run_benchmark(const DatasetManifest& manifest, const pipeline::PipelineConfig& cfg,
                          const BenchOptions& options = {});

enum class ReportFormat { Json, Csv };

nlohmann::json to_json(const BenchReport& report);
/// Json: the versioned report document. Csv: RFC 4180, CRLF line ends, a
/// header row and one row per entry.
std::string write_report(const BenchReport& report, ReportFormat format);

/// Writes `count` procedural flat sprites (icons, outlined cartoons, flat
/// fills) and their manifest.json into `dir`. Deterministic in `seed`.
/// Returns the manifest path.
std::filesystem::path write_procedural_dataset(const std::filesystem::path& dir, int count = 100,
                                               std::uint64_t seed = 2026, int size = 256);

}  // namespace flatlift::bench

// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <filesystem>
#include <json.hpp>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flatlift/backends/backend.hpp"
#include "flatlift/condition/flatness.hpp"
#include "flatlift/core/hash.hpp"
#include "flatlift/core/types.hpp"
#include "flatlift/mesh/geometry.hpp"

namespace flatlift::pipeline {

inline constexpr int kManifestSchema = 1;
inline constexpr std::string_view kManifestFile = "manifest.json";

inline constexpr std::array<std::string_view, 8> kStageNames = {
    "mask", "flatness", "conditions", "caption", "candidates", "select", "shape", "bake"};

struct StageRecord {
  std::string name;
  ContentHash key;  // cache key: stage name, input hashes, config subset
  std::vector<ContentHash> input_hashes;
  std::map<std::string, ContentHash> output_hashes;  // run-directory relative path -> content hash
  nlohmann::json meta = nlohmann::json::object();
  std::string started_at;  // ISO 8601 UTC
  std::string finished_at;
  bool cache_hit = false;
};

struct CallEntry {
  std::string stage;
  backends::BackendCallRecord record;
};

enum class RunStatus : std::uint8_t { Running, Paused, Complete, Failed };

std::string_view to_string(RunStatus status);
std::optional<RunStatus> run_status_from_string(std::string_view name);

struct SelectionInfo {
  int chosen_index = 1;
  SelectionMethod method = SelectionMethod::Vqa;
  std::string rationale;
  int candidate_count = 0;
};

struct RunManifest {
  int schema = kManifestSchema;
  ContentHash run_id;
  ContentHash input_hash;
  nlohmann::json config = nlohmann::json::object();  // identity_json of the run's config
  std::optional<int> override_index;
  RunStatus status = RunStatus::Running;
  std::vector<StageRecord> stages;
  std::vector<CallEntry> backend_calls;
  std::string failed_stage;
  std::string error;

  const StageRecord* stage(std::string_view name) const;
  bool completed(std::string_view name) const { return stage(name) != nullptr; }
  std::size_t call_count(backends::BackendRole role) const;

  // Views over the stage metadata; empty until the stage has run.
  std::optional<SelectionInfo> selection() const;
  std::optional<condition::FlatnessReport> flatness() const;
  std::optional<mesh::ThinnessReport> baseline_thinness() const;
  std::optional<mesh::ThinnessReport> final_thinness() const;
  std::vector<std::string> warnings() const;
};

nlohmann::json to_json(const condition::FlatnessReport& r);
nlohmann::json to_json(const mesh::ThinnessReport& r);
nlohmann::json to_json(const CallEntry& c);

/// Includes the derived "selection", "diagnostics" and "warnings" blocks.
nlohmann::json to_json(const RunManifest& m);
/// Throws Error{ManifestCorrupt} on anything but a well-formed schema-1 manifest.
RunManifest manifest_from_json(const nlohmann::json& doc);

RunManifest read_manifest(const std::filesystem::path& run_dir);
void write_manifest(const std::filesystem::path& run_dir, const RunManifest& m);

/// The manifest without fields that legitimately vary between equivalent
/// runs: timestamps, call latencies and cache_hit flags.
nlohmann::json stable_view(const RunManifest& m);

std::string utc_timestamp();

}  // namespace flatlift::pipeline

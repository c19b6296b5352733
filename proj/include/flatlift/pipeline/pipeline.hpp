// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "flatlift/backends/transport.hpp"
#include "flatlift/pipeline/config.hpp"
#include "flatlift/pipeline/manifest.hpp"

namespace flatlift::pipeline {

struct RunOptions {
  std::optional<int> override_index;  // 1-based; skips the VQA call
  // Stop before this stage (e.g. "select" for interactive review). The
  // manifest is left with status paused and the run can be resumed.
  std::optional<std::string> stop_before;
  // Invoked after each stage is recorded in manifest.json.
  std::function<void(const RunManifest&)> on_stage;
  // Per-role transports that replace the configured or builtin ones.
  std::map<backends::BackendRole, std::shared_ptr<backends::Transport>> transports;
  backends::Sleeper sleep;  // retry backoff; empty sleeps for real
};

/// Identity of a run: the input bytes and the config identity.
ContentHash compute_run_id(std::span<const std::uint8_t> input_png, const PipelineConfig& cfg);

/// Runs all eight stages into `run_dir`, replacing any previous run there.
/// Stage failures throw StageError naming the stage; the partial directory
/// and manifest stay behind for resume(). A malformed input PNG or an
/// invalid config throws before any stage runs.
RunManifest run_pipeline(std::span<const std::uint8_t> input_png, const PipelineConfig& cfg,
                         const std::filesystem::path& run_dir, const RunOptions& options = {});

/// Continues a partial run. Stages whose recorded outputs are still intact
/// are restored (cache_hit) instead of executed, together with their backend
/// call records. The override defaults to the one recorded in the manifest.
/// Throws Error{ManifestCorrupt} or Error{RunMismatch} when cfg or the input
/// no longer hash to the recorded run_id.
RunManifest resume(const std::filesystem::path& run_dir, const PipelineConfig& cfg, const RunOptions& options = {});

/// Whether `name` is a downloadable artifact of the run: a file of the run
/// directory layout (manifest included) that the manifest records.
bool is_run_artifact(const RunManifest& m, std::string_view name);

/// Reconstructs the config a manifest was produced with. Tokens and cache_dir
/// are not recorded, so they come from `secrets_from`.
PipelineConfig config_from_manifest(const RunManifest& m, const PipelineConfig& secrets_from = {});

}  // namespace flatlift::pipeline

// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <map>
#include <string>
#include <string_view>

#include "flatlift/backends/backend.hpp"
#include "flatlift/backends/builtin.hpp"
#include "flatlift/condition/canny.hpp"
#include "flatlift/condition/flatness.hpp"
#include "flatlift/condition/foreground.hpp"
#include "flatlift/mesh/bake.hpp"
#include "flatlift/mesh/geometry.hpp"
#include "flatlift/mesh/inflate.hpp"
#include "flatlift/select/select.hpp"

namespace flatlift::pipeline {

inline constexpr std::string_view kCacheDirEnv = "FLATLIFT_CACHE_DIR";

struct PipelineConfig {
  int n_canny = 2;
  int n_depth = 2;
  std::uint64_t seed = 0;
  // One canny condition and no depth condition, whatever n_canny/n_depth say.
  bool single_condition_mode = false;
  int max_side = kWorkingResolution;
  double thin_threshold = mesh::kDefaultThinThreshold;
  double iou_warning = 0.8;  // proxy vs input silhouette

  condition::CannyParams canny;
  condition::MaskParams mask;
  condition::FlatnessParams flatness;
  mesh::InflateParams inflate;
  mesh::BakeParams bake;
  select::RealismWeights realism;
  double shading_sigma = backends::kShadingSigma;

  // Roles without an endpoint use the builtin implementation.
  std::map<backends::BackendRole, backends::BackendEndpoint> endpoints;
  // Empty disables the stage cache.
  std::filesystem::path cache_dir;

  int effective_n_canny() const { return single_condition_mode ? 1 : n_canny; }
  int effective_n_depth() const { return single_condition_mode ? 0 : n_depth; }
  int candidate_count() const { return effective_n_canny() + effective_n_depth(); }

  backends::BuiltinOptions builtin_options() const;

  /// Throws Error{InvalidConfig}; "at least one condition required" when
  /// there would be no candidates.
  void validate() const;
};

/// Full serialization, including cache_dir and endpoint tokens.
nlohmann::json to_json(const PipelineConfig& cfg);
/// Strict: unknown keys and wrong types throw Error{InvalidConfig}. Missing
/// keys keep their defaults. Does not validate.
PipelineConfig config_from_json(const nlohmann::json& doc);
/// Same structure as the JSON form, as TOML tables.
PipelineConfig config_from_toml(std::string_view text);
PipelineConfig load_config_file(const std::filesystem::path& path);

/// The configuration identity: everything that can change outputs. Omits
/// cache_dir and auth tokens.
nlohmann::json identity_json(const PipelineConfig& cfg);

/// FLATLIFT_CACHE_DIR, when set and non-empty, replaces cache_dir.
void apply_env_overrides(PipelineConfig& cfg);

}  // namespace flatlift::pipeline

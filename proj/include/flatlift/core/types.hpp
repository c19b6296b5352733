// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "flatlift/core/hash.hpp"
#include "flatlift/core/image.hpp"

namespace flatlift {

enum class ConditionKind : std::uint8_t { CannyEdge, Depth };

std::string_view to_string(ConditionKind kind);
/// Wire spelling: "canny" / "depth".
std::string_view wire_name(ConditionKind kind);
std::optional<ConditionKind> condition_kind_from_wire(std::string_view name);

// A single-channel structure guide. Canny maps hold only {0, 255}; depth maps
// span [0, 255] over the foreground (or are constant 128) with a zero background.
struct ConditionMap {
  ConditionKind kind = ConditionKind::CannyEdge;
  RasterImage map{1, 1, Channels::Gray8};
  ContentHash source_hash;
  /// Set when the extractor hit a degenerate input (e.g. a constant image).
  std::string note;
};

enum class CaptionSource : std::uint8_t { Backend, UserProvided };

struct Caption {
  std::string text;
  CaptionSource source = CaptionSource::Backend;

  /// Trims surrounding whitespace; returns nullopt if nothing is left.
  static std::optional<Caption> make(std::string_view text, CaptionSource source);
};

struct CandidateImage {
  RasterImage image{1, 1, Channels::Rgb8};
  ConditionKind condition_kind = ConditionKind::CannyEdge;
  int condition_index = 0;
  std::string backend_id;
  std::uint64_t seed = 0;
};

enum class SelectionMethod : std::uint8_t { Vqa, HeuristicFallback, UserOverride };

std::string_view to_string(SelectionMethod method);
std::optional<SelectionMethod> selection_method_from_string(std::string_view name);

struct ProxyImage {
  RasterImage image{1, 1, Channels::Rgb8};
  int chosen_index = 1;  // 1-based among the candidates
  SelectionMethod method = SelectionMethod::Vqa;
  std::string rationale;
};

}  // namespace flatlift

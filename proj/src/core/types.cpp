// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatlift/core/types.hpp"

namespace flatlift {

std::string_view to_string(ConditionKind kind) {
  return kind == ConditionKind::CannyEdge ? "CannyEdge" : "Depth";
}

std::string_view wire_name(ConditionKind kind) {
  return kind == ConditionKind::CannyEdge ? "canny" : "depth";
}

std::optional<ConditionKind> condition_kind_from_wire(std::string_view name) {
  if (name == "canny") return ConditionKind::CannyEdge;
  if (name == "depth") return ConditionKind::Depth;
  return std::nullopt;
}

std::optional<Caption> Caption::make(std::string_view text, CaptionSource source) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto first = text.find_first_not_of(ws);
  if (first == std::string_view::npos) return std::nullopt;
  const auto last = text.find_last_not_of(ws);
  return Caption{std::string(text.substr(first, last - first + 1)), source};
}

std::string_view to_string(SelectionMethod method) {
  switch (method) {
    case SelectionMethod::Vqa: return "Vqa";
    case SelectionMethod::HeuristicFallback: return "HeuristicFallback";
    case SelectionMethod::UserOverride: return "UserOverride";
  }
  return "?";
}

std::optional<SelectionMethod> selection_method_from_string(std::string_view name) {
  if (name == "Vqa") return SelectionMethod::Vqa;
  if (name == "HeuristicFallback") return SelectionMethod::HeuristicFallback;
  if (name == "UserOverride") return SelectionMethod::UserOverride;
  return std::nullopt;
}

}  // namespace flatlift

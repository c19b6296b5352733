// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>

#include "flatlift/backends/backend.hpp"
#include "flatlift/condition/foreground.hpp"
#include "flatlift/core/types.hpp"

namespace flatlift::select {

inline constexpr std::string_view kRealismQuestion =
    "Which image do you think is the most realistic and shows the most 3D feeling?";

inline constexpr int kGradientBins = 32;
inline constexpr double kGradientBinWidth = 8.0;  // luma units per pixel

struct RealismWeights {
  double shading = 1.0;
  double entropy = 4.0;
};

struct RealismScore {
  double shading_term = 0;      // pixel-weighted within-colour-cluster luma stddev
  // Bits, over kGradientBins gradient-magnitude bins of the foreground pixels
  // whose whole Sobel stencil lies in the foreground.
  double gradient_entropy = 0;
  double total = 0;
};

/// The realism question plus " Answer with a single number from 1 to {n}.".
/// Throws Error{InvalidArgument} for n < 1.
std::string build_vqa_question(int n);

/// First decimal integer token in [1, n]. Negative numbers and decimal
/// fractions are not integer tokens. Throws Error{Unparseable}.
int parse_vqa_answer(std::string_view text, int n);

/// Throws Error{EmptyForeground}; the mask must match the image size.
RealismScore realism_score(const RasterImage& img, const condition::ForegroundMask& mask,
                           const RealismWeights& weights = {});

/// 1-based index of the largest value; ties go to the lowest index.
int argmax_index(std::span<const double> values);

/// Override, else one VQA call over all candidates, else the realism
/// heuristic. `vqa` may be null. Throws Error{NoCandidates} and, for an
/// out-of-range override, Error{InvalidArgument}.
ProxyImage select_proxy(std::span<const CandidateImage> candidates, backends::VqaBackend* vqa,
                        const condition::ForegroundMask& mask, std::optional<int> override_index = std::nullopt,
                        const RealismWeights& weights = {});

}  // namespace flatlift::select

// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "flatlift/condition/foreground.hpp"
#include "flatlift/core/types.hpp"
#include "flatlift/kernels/plane.hpp"

namespace flatlift::condition {

/// Affinely rescales foreground values to [0, 255] (rounded), optionally
/// inverts them (v -> 255 - v), then zeroes the background. A single-valued
/// foreground maps to 128. Near-bright is the default convention.
/// Throws Error{DimensionMismatch} if raw and mask differ in size.
ConditionMap normalize_depth(const RasterImage& raw, const ForegroundMask& mask, bool invert = false);

/// Euclidean distance (pixels) from each foreground pixel to the nearest
/// background pixel; pixels outside the image count as background. Background is 0.
kernels::Plane<double> foreground_distance(const ForegroundMask& mask);

/// Offline depth source: the mask's distance transform, shaped by
/// (D / D_max)^(1 / (variant + 1)), then normalized. Variant 0 is the linear
/// profile; higher variants bulge more.
ConditionMap builtin_depth(const ForegroundMask& mask, int variant = 0);

}  // namespace flatlift::condition

// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "flatlift/core/image.hpp"

namespace flatlift::condition {

// Binary subject/canvas separation. `mask` is Gray8 holding only {0, 255}.
struct ForegroundMask {
  RasterImage mask{1, 1, Channels::Gray8};
  double coverage = 0;  // fraction of 255 pixels

  bool contains(int x, int y) const { return mask.at(x, y) != 0; }

  /// Wraps a Gray8 image; nonzero pixels are foreground. Throws
  /// Error{InvalidArgument} for other channel layouts.
  static ForegroundMask from_image(const RasterImage& mask);
};

struct MaskParams {
  double background_tolerance = 20.0;  // Euclidean RGB distance
  int alpha_threshold = 128;
};

/// Alpha images: foreground = alpha >= 128. Otherwise the majority colour of
/// the four corners (ties: smallest RGB triple) is flood-filled, 4-connected,
/// from every border pixel within the tolerance; the complement is foreground.
ForegroundMask foreground_mask(const RasterImage& img, const MaskParams& params = {});

/// Intersection over union of two equally sized masks (1 when both are empty).
double mask_iou(const ForegroundMask& a, const ForegroundMask& b);

}  // namespace flatlift::condition

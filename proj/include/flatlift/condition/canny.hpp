// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>

#include "flatlift/core/image.hpp"
#include "flatlift/core/types.hpp"
#include "flatlift/kernels/plane.hpp"

namespace flatlift::condition {

// Gradient magnitudes are reported in [0, 255] (Sobel response divided by
// 4*sqrt(2)), so manual thresholds live on the same scale as pixel values.
struct CannyParams {
  double gaussian_sigma = 1.4;
  std::optional<double> low_threshold;
  std::optional<double> high_threshold;
  // Missing thresholds are derived: high by Otsu over the nonzero suppressed
  // magnitudes, low = 0.4 * high. With auto_threshold off both must be set.
  bool auto_threshold = true;

  /// Throws Error{InvalidConfig}.
  void validate() const;
};

struct CannyThresholds {
  double low = 0;
  double high = 0;
};

/// Blur, Sobel and non-maximum suppression; zero where suppressed.
kernels::Plane<double> suppressed_gradient(const RasterImage& img, double sigma);

/// Otsu split over a 256-bin histogram of the nonzero values (bin = floor(v)).
/// Returns the lower bound of the upper class; nullopt if no value is nonzero.
std::optional<double> otsu_threshold(std::span<const double> values);

/// Keeps strong pixels (>= high) and weak pixels (>= low) that are
/// 8-connected, possibly transitively, to a strong one. Output is {0, 255}.
RasterImage hysteresis(const kernels::Plane<double>& suppressed, CannyThresholds t);

/// Full Canny detector. A constant image yields an all-zero map with
/// ConditionMap::note set instead of an error.
ConditionMap canny_edges(const RasterImage& img, const CannyParams& params = {});

}  // namespace flatlift::condition

// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "flatlift/condition/foreground.hpp"
#include "flatlift/kernels/plane.hpp"

namespace flatlift::condition {

struct FlatnessParams {
  double gradient_tau = 8.0;       // luma units per pixel
  int max_colors = 32;             // K_colors
  double min_flat_fraction = 0.85; // F_min
};

struct FlatnessReport {
  int distinct_color_count = 0;   // 4-bit/channel quantized, foreground only
  double flat_pixel_fraction = 0; // foreground pixels with gradient < tau
  double shading_score = 0;       // see cluster_shading()
  bool is_flat = false;
};

/// Luminance gradient magnitude in luma units per pixel (3x3 Sobel / 8,
/// replicated borders). Computed exactly in integers before the final sqrt,
/// so mirrored images give mirrored fields bit for bit.
kernels::Plane<double> luma_gradient(const RasterImage& img);

/// 4-bit-per-channel colour key of a pixel.
inline int quantized_color(Rgb8 c) { return ((c[0] >> 4) << 8) | ((c[1] >> 4) << 4) | (c[2] >> 4); }

/// Mean over foreground pixels of the luma standard deviation of the
/// quantized-colour cluster each pixel belongs to (pixel-weighted).
/// Returns 0 for an empty foreground.
double cluster_shading(const RasterImage& img, const ForegroundMask& mask);

/// Throws Error{EmptyForeground} when the mask covers nothing.
FlatnessReport flatness_report(const RasterImage& img, const ForegroundMask& mask,
                               const FlatnessParams& params = {});

}  // namespace flatlift::condition

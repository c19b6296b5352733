// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatlift/condition/depth.hpp"

#include <algorithm>
#include <cmath>

#include "flatlift/core/error.hpp"
#include "flatlift/core/png.hpp"
#include "flatlift/kernels/kernels.hpp"

namespace flatlift::condition {

ConditionMap normalize_depth(const RasterImage& raw, const ForegroundMask& mask, bool invert) {
  if (raw.width() != mask.mask.width() || raw.height() != mask.mask.height()) {
    throw Error(ErrorKind::DimensionMismatch, "depth map and mask sizes differ");
  }
  const RasterImage gray = raw.channels() == Channels::Gray8 ? raw : [&] {
    RasterImage g(raw.width(), raw.height(), Channels::Gray8);
    for (int y = 0; y < raw.height(); ++y)
      for (int x = 0; x < raw.width(); ++x) g.set_rgb(x, y, raw.rgb(x, y));
    return g;
  }();

  int lo = 256, hi = -1;
  for (int y = 0; y < gray.height(); ++y) {
    for (int x = 0; x < gray.width(); ++x) {
      if (!mask.contains(x, y)) continue;
      lo = std::min<int>(lo, gray.at(x, y));
      hi = std::max<int>(hi, gray.at(x, y));
    }
  }

  ConditionMap out;
  out.kind = ConditionKind::Depth;
  out.source_hash = image_hash(raw);
  out.map = RasterImage(gray.width(), gray.height(), Channels::Gray8);
  if (hi < 0) {
    out.note = "empty foreground: depth map is all background";
    return out;
  }
  for (int y = 0; y < gray.height(); ++y) {
    for (int x = 0; x < gray.width(); ++x) {
      if (!mask.contains(x, y)) continue;
      long v = 128;
      if (hi > lo) v = std::lround((gray.at(x, y) - lo) * 255.0 / (hi - lo));
      if (invert) v = 255 - v;
      out.map.at(x, y) = static_cast<std::uint8_t>(v);
    }
  }
  if (hi == lo) out.note = "single-valued foreground mapped to 128";
  return out;
}

kernels::Plane<double> foreground_distance(const ForegroundMask& mask) {
  kernels::Plane<std::uint8_t> seeds(mask.mask.width(), mask.mask.height());
  for (int y = 0; y < seeds.height; ++y)
    for (int x = 0; x < seeds.width; ++x) seeds.at(x, y) = mask.contains(x, y) ? 0 : 1;
  auto d2 = kernels::omp::squared_distance(seeds, /*outside_is_seed=*/true);
  for (double& v : d2.data) v = std::sqrt(v);
  return d2;
}

ConditionMap builtin_depth(const ForegroundMask& mask, int variant) {
  const auto dist = foreground_distance(mask);
  const double dmax = dist.data.empty() ? 0.0 : *std::max_element(dist.data.begin(), dist.data.end());
  const double exponent = 1.0 / (std::max(variant, 0) + 1);
  RasterImage raw(mask.mask.width(), mask.mask.height(), Channels::Gray8);
  if (dmax > 0) {
    for (int y = 0; y < raw.height(); ++y) {
      for (int x = 0; x < raw.width(); ++x) {
        const double t = std::pow(dist.at(x, y) / dmax, exponent);
        raw.at(x, y) = static_cast<std::uint8_t>(std::lround(255.0 * t));
      }
    }
  }
  return normalize_depth(raw, mask, /*invert=*/false);
}

}  // namespace flatlift::condition

// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatlift/condition/canny.hpp"

#include <array>
#include <cmath>
#include <deque>

#include "flatlift/core/error.hpp"
#include "flatlift/core/png.hpp"
#include "flatlift/kernels/kernels.hpp"

namespace flatlift::condition {

void CannyParams::validate() const {
  if (!(gaussian_sigma > 0) || !std::isfinite(gaussian_sigma)) {
    throw Error(ErrorKind::InvalidConfig, "canny.gaussian_sigma must be > 0");
  }
  for (const auto& t : {low_threshold, high_threshold}) {
    if (t && (*t < 0 || *t > 255)) {
      throw Error(ErrorKind::InvalidConfig, "canny thresholds must lie in [0, 255]");
    }
  }
  if (low_threshold && high_threshold && !(*low_threshold < *high_threshold)) {
    throw Error(ErrorKind::InvalidConfig, "canny.low_threshold must be < canny.high_threshold");
  }
  if (!auto_threshold && (!low_threshold || !high_threshold)) {
    throw Error(ErrorKind::InvalidConfig, "canny thresholds are required when auto_threshold is false");
  }
}

kernels::Plane<double> suppressed_gradient(const RasterImage& img, double sigma) {
  const auto taps = kernels::gaussian_taps_fixed(sigma);
  std::int64_t window = taps[0];
  for (std::size_t i = 1; i < taps.size(); ++i) window += 2 * taps[i];
  // luma is x1000 and each blur pass multiplies by the window sum
  const double scale = 1000.0 * static_cast<double>(window) * static_cast<double>(window);

  const auto luma = kernels::omp::luma_milli(img);
  const auto blurred = kernels::omp::blur_fixed(luma, taps);
  const auto gradient = kernels::omp::sobel(blurred, scale);
  return kernels::omp::non_max_suppression(gradient);
}

std::optional<double> otsu_threshold(std::span<const double> values) {
  std::array<double, 256> hist{};
  double count = 0;
  for (double v : values) {
    if (v <= 0) continue;
    hist[static_cast<std::size_t>(std::min(255.0, std::floor(v)))] += 1;
    count += 1;
  }
  if (count == 0) return std::nullopt;

  double total_sum = 0;
  int lowest = -1;
  for (int b = 0; b < 256; ++b) {
    total_sum += b * hist[b];
    if (lowest < 0 && hist[b] > 0) lowest = b;
  }
  double w0 = 0, sum0 = 0, best = -1;
  int best_t = -1;
  for (int t = 0; t < 255; ++t) {
    w0 += hist[t];
    sum0 += t * hist[t];
    const double w1 = count - w0;
    if (w0 == 0 || w1 == 0) continue;
    const double mu0 = sum0 / w0, mu1 = (total_sum - sum0) / w1;
    const double between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    if (between > best) {
      best = between;
      best_t = t;
    }
  }
  // a single occupied bin: everything is strong
  if (best_t < 0) return static_cast<double>(lowest);
  return static_cast<double>(best_t + 1);
}

RasterImage hysteresis(const kernels::Plane<double>& suppressed, CannyThresholds t) {
  const int w = suppressed.width, h = suppressed.height;
  RasterImage out(w, h, Channels::Gray8);
  std::deque<std::pair<int, int>> queue;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double v = suppressed.at(x, y);
      if (v > 0 && v >= t.high) {
        out.at(x, y) = 255;
        queue.emplace_back(x, y);
      }
    }
  }
  while (!queue.empty()) {
    const auto [x, y] = queue.front();
    queue.pop_front();
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int nx = x + dx, ny = y + dy;
        if ((dx == 0 && dy == 0) || nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        if (out.at(nx, ny) != 0) continue;
        const double v = suppressed.at(nx, ny);
        if (v > 0 && v >= t.low) {
          out.at(nx, ny) = 255;
          queue.emplace_back(nx, ny);
        }
      }
    }
  }
  return out;
}

ConditionMap canny_edges(const RasterImage& img, const CannyParams& params) {
  params.validate();
  ConditionMap result;
  result.kind = ConditionKind::CannyEdge;
  result.source_hash = image_hash(img);

  const auto suppressed = suppressed_gradient(img, params.gaussian_sigma);
  const auto otsu = otsu_threshold(suppressed.data);
  if (!otsu) {
    result.map = RasterImage(img.width(), img.height(), Channels::Gray8);
    result.note = "degenerate input: no nonzero gradients, edge map is empty";
    return result;
  }
  CannyThresholds t;
  t.high = params.high_threshold.value_or(*otsu);
  t.low = params.low_threshold.value_or(0.4 * t.high);
  result.map = hysteresis(suppressed, t);
  return result;
}

}  // namespace flatlift::condition

// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatlift/condition/flatness.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <set>

#include "flatlift/core/error.hpp"
#include "flatlift/kernels/kernels.hpp"

namespace flatlift::condition {

kernels::Plane<double> luma_gradient(const RasterImage& img) {
  const auto luma = kernels::omp::luma_milli(img);
  kernels::Plane<std::int64_t> wide(luma.width, luma.height);
  for (std::size_t i = 0; i < luma.data.size(); ++i) wide.data[i] = luma.data[i];
  // sobel() divides by 4*sqrt(2)*scale; we want |grad| / (8 * 1000)
  return kernels::omp::sobel(wide, 1000.0 * std::sqrt(2.0)).magnitude;
}

double cluster_shading(const RasterImage& img, const ForegroundMask& mask) {
  struct Acc {
    std::int64_t n = 0;
    std::int64_t sum = 0;
    // luma_milli^2 reaches 6.5e10, so sums of squares need 128 bits for big clusters
    __int128 sum_sq = 0;
  };
  std::map<int, Acc> clusters;
  std::int64_t total = 0;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (!mask.contains(x, y)) continue;
      const Rgb8 c = img.rgb(x, y);
      const std::int64_t l = luma_milli(c);
      Acc& a = clusters[quantized_color(c)];
      a.n += 1;
      a.sum += l;
      a.sum_sq += static_cast<__int128>(l) * l;
      ++total;
    }
  }
  if (total == 0) return 0.0;
  double weighted = 0;
  for (const auto& [key, a] : clusters) {
    // n^2 * variance, exact in integers
    const __int128 scaled_var = static_cast<__int128>(a.n) * a.sum_sq - static_cast<__int128>(a.sum) * a.sum;
    const double stddev_milli = std::sqrt(static_cast<double>(scaled_var)) / static_cast<double>(a.n);
    weighted += static_cast<double>(a.n) * (stddev_milli / 1000.0);
  }
  return weighted / static_cast<double>(total);
}

FlatnessReport flatness_report(const RasterImage& img, const ForegroundMask& mask, const FlatnessParams& params) {
  if (mask.coverage <= 0) throw Error(ErrorKind::EmptyForeground, "flatness needs a non-empty foreground");
  if (img.width() != mask.mask.width() || img.height() != mask.mask.height()) {
    throw Error(ErrorKind::DimensionMismatch, "image and mask sizes differ");
  }
  const auto grad = luma_gradient(img);
  std::set<int> colors;
  std::size_t fg = 0, flat = 0;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (!mask.contains(x, y)) continue;
      ++fg;
      colors.insert(quantized_color(img.rgb(x, y)));
      if (grad.at(x, y) < params.gradient_tau) ++flat;
    }
  }
  FlatnessReport r;
  r.distinct_color_count = static_cast<int>(colors.size());
  r.flat_pixel_fraction = static_cast<double>(flat) / static_cast<double>(fg);
  r.shading_score = cluster_shading(img, mask);
  r.is_flat = r.distinct_color_count <= params.max_colors && r.flat_pixel_fraction >= params.min_flat_fraction;
  return r;
}

}  // namespace flatlift::condition

// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatlift/condition/foreground.hpp"

#include <algorithm>
#include <array>
#include <vector>

#include "flatlift/core/error.hpp"

namespace flatlift::condition {

namespace {

double coverage_of(const RasterImage& mask) {
  std::size_t on = 0;
  for (std::uint8_t v : mask.data()) on += v != 0;
  return static_cast<double>(on) / static_cast<double>(mask.pixel_count());
}

Rgb8 corner_majority(const RasterImage& img) {
  const int w = img.width() - 1, h = img.height() - 1;
  std::array<Rgb8, 4> corners = {img.rgb(0, 0), img.rgb(w, 0), img.rgb(0, h), img.rgb(w, h)};
  Rgb8 best = corners[0];
  int best_count = 0;
  for (const Rgb8& c : corners) {
    const int n = static_cast<int>(std::count(corners.begin(), corners.end(), c));
    if (n > best_count || (n == best_count && c < best)) {
      best = c;
      best_count = n;
    }
  }
  return best;
}

}  // namespace

ForegroundMask ForegroundMask::from_image(const RasterImage& mask) {
  if (mask.channels() != Channels::Gray8) {
    throw Error(ErrorKind::InvalidArgument, "foreground mask must be a gray8 image");
  }
  ForegroundMask out;
  out.mask = RasterImage(mask.width(), mask.height(), Channels::Gray8);
  auto dst = out.mask.mutable_data();
  auto src = mask.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] ? 255 : 0;
  out.coverage = coverage_of(out.mask);
  return out;
}

ForegroundMask foreground_mask(const RasterImage& img, const MaskParams& params) {
  const int w = img.width(), h = img.height();
  ForegroundMask out;
  out.mask = RasterImage(w, h, Channels::Gray8);

  if (img.has_alpha()) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) out.mask.at(x, y) = img.at(x, y, 3) >= params.alpha_threshold ? 255 : 0;
    }
    out.coverage = coverage_of(out.mask);
    return out;
  }

  const Rgb8 bg = corner_majority(img);
  const double tol2 = params.background_tolerance * params.background_tolerance;
  auto is_bg_colour = [&](int x, int y) {
    const Rgb8 c = img.rgb(x, y);
    double d2 = 0;
    for (int k = 0; k < 3; ++k) {
      const double d = static_cast<double>(c[k]) - bg[k];
      d2 += d * d;
    }
    return d2 <= tol2;
  };

  std::vector<std::uint8_t> background(static_cast<std::size_t>(w) * h, 0);
  std::vector<std::pair<int, int>> stack;
  auto seed = [&](int x, int y) {
    const std::size_t i = static_cast<std::size_t>(y) * w + x;
    if (!background[i] && is_bg_colour(x, y)) {
      background[i] = 1;
      stack.emplace_back(x, y);
    }
  };
  for (int x = 0; x < w; ++x) {
    seed(x, 0);
    seed(x, h - 1);
  }
  for (int y = 0; y < h; ++y) {
    seed(0, y);
    seed(w - 1, y);
  }
  while (!stack.empty()) {
    const auto [x, y] = stack.back();
    stack.pop_back();
    if (x > 0) seed(x - 1, y);
    if (x + 1 < w) seed(x + 1, y);
    if (y > 0) seed(x, y - 1);
    if (y + 1 < h) seed(x, y + 1);
  }
  auto dst = out.mask.mutable_data();
  for (std::size_t i = 0; i < background.size(); ++i) dst[i] = background[i] ? 0 : 255;
  out.coverage = coverage_of(out.mask);
  return out;
}

double mask_iou(const ForegroundMask& a, const ForegroundMask& b) {
  if (a.mask.width() != b.mask.width() || a.mask.height() != b.mask.height()) {
    throw Error(ErrorKind::DimensionMismatch, "mask_iou requires equally sized masks");
  }
  std::size_t inter = 0, uni = 0;
  auto da = a.mask.data(), db = b.mask.data();
  for (std::size_t i = 0; i < da.size(); ++i) {
    inter += (da[i] && db[i]);
    uni += (da[i] || db[i]);
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace flatlift::condition

// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#include "row_ops.hpp"

namespace flatlift::kernels::omp {

Plane<std::int32_t> luma_milli(const RasterImage& img) {
  Plane<std::int32_t> out(img.width(), img.height());
#pragma omp parallel for schedule(static)
  for (int y = 0; y < img.height(); ++y) detail::luma_row(img, out, y);
  return out;
}

Plane<std::int64_t> blur_fixed(const Plane<std::int32_t>& in, std::span<const std::int64_t> taps) {
  Plane<std::int64_t> tmp(in.width, in.height), out(in.width, in.height);
#pragma omp parallel
  {
#pragma omp for schedule(static)
    for (int y = 0; y < in.height; ++y) detail::blur_row_h(in, tmp, y, taps);
#pragma omp for schedule(static)
    for (int y = 0; y < in.height; ++y) detail::blur_row_v(tmp, out, y, taps);
  }
  return out;
}

Gradient sobel(const Plane<std::int64_t>& in, double scale) {
  Gradient g{Plane<double>(in.width, in.height), Plane<std::uint8_t>(in.width, in.height)};
#pragma omp parallel for schedule(static)
  for (int y = 0; y < in.height; ++y) detail::sobel_row(in, g, y, scale);
  return g;
}

Plane<double> non_max_suppression(const Gradient& g) {
  Plane<double> out(g.magnitude.width, g.magnitude.height);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < out.height; ++y) detail::nms_row(g, out, y);
  return out;
}

Plane<double> squared_distance(const Plane<std::uint8_t>& seeds, bool outside_is_seed) {
  const int pad = outside_is_seed ? 1 : 0;
  const int w = seeds.width + 2 * pad, h = seeds.height + 2 * pad;
  Plane<double> grid(w, h, outside_is_seed ? 0.0 : detail::kBig);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < seeds.height; ++y) {
    for (int x = 0; x < seeds.width; ++x) {
      grid.at(x + pad, y + pad) = seeds.at(x, y) ? 0.0 : detail::kBig;
    }
  }
  const int n = std::max(w, h);
#pragma omp parallel
  {
    std::vector<int> v(n);
    std::vector<double> z(n + 1), f(n), d(n);
#pragma omp for schedule(static)
    for (int x = 0; x < w; ++x) {
      for (int y = 0; y < h; ++y) f[y] = grid.at(x, y);
      detail::distance_1d(f.data(), d.data(), h, v, z);
      for (int y = 0; y < h; ++y) grid.at(x, y) = d[y];
    }
#pragma omp for schedule(static)
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) f[x] = grid.at(x, y);
      detail::distance_1d(f.data(), d.data(), w, v, z);
      for (int x = 0; x < w; ++x) grid.at(x, y) = d[x];
    }
  }
  Plane<double> out(seeds.width, seeds.height);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < seeds.height; ++y) {
    for (int x = 0; x < seeds.width; ++x) {
      const double dist = grid.at(x + pad, y + pad);
      out.at(x, y) = dist >= detail::kBig * 0.5 ? std::numeric_limits<double>::infinity() : dist;
    }
  }
  return out;
}

Plane<double> blur(const Plane<double>& in, std::span<const double> taps) {
  Plane<double> tmp(in.width, in.height), out(in.width, in.height);
#pragma omp parallel
  {
#pragma omp for schedule(static)
    for (int y = 0; y < in.height; ++y) detail::blur_row_h(in, tmp, y, taps);
#pragma omp for schedule(static)
    for (int y = 0; y < in.height; ++y) detail::blur_row_v(tmp, out, y, taps);
  }
  return out;
}

// Row-parallel: each thread owns whole scanlines and walks every triangle
// whose bounds cover them, so no two threads touch the same buffer cell.
Plane<double> rasterize_depth(std::span<const ScreenTriangle> tris, int size) {
  Plane<double> out(size, size, kFarDepth);
  std::vector<detail::TriSetup> setups(tris.size());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < tris.size(); ++i) setups[i] = detail::setup_triangle(tris[i], size);

  std::vector<std::vector<std::uint32_t>> rows(size);
  for (std::size_t i = 0; i < tris.size(); ++i) {
    if (!setups[i].valid) continue;
    for (int y = setups[i].y0; y <= setups[i].y1; ++y) rows[y].push_back(static_cast<std::uint32_t>(i));
  }
#pragma omp parallel for schedule(dynamic, 8)
  for (int y = 0; y < size; ++y) {
    for (std::uint32_t i : rows[y]) detail::raster_span(tris[i], setups[i], y, out);
  }
  return out;
}

}  // namespace flatlift::kernels::omp

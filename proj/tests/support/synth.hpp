// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Analytic test images and brute-force oracles. Nothing here calls into the
// library's algorithms, so the tests stay independent of the code they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "flatlift/core/image.hpp"
#include "flatlift/core/mesh.hpp"

namespace flatlift::testing {

inline RasterImage constant_image(int w, int h, Rgb8 c) {
  RasterImage img(w, h, Channels::Rgb8);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img.set_rgb(x, y, c);
  return img;
}

// Left half (x < w/2) black, right half white.
inline RasterImage step_image(int w, int h) {
  RasterImage img(w, h, Channels::Gray8);
  for (int y = 0; y < h; ++y)
    for (int x = w / 2; x < w; ++x) img.at(x, y) = 255;
  return img;
}

// Pixel (x, y) is inside iff (x - cx)^2 + (y - cy)^2 <= r^2 (pixel indices as centres).
inline bool in_disk(int x, int y, double cx, double cy, double r) {
  const double dx = x - cx, dy = y - cy;
  return dx * dx + dy * dy <= r * r;
}

inline RasterImage disk_image(int size, double r, Rgb8 fg, Rgb8 bg) {
  RasterImage img(size, size, Channels::Rgb8);
  const double c = size / 2.0;
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) img.set_rgb(x, y, in_disk(x, y, c, c, r) ? fg : bg);
  return img;
}

inline RasterImage disk_mask_image(int size, double r) {
  RasterImage img(size, size, Channels::Gray8);
  const double c = size / 2.0;
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) img.at(x, y) = in_disk(x, y, c, c, r) ? 255 : 0;
  return img;
}

// Lambertian sphere, white albedo, light from the upper left, ambient 0.1,
// on a black canvas.
inline RasterImage lambert_sphere(int size, double r, Rgb8 bg = {0, 0, 0}) {
  RasterImage img(size, size, Channels::Rgb8);
  const double c = size / 2.0;
  const double lx = -0.5, ly = -0.5, lz = std::sqrt(0.5);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      if (!in_disk(x, y, c, c, r)) {
        img.set_rgb(x, y, bg);
        continue;
      }
      const double nx = (x - c) / r, ny = (y - c) / r;
      const double nz = std::sqrt(std::max(0.0, 1.0 - nx * nx - ny * ny));
      const double s = 0.1 + 0.9 * std::max(0.0, nx * lx + ny * ly + nz * lz);
      const auto v = static_cast<std::uint8_t>(std::lround(255.0 * s));
      img.set_rgb(x, y, {v, v, v});
    }
  }
  return img;
}

// Flat cartoon: white canvas, black outlined disk split into two flat fills.
// Exactly 3 quantized foreground colours, no interior gradients.
inline RasterImage cartoon_image(int size) {
  RasterImage img = constant_image(size, size, {255, 255, 255});
  const double c = size / 2.0, r = size * 0.42;
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      if (!in_disk(x, y, c, c, r)) continue;
      if (!in_disk(x, y, c, c, r - 2)) img.set_rgb(x, y, {0, 0, 0});
      else img.set_rgb(x, y, y < c ? Rgb8{220, 60, 40} : Rgb8{40, 90, 200});
    }
  }
  return img;
}

inline RasterImage random_image(std::mt19937_64& rng, int w, int h, Channels ch) {
  RasterImage img(w, h, ch);
  std::uniform_int_distribution<int> byte(0, 255);
  for (auto& v : img.mutable_data()) v = static_cast<std::uint8_t>(byte(rng));
  return img;
}

// Random piecewise-constant image made of a few rectangles; good Canny input.
inline RasterImage random_blocks(std::mt19937_64& rng, int w, int h, int max_value = 255) {
  RasterImage img(w, h, Channels::Gray8);
  std::uniform_int_distribution<int> val(0, max_value), px(0, w - 1), py(0, h - 1), count(2, 6);
  const int n = count(rng);
  for (auto& v : img.mutable_data()) v = static_cast<std::uint8_t>(val(rng));
  for (int i = 0; i < n; ++i) {
    int x0 = px(rng), x1 = px(rng), y0 = py(rng), y1 = py(rng);
    if (x0 > x1) std::swap(x0, x1);
    if (y0 > y1) std::swap(y0, y1);
    const auto v = static_cast<std::uint8_t>(val(rng));
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) img.at(x, y) = v;
  }
  return img;
}

inline RasterImage rotate90(const RasterImage& img) {
  // (x, y) -> (h - 1 - y, x)
  RasterImage out(img.height(), img.width(), img.channels());
  const int cc = img.channel_count();
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      for (int c = 0; c < cc; ++c) out.at(img.height() - 1 - y, x, c) = img.at(x, y, c);
  return out;
}

inline RasterImage mirror_x(const RasterImage& img) {
  RasterImage out(img.width(), img.height(), img.channels());
  const int cc = img.channel_count();
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      for (int c = 0; c < cc; ++c) out.at(img.width() - 1 - x, y, c) = img.at(x, y, c);
  return out;
}

// Brute-force Euclidean distance from (x, y) to the nearest pixel where
// is_seed holds, scanning the whole grid (and, optionally, the one-pixel ring
// outside it).
template <typename Pred>
double brute_distance(int x, int y, int w, int h, Pred is_seed, bool outside_is_seed) {
  double best = std::numeric_limits<double>::infinity();
  const int lo = outside_is_seed ? -1 : 0;
  for (int yy = lo; yy < h - lo; ++yy) {
    for (int xx = lo; xx < w - lo; ++xx) {
      const bool outside = xx < 0 || yy < 0 || xx >= w || yy >= h;
      if (outside ? !outside_is_seed : !is_seed(xx, yy)) continue;
      best = std::min(best, std::hypot(double(xx - x), double(yy - y)));
    }
  }
  return best;
}

inline TriMesh box_corners(double sx, double sy, double sz) {
  TriMesh m;
  for (int i = 0; i < 8; ++i) m.vertices.push_back({(i & 1) * sx, ((i >> 1) & 1) * sy, ((i >> 2) & 1) * sz});
  // 12 triangles of the box surface
  const std::uint32_t f[12][3] = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 4}, {1, 5, 4},
                                  {2, 6, 3}, {3, 6, 7}, {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};
  for (auto& t : f) m.triangles.push_back({t[0], t[1], t[2]});
  return m;
}

inline std::filesystem::path fixture_dir() { return FLATLIFT_FIXTURE_DIR; }

inline std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("flatlift_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace flatlift::testing

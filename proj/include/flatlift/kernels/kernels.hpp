// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Data-parallel image and raster kernels.
//
// Every kernel exists twice with identical signatures: `serial::` is the
// straightforward reference and `omp::` the OpenMP version used in
// production. Both must return bit-identical results; the unit tests and the
// benchmark target compare them directly.

#include <cstdint>
#include <span>
#include <vector>

#include "flatlift/core/image.hpp"
#include "flatlift/kernels/plane.hpp"

namespace flatlift::kernels {

/// Integer Gaussian taps for radius ceil(3 sigma), centre first:
/// w[i] = round(4096 * exp(-i^2 / (2 sigma^2))).
std::vector<std::int64_t> gaussian_taps_fixed(double sigma);

/// Double-precision Gaussian taps (radius ceil(3 sigma), centre first), summing to 1
/// over the full symmetric window.
std::vector<double> gaussian_taps(double sigma);

// Gradient direction bins (quantized modulo 180 degrees).
enum Direction : std::uint8_t { kDir0 = 0, kDir45 = 1, kDir90 = 2, kDir135 = 3 };

struct Gradient {
  Plane<double> magnitude;       // scaled to [0, 255]
  Plane<std::uint8_t> direction; // Direction
};

// Screen-space triangle for depth rasterization. Coordinates are in pixel
// units with pixel (i, j) centred at (i + 0.5, j + 0.5); smaller depth is nearer.
struct ScreenTriangle {
  double x[3];
  double y[3];
  double depth[3];
};

constexpr double kFarDepth = 1e300;

namespace serial {

// Rec.601 luma times 1000 for every pixel (alpha ignored).
Plane<std::int32_t> luma_milli(const RasterImage& img);
// Separable blur with replicated borders; output scale is (sum of full window)^2.
Plane<std::int64_t> blur_fixed(const Plane<std::int32_t>& in, std::span<const std::int64_t> taps);
// 3x3 Sobel on an exact integer field; magnitude = hypot(gx, gy) / (4 sqrt2 * scale).
Gradient sobel(const Plane<std::int64_t>& in, double scale);
// Keeps a pixel iff it beats the neighbour behind it along its direction and
// ties or beats the one ahead. Suppressed pixels become 0.
Plane<double> non_max_suppression(const Gradient& g);
// Squared Euclidean distance from each pixel to the nearest seed (nonzero)
// pixel. With outside_is_seed the ring just outside the image counts as seed.
// Pixels with no reachable seed get +infinity.
Plane<double> squared_distance(const Plane<std::uint8_t>& seeds, bool outside_is_seed);
// Separable Gaussian blur of a real field with replicated borders.
Plane<double> blur(const Plane<double>& in, std::span<const double> taps);
// size x size depth buffer; front-most (minimum) depth wins, top-left fill rule.
Plane<double> rasterize_depth(std::span<const ScreenTriangle> tris, int size);

}  // namespace serial

// Same contracts as serial::.
namespace omp {

Plane<std::int32_t> luma_milli(const RasterImage& img);
Plane<std::int64_t> blur_fixed(const Plane<std::int32_t>& in, std::span<const std::int64_t> taps);
Gradient sobel(const Plane<std::int64_t>& in, double scale);
Plane<double> non_max_suppression(const Gradient& g);
Plane<double> squared_distance(const Plane<std::uint8_t>& seeds, bool outside_is_seed);
Plane<double> blur(const Plane<double>& in, std::span<const double> taps);
Plane<double> rasterize_depth(std::span<const ScreenTriangle> tris, int size);

}  // namespace omp

}  // namespace flatlift::kernels

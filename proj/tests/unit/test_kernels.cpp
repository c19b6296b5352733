// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include "doctest.h"
#include "flatlift/kernels/kernels.hpp"
#include "support/synth.hpp"

using namespace flatlift;
namespace fk = flatlift::kernels;

namespace {

fk::Plane<std::uint8_t> random_seeds(std::mt19937_64& rng, int w, int h, double density) {
  fk::Plane<std::uint8_t> p(w, h);
  std::bernoulli_distribution on(density);
  for (auto& v : p.data) v = on(rng) ? 1 : 0;
  return p;
}

fk::ScreenTriangle tri(double x0, double y0, double x1, double y1, double x2, double y2, double d) {
  return {{x0, x1, x2}, {y0, y1, y2}, {d, d, d}};
}

}  // namespace

TEST_CASE("gaussian taps") {
  const auto fixed = fk::gaussian_taps_fixed(1.4);
  CHECK(fixed.size() == 6);  // radius ceil(4.2) = 5
  CHECK(fixed[0] == 4096);
  CHECK(fixed[1] == std::lround(4096 * std::exp(-1 / (2 * 1.4 * 1.4))));
  const auto real = fk::gaussian_taps(2.0);
  double sum = real[0];
  for (std::size_t i = 1; i < real.size(); ++i) sum += 2 * real[i];
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("serial and omp kernels agree bit for bit") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 12; ++trial) {
    std::uniform_int_distribution<int> dim(1, 70);
    const int w = dim(rng), h = dim(rng);
    const auto img = testing::random_image(rng, w, h, trial % 2 ? Channels::Rgb8 : Channels::Rgba8);
    const auto l_s = fk::serial::luma_milli(img);
    CHECK(l_s == fk::omp::luma_milli(img));

    const auto taps = fk::gaussian_taps_fixed(0.8 + 0.3 * trial);
    const auto b_s = fk::serial::blur_fixed(l_s, taps);
    CHECK(b_s == fk::omp::blur_fixed(l_s, taps));

    const auto g_s = fk::serial::sobel(b_s, 1234.5);
    const auto g_o = fk::omp::sobel(b_s, 1234.5);
    CHECK(g_s.magnitude == g_o.magnitude);
    CHECK(g_s.direction == g_o.direction);
    CHECK(fk::serial::non_max_suppression(g_s) == fk::omp::non_max_suppression(g_o));

    const auto seeds = random_seeds(rng, w, h, 0.05);
    for (bool outside : {false, true}) {
      CHECK(fk::serial::squared_distance(seeds, outside) == fk::omp::squared_distance(seeds, outside));
    }

    fk::Plane<double> field(w, h);
    std::uniform_real_distribution<double> u(0, 1);
    for (auto& v : field.data) v = u(rng);
    const auto rt = fk::gaussian_taps(1.5);
    CHECK(fk::serial::blur(field, rt) == fk::omp::blur(field, rt));

    std::vector<fk::ScreenTriangle> tris;
    std::uniform_real_distribution<double> coord(-4, 36), depth(0, 1);
    for (int i = 0; i < 40; ++i) {
      tris.push_back({{coord(rng), coord(rng), coord(rng)},
                      {coord(rng), coord(rng), coord(rng)},
                      {depth(rng), depth(rng), depth(rng)}});
    }
    CHECK(fk::serial::rasterize_depth(tris, 32) == fk::omp::rasterize_depth(tris, 32));
  }
}

TEST_CASE("squared_distance matches brute force") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    std::uniform_int_distribution<int> dim(1, 24);
    const int w = dim(rng), h = dim(rng);
    const auto seeds = random_seeds(rng, w, h, trial % 3 == 0 ? 0.0 : 0.1);
    const bool outside = trial % 2 == 0;
    const auto d2 = fk::omp::squared_distance(seeds, outside);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double expected = testing::brute_distance(
            x, y, w, h, [&](int sx, int sy) { return seeds.at(sx, sy) != 0; }, outside);
        if (std::isinf(expected)) {
          CHECK(std::isinf(d2.at(x, y)));
        } else {
          CHECK(std::sqrt(d2.at(x, y)) == doctest::Approx(expected).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("depth buffer: overlapping parallel quads resolve to the nearer one") {
  const int n = 32;
  // far quad covers the whole raster, near quad the central square [8, 24)
  std::vector<fk::ScreenTriangle> tris = {
      tri(0, 0, 32, 0, 32, 32, 0.9), tri(0, 0, 32, 32, 0, 32, 0.9),
      tri(8, 8, 24, 8, 24, 24, 0.2), tri(8, 8, 24, 24, 8, 24, 0.2),
  };
  for (int order = 0; order < 2; ++order) {
    const auto buf = fk::omp::rasterize_depth(tris, n);
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        const bool inner = x >= 8 && x < 24 && y >= 8 && y < 24;
        CHECK(buf.at(x, y) == doctest::Approx(inner ? 0.2 : 0.9).epsilon(1e-12));
      }
    }
    std::reverse(tris.begin(), tris.end());
  }
}

TEST_CASE("rasterizer: shared edges cover each pixel centre exactly once") {
  // Two triangles tiling a square with a diagonal passing through pixel
  // centres; with depth = triangle id + 1, no centre may be empty.
  std::vector<fk::ScreenTriangle> a = {tri(0.5, 0.5, 8.5, 0.5, 8.5, 8.5, 1)};
  std::vector<fk::ScreenTriangle> b = {tri(0.5, 0.5, 8.5, 8.5, 0.5, 8.5, 2)};
  const auto ba = fk::serial::rasterize_depth(a, 10);
  const auto bb = fk::serial::rasterize_depth(b, 10);
  std::vector<fk::ScreenTriangle> both = {a[0], b[0]};
  const auto bab = fk::serial::rasterize_depth(both, 10);
  int overlap = 0, hole = 0;
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 10; ++x) {
      const bool ia = ba.at(x, y) < fk::kFarDepth, ib = bb.at(x, y) < fk::kFarDepth;
      overlap += ia && ib;
      const bool inside_square = x < 8 && y < 8;
      hole += inside_square && !(ia || ib);
      if (inside_square) CHECK(bab.at(x, y) < fk::kFarDepth);
    }
  }
  CHECK(overlap == 0);
  CHECK(hole == 0);
}

TEST_CASE("rasterizer: random diagonals through pixel centres leave no holes") {
  // Diagonal endpoints are chosen so the diagonal passes through pixel centres
  // while the coordinates themselves are not exactly representable.
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> corner(0, 12), span(4, 18);
  std::uniform_real_distribution<double> scale(0.3, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double x0 = corner(rng) + 0.5 + 1e-9 * scale(rng), y0 = corner(rng) + 0.5;
    const double side = span(rng);
    const double x1 = x0 + side, y1 = y0 + side;
    const fk::ScreenTriangle a = tri(x0, y0, x1, y0, x1, y1, 1);
    const fk::ScreenTriangle b = tri(x1, y1, x0, y1, x0, y0, 1);
    const std::vector<fk::ScreenTriangle> ta = {a}, tb = {b};
    const auto ba = fk::serial::rasterize_depth(ta, 32);
    const auto bb = fk::serial::rasterize_depth(tb, 32);
    for (int y = 0; y < 32; ++y) {
      for (int x = 0; x < 32; ++x) {
        const double cx = x + 0.5, cy = y + 0.5;
        const bool ia = ba.at(x, y) < fk::kFarDepth, ib = bb.at(x, y) < fk::kFarDepth;
        CHECK_FALSE((ia && ib));
        if (cx > x0 + 1e-6 && cx < x1 - 1e-6 && cy > y0 + 1e-6 && cy < y1 - 1e-6) CHECK((ia || ib));
      }
    }
  }
}

// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Per-row / per-column building blocks shared by the serial and OpenMP
// kernels. Keeping the arithmetic in one place is what makes the two
// variants bit-identical.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "flatlift/kernels/kernels.hpp"

namespace flatlift::kernels::detail {

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

template <typename In, typename Out, typename Tap>
void blur_row_h(const Plane<In>& in, Plane<Out>& out, int y, std::span<const Tap> taps) {
  const int r = static_cast<int>(taps.size()) - 1;
  const int w = in.width;
  for (int x = 0; x < w; ++x) {
    Out acc = static_cast<Out>(taps[0]) * static_cast<Out>(in.at(x, y));
    for (int k = 1; k <= r; ++k) {
      acc += static_cast<Out>(taps[k]) *
             (static_cast<Out>(in.at(clampi(x - k, 0, w - 1), y)) +
              static_cast<Out>(in.at(clampi(x + k, 0, w - 1), y)));
    }
    out.at(x, y) = acc;
  }
}

template <typename T, typename Tap>
void blur_row_v(const Plane<T>& in, Plane<T>& out, int y, std::span<const Tap> taps) {
  const int r = static_cast<int>(taps.size()) - 1;
  const int h = in.height;
  for (int x = 0; x < in.width; ++x) {
    T acc = static_cast<T>(taps[0]) * in.at(x, y);
    for (int k = 1; k <= r; ++k) {
      acc += static_cast<T>(taps[k]) * (in.at(x, clampi(y - k, 0, h - 1)) + in.at(x, clampi(y + k, 0, h - 1)));
    }
    out.at(x, y) = acc;
  }
}

inline void luma_row(const RasterImage& img, Plane<std::int32_t>& out, int y) {
  for (int x = 0; x < img.width(); ++x) {
    out.at(x, y) = img.channels() == Channels::Gray8 ? 1000 * img.at(x, y) : luma_milli(img.rgb(x, y));
  }
}

inline void sobel_row(const Plane<std::int64_t>& in, Gradient& g, int y, double scale) {
  constexpr double kTan22_5 = 0.41421356237309503;
  const int w = in.width, h = in.height;
  const int ym = clampi(y - 1, 0, h - 1), yp = clampi(y + 1, 0, h - 1);
  const double norm = 4.0 * std::sqrt(2.0) * scale;
  for (int x = 0; x < w; ++x) {
    const int xm = clampi(x - 1, 0, w - 1), xp = clampi(x + 1, 0, w - 1);
    const std::int64_t gx = (in.at(xp, ym) + 2 * in.at(xp, y) + in.at(xp, yp)) -
                            (in.at(xm, ym) + 2 * in.at(xm, y) + in.at(xm, yp));
    const std::int64_t gy = (in.at(xm, yp) + 2 * in.at(x, yp) + in.at(xp, yp)) -
                            (in.at(xm, ym) + 2 * in.at(x, ym) + in.at(xp, ym));
    const double dx = static_cast<double>(gx), dy = static_cast<double>(gy);
    g.magnitude.at(x, y) = std::sqrt(dx * dx + dy * dy) / norm;
    const double ax = std::abs(dx), ay = std::abs(dy);
    std::uint8_t dir;
    if (ay <= kTan22_5 * ax) {
      dir = kDir0;
    } else if (ax <= kTan22_5 * ay) {
      dir = kDir90;
    } else {
      dir = (gx > 0) == (gy > 0) ? kDir45 : kDir135;
    }
    g.direction.at(x, y) = dir;
  }
}

inline void direction_offset(std::uint8_t dir, int& dx, int& dy) {
  switch (dir) {
    case kDir0: dx = 1; dy = 0; break;
    case kDir45: dx = 1; dy = 1; break;
    case kDir90: dx = 0; dy = 1; break;
    default: dx = 1; dy = -1; break;
  }
}

inline void nms_row(const Gradient& g, Plane<double>& out, int y) {
  const auto& m = g.magnitude;
  const int w = m.width, h = m.height;
  auto mag = [&](int x, int yy) { return (x < 0 || yy < 0 || x >= w || yy >= h) ? 0.0 : m.at(x, yy); };
  for (int x = 0; x < w; ++x) {
    const double v = m.at(x, y);
    if (v <= 0.0) {
      out.at(x, y) = 0.0;
      continue;
    }
    int dx, dy;
    direction_offset(g.direction.at(x, y), dx, dy);
    const bool keep = v > mag(x - dx, y - dy) && v >= mag(x + dx, y + dy);
    out.at(x, y) = keep ? v : 0.0;
  }
}

// Felzenszwalb-Huttenlocher lower envelope of parabolas; f uses kBig for
// "no seed". Scratch: v holds n entries, z holds n + 1.
constexpr double kBig = 1e20;

inline void distance_1d(const double* f, double* d, int n, std::vector<int>& v, std::vector<double>& z) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  int k = 0;
  v[0] = 0;
  z[0] = -inf;
  z[1] = inf;
  for (int q = 1; q < n; ++q) {
    auto intersect = [&](int p) {
      return ((f[q] + static_cast<double>(q) * q) - (f[p] + static_cast<double>(p) * p)) / (2.0 * (q - p));
    };
    double s = intersect(v[k]);
    while (s <= z[k]) {
      --k;
      s = intersect(v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = inf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double diff = q - v[k];
    d[q] = diff * diff + f[v[k]];
  }
}

struct TriSetup {
  double area = 0;
  int x0 = 0, x1 = -1, y0 = 0, y1 = -1;  // inclusive pixel bounds
  bool valid = false;
};

inline TriSetup setup_triangle(const ScreenTriangle& t, int size) {
  TriSetup s;
  s.area = (t.x[1] - t.x[0]) * (t.y[2] - t.y[0]) - (t.y[1] - t.y[0]) * (t.x[2] - t.x[0]);
  if (s.area == 0.0 || !std::isfinite(s.area)) return s;
  const double minx = std::min({t.x[0], t.x[1], t.x[2]}), maxx = std::max({t.x[0], t.x[1], t.x[2]});
  const double miny = std::min({t.y[0], t.y[1], t.y[2]}), maxy = std::max({t.y[0], t.y[1], t.y[2]});
  s.x0 = std::max(0, static_cast<int>(std::floor(minx - 0.5)));
  s.x1 = std::min(size - 1, static_cast<int>(std::ceil(maxx - 0.5)));
  s.y0 = std::max(0, static_cast<int>(std::floor(miny - 0.5)));
  s.y1 = std::min(size - 1, static_cast<int>(std::ceil(maxy - 0.5)));
  s.valid = s.x0 <= s.x1 && s.y0 <= s.y1;
  return s;
}

// Top-left rule. With the winding normalized so the interior has positive
// edge functions, left edges point up (dy < 0) and top edges point right.
// The opposite traversal of a shared edge never owns its samples, so abutting
// triangles never both cover one.
inline bool owns_edge(double ax, double ay, double bx, double by, double sign) {
  const double dx = (bx - ax) * sign, dy = (by - ay) * sign;
  return dy < 0 || (dy == 0 && dx > 0);
}

// Evaluated with the endpoints in a fixed order so that both triangles
// sharing an edge see exactly negated values.
inline double edge_function(double ax, double ay, double bx, double by, double px, double py) {
  const bool swap = ay > by || (ay == by && ax > bx);
  if (swap) {
    std::swap(ax, bx);
    std::swap(ay, by);
  }
  const double e = (bx - ax) * (py - ay) - (by - ay) * (px - ax);
  return swap ? -e : e;
}

inline void raster_span(const ScreenTriangle& t, const TriSetup& s, int y, Plane<double>& out) {
  const double sign = s.area > 0 ? 1.0 : -1.0;
  const double py = y + 0.5;
  for (int x = s.x0; x <= s.x1; ++x) {
    const double px = x + 0.5;
    double w[3];
    bool inside = true;
    for (int e = 0; e < 3 && inside; ++e) {
      const int a = (e + 1) % 3, b = (e + 2) % 3;
      const double ew = edge_function(t.x[a], t.y[a], t.x[b], t.y[b], px, py) * sign;
      w[e] = ew;
      if (ew < 0 || (ew == 0 && !owns_edge(t.x[a], t.y[a], t.x[b], t.y[b], sign))) inside = false;
    }
    if (!inside) continue;
    const double total = w[0] + w[1] + w[2];
    const double depth = (w[0] * t.depth[0] + w[1] * t.depth[1] + w[2] * t.depth[2]) / total;
    double& cell = out.at(x, y);
    if (depth < cell) cell = depth;
  }
}

}  // namespace flatlift::kernels::detail

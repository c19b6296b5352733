// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatlift/mesh/bake.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "flatlift/core/error.hpp"
#include "flatlift/kernels/kernels.hpp"
#include "flatlift/mesh/geometry.hpp"

namespace flatlift::mesh {

std::string_view to_string(HiddenFill fill) {
  return fill == HiddenFill::MirrorFront ? "mirror_front" : "nearest_visible";
}

std::optional<HiddenFill> hidden_fill_from_string(std::string_view name) {
  if (name == "nearest_visible") return HiddenFill::NearestVisible;
  if (name == "mirror_front") return HiddenFill::MirrorFront;
  return std::nullopt;
}

void BakeParams::validate() const {
  if (raster_size < 16) throw Error(ErrorKind::InvalidConfig, "bake.raster_size must be >= 16");
  if (!(depth_epsilon >= 0) || !std::isfinite(depth_epsilon)) {
    throw Error(ErrorKind::InvalidConfig, "bake.depth_epsilon must be >= 0");
  }
}

namespace {

std::vector<bool> visibility_of_normalized(const TriMesh& unit, int size, double eps) {
  const double s = size;
  auto px = [&](const Vec3& v) { return (v.x + 0.5) * s; };
  auto py = [&](const Vec3& v) { return (0.5 - v.y) * s; };
  auto depth = [](const Vec3& v) { return 0.5 - v.z; };

  std::vector<kernels::ScreenTriangle> tris;
  tris.reserve(unit.triangles.size());
  for (const Triangle& t : unit.triangles) {
    kernels::ScreenTriangle st{};
    for (int k = 0; k < 3; ++k) {
      const Vec3& v = unit.vertices[t[k]];
      st.x[k] = px(v);
      st.y[k] = py(v);
      st.depth[k] = depth(v);
    }
    tris.push_back(st);
  }
  const auto buffer = kernels::omp::rasterize_depth(tris, size);

  std::vector<bool> visible(unit.vertices.size());
  for (std::size_t i = 0; i < unit.vertices.size(); ++i) {
    const Vec3& v = unit.vertices[i];
    const int ix = std::clamp(static_cast<int>(std::floor(px(v))), 0, size - 1);
    const int iy = std::clamp(static_cast<int>(std::floor(py(v))), 0, size - 1);
    visible[i] = depth(v) <= buffer.at(ix, iy) + eps;
  }
  return visible;
}

struct PixelBox {
  int x0, y0, x1, y1;  // inclusive
};

PixelBox foreground_box(const condition::ForegroundMask& mask) {
  PixelBox b{mask.mask.width(), mask.mask.height(), -1, -1};
  for (int y = 0; y < mask.mask.height(); ++y)
    for (int x = 0; x < mask.mask.width(); ++x)
      if (mask.contains(x, y)) {
        b.x0 = std::min(b.x0, x);
        b.y0 = std::min(b.y0, y);
        b.x1 = std::max(b.x1, x);
        b.y1 = std::max(b.y1, y);
      }
  return b;
}

// Colour lookup in pixel-centre coordinates: bilinear over the foreground
// neighbours only, falling back to the closest foreground pixel.
class MaskedSampler {
 public:
  MaskedSampler(const RasterImage& img, const condition::ForegroundMask& mask) : img_(img), mask_(mask) {}

  Rgb8 operator()(double u, double v) const {
    const int i0 = static_cast<int>(std::floor(u)), j0 = static_cast<int>(std::floor(v));
    const double fu = u - i0, fv = v - j0;
    double acc[3] = {0, 0, 0}, total = 0;
    for (int dj = 0; dj < 2; ++dj) {
      for (int di = 0; di < 2; ++di) {
        const int x = i0 + di, y = j0 + dj;
        const double w = (di ? fu : 1 - fu) * (dj ? fv : 1 - fv);
        if (w <= 0 || !img_.contains(x, y) || !mask_.contains(x, y)) continue;
        const Rgb8 c = img_.rgb(x, y);
        for (int k = 0; k < 3; ++k) acc[k] += w * c[k];
        total += w;
      }
    }
    if (total > 0) {
      return {static_cast<std::uint8_t>(std::lround(acc[0] / total)),
              static_cast<std::uint8_t>(std::lround(acc[1] / total)),
              static_cast<std::uint8_t>(std::lround(acc[2] / total))};
    }
    return nearest(static_cast<int>(std::lround(u)), static_cast<int>(std::lround(v)));
  }

 private:
  Rgb8 nearest(int cx, int cy) const {
    const int w = img_.width(), h = img_.height();
    cx = std::clamp(cx, 0, w - 1);
    cy = std::clamp(cy, 0, h - 1);
    long best = -1;
    Rgb8 out{0, 0, 0};
    // expanding square rings; stop once a ring cannot beat the best hit
    for (int r = 0; r < std::max(w, h); ++r) {
      if (best >= 0 && static_cast<long>(r) * r > best) break;
      for (int y = cy - r; y <= cy + r; ++y) {
        for (int x = cx - r; x <= cx + r; ++x) {
          if (std::max(std::abs(x - cx), std::abs(y - cy)) != r) continue;
          if (!img_.contains(x, y) || !mask_.contains(x, y)) continue;
          const long d = static_cast<long>(x - cx) * (x - cx) + static_cast<long>(y - cy) * (y - cy);
          if (best < 0 || d < best) {
            best = d;
            out = img_.rgb(x, y);
          }
        }
      }
    }
    return out;
  }

  const RasterImage& img_;
  const condition::ForegroundMask& mask_;
};

}  // namespace

std::vector<bool> frontal_visibility(const TriMesh& mesh, const BakeParams& params) {
  params.validate();
  validate(mesh);
  return visibility_of_normalized(normalize_mesh(mesh), params.raster_size, params.depth_epsilon);
}

TriMesh bake_frontal(const TriMesh& mesh, const RasterImage& img, const condition::ForegroundMask& mask,
                     const BakeParams& params) {
  params.validate();
  validate(mesh);
  if (img.width() != mask.mask.width() || img.height() != mask.mask.height()) {
    throw Error(ErrorKind::DimensionMismatch, "bake image and mask sizes differ");
  }
  if (mask.coverage <= 0) throw Error(ErrorKind::EmptyForeground, "cannot bake from an empty foreground");

  const TriMesh unit = normalize_mesh(mesh);
  const auto visible = visibility_of_normalized(unit, params.raster_size, params.depth_epsilon);
  const Bounds mb = bounding_box(unit);
  const PixelBox pb = foreground_box(mask);
  const MaskedSampler sample(img, mask);

  auto project = [&](const Vec3& v) {
    const double sx = mb.max.x - mb.min.x, sy = mb.max.y - mb.min.y;
    const double tu = sx > 0 ? (v.x - mb.min.x) / sx : 0.5;
    const double tv = sy > 0 ? (mb.max.y - v.y) / sy : 0.5;
    return sample(pb.x0 + tu * (pb.x1 - pb.x0), pb.y0 + tv * (pb.y1 - pb.y0));
  };

  const std::size_t n = unit.vertices.size();
  std::vector<Rgb8> colors(n);
  std::vector<char> done(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (visible[i] || params.hidden_fill == HiddenFill::MirrorFront) {
      colors[i] = project(unit.vertices[i]);
      done[i] = 1;
    }
  }

  if (params.hidden_fill == HiddenFill::NearestVisible) {
    std::vector<std::vector<std::uint32_t>> adj(n);
    for (const Triangle& t : unit.triangles)
      for (int k = 0; k < 3; ++k) {
        adj[t[k]].push_back(t[(k + 1) % 3]);
        adj[t[k]].push_back(t[(k + 2) % 3]);
      }
    for (auto& a : adj) {
      std::sort(a.begin(), a.end());
      a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    std::deque<std::uint32_t> queue;
    for (std::size_t i = 0; i < n; ++i)
      if (done[i]) queue.push_back(static_cast<std::uint32_t>(i));
    while (!queue.empty()) {
      const std::uint32_t v = queue.front();
      queue.pop_front();
      for (std::uint32_t w : adj[v]) {
        if (done[w]) continue;
        done[w] = 1;
        colors[w] = colors[v];
        queue.push_back(w);
      }
    }
    // components with no visible vertex at all
    for (std::size_t i = 0; i < n; ++i)
      if (!done[i]) colors[i] = project(unit.vertices[i]);
  }

  TriMesh out = mesh;
  out.vertex_colors = std::move(colors);
  return out;
}

}  // namespace flatlift::mesh

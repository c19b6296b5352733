// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatlift/mesh/inflate.hpp"

#include <algorithm>
#include <cmath>

#include "flatlift/condition/depth.hpp"
#include "flatlift/core/error.hpp"
#include "flatlift/mesh/geometry.hpp"

namespace flatlift::mesh {

void InflateParams::validate() const {
  if (grid_step < 1) throw Error(ErrorKind::InvalidConfig, "inflate.grid_step must be >= 1");
  if (!(height_scale > 0) || !std::isfinite(height_scale)) {
    throw Error(ErrorKind::InvalidConfig, "inflate.height_scale must be > 0");
  }
}

namespace {

double max_of(const kernels::Plane<double>& p) {
  double m = 0;
  for (double v : p.data) m = std::max(m, v);
  return m;
}

}  // namespace

kernels::Plane<double> inflation_heightfield(const condition::ForegroundMask& mask, double height_scale) {
  auto field = condition::foreground_distance(mask);
  const double dmax = max_of(field);
  for (double& v : field.data) v = dmax > 0 ? height_scale * std::sqrt(v / dmax) : 0.0;
  return field;
}

TriMesh inflate_silhouette(const condition::ForegroundMask& mask, const InflateParams& params) {
  params.validate();
  if (mask.coverage <= 0) throw Error(ErrorKind::EmptyForeground, "cannot inflate an empty mask");

  const auto dist = condition::foreground_distance(mask);
  const double dmax = max_of(dist);
  const int g = params.grid_step;
  const int nx = (mask.mask.width() - 1) / g + 1, ny = (mask.mask.height() - 1) / g + 1;
  const int cx = nx - 1, cy = ny - 1;  // cell grid
  auto node_in = [&](int i, int j) { return mask.contains(i * g, j * g); };

  std::vector<char> cell(static_cast<std::size_t>(std::max(cx, 0)) * std::max(cy, 0), 0);
  auto cell_at = [&](int i, int j) -> char {
    return (i < 0 || j < 0 || i >= cx || j >= cy) ? 0 : cell[static_cast<std::size_t>(j) * cx + i];
  };
  for (int j = 0; j < cy; ++j)
    for (int i = 0; i < cx; ++i)
      cell[static_cast<std::size_t>(j) * cx + i] =
          node_in(i, j) && node_in(i + 1, j) && node_in(i, j + 1) && node_in(i + 1, j + 1);

  // A node is interior when all four surrounding cells are kept. Cells with no
  // interior corner would put front and back on top of each other, so they
  // are peeled off until none remain.
  auto interior = [&](int i, int j) {
    return cell_at(i - 1, j - 1) && cell_at(i, j - 1) && cell_at(i - 1, j) && cell_at(i, j);
  };
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<std::size_t> drop;
    for (int j = 0; j < cy; ++j)
      for (int i = 0; i < cx; ++i)
        if (cell_at(i, j) && !interior(i, j) && !interior(i + 1, j) && !interior(i, j + 1) &&
            !interior(i + 1, j + 1))
          drop.push_back(static_cast<std::size_t>(j) * cx + i);
    for (std::size_t k : drop) cell[k] = 0;
    changed = !drop.empty();
  }
  if (std::find(cell.begin(), cell.end(), 1) == cell.end()) {
    throw Error(ErrorKind::DegenerateMesh, "silhouette is too thin for grid_step " + std::to_string(g));
  }

  TriMesh mesh;
  constexpr std::uint32_t kNone = ~0u;
  std::vector<std::uint32_t> front(static_cast<std::size_t>(nx) * ny, kNone), back = front;
  auto used = [&](int i, int j) {
    return cell_at(i - 1, j - 1) || cell_at(i, j - 1) || cell_at(i - 1, j) || cell_at(i, j);
  };
  auto height = [&](int i, int j) {
    const double d = dist.at(i * g, j * g);
    return params.height_scale * std::sqrt(d / dmax) * dmax;
  };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      if (used(i, j)) {
        front[static_cast<std::size_t>(j) * nx + i] = static_cast<std::uint32_t>(mesh.vertices.size());
        // x right, y up, silhouette nodes pinned to z = 0
        mesh.vertices.push_back({double(i * g), -double(j * g), interior(i, j) ? height(i, j) : 0.0});
      }
  if (params.mirror_back) {
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const std::size_t k = static_cast<std::size_t>(j) * nx + i;
        if (front[k] == kNone) continue;
        if (!interior(i, j)) {
          back[k] = front[k];
          continue;
        }
        back[k] = static_cast<std::uint32_t>(mesh.vertices.size());
        const Vec3 f = mesh.vertices[front[k]];
        mesh.vertices.push_back({f.x, f.y, -f.z});
      }
  }

  for (int j = 0; j < cy; ++j) {
    for (int i = 0; i < cx; ++i) {
      if (!cell_at(i, j)) continue;
      auto id = [&](const std::vector<std::uint32_t>& m, int di, int dj) {
        return m[static_cast<std::size_t>(j + dj) * nx + (i + di)];
      };
      // image-space corners: 00 top-left, 10 top-right, 01 bottom-left, 11 bottom-right.
      // Split along whichever diagonal touches an interior node.
      const bool main_diag = interior(i, j) || interior(i + 1, j + 1);
      for (int side = 0; side < (params.mirror_back ? 2 : 1); ++side) {
        const auto& m = side == 0 ? front : back;
        const std::uint32_t v00 = id(m, 0, 0), v10 = id(m, 1, 0), v01 = id(m, 0, 1), v11 = id(m, 1, 1);
        Triangle t1, t2;
        if (main_diag) {
          t1 = {v01, v11, v00};
          t2 = {v11, v10, v00};
        } else {
          t1 = {v01, v11, v10};
          t2 = {v01, v10, v00};
        }
        if (side == 1) {  // back faces point along -z
          std::swap(t1[1], t1[2]);
          std::swap(t2[1], t2[2]);
        }
        mesh.triangles.push_back(t1);
        mesh.triangles.push_back(t2);
      }
    }
  }
  return normalize_mesh(mesh);
}

}  // namespace flatlift::mesh

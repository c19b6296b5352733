// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatlift/mesh/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "flatlift/core/error.hpp"

namespace flatlift::mesh {

Bounds bounding_box(const TriMesh& mesh) {
  if (mesh.vertices.empty()) throw Error(ErrorKind::DegenerateMesh, "mesh has no vertices");
  Bounds b{mesh.vertices.front(), mesh.vertices.front()};
  for (const Vec3& v : mesh.vertices) {
    b.min = {std::min(b.min.x, v.x), std::min(b.min.y, v.y), std::min(b.min.z, v.z)};
    b.max = {std::max(b.max.x, v.x), std::max(b.max.y, v.y), std::max(b.max.z, v.z)};
  }
  return b;
}

TriMesh normalize_mesh(const TriMesh& mesh) {
  const Bounds b = bounding_box(mesh);
  const double longest = std::max({b.max.x - b.min.x, b.max.y - b.min.y, b.max.z - b.min.z});
  if (!(longest > 0) || !std::isfinite(longest)) {
    throw Error(ErrorKind::DegenerateMesh, "bounding box has zero extent");
  }
  const Vec3 c{(b.min.x + b.max.x) / 2, (b.min.y + b.max.y) / 2, (b.min.z + b.max.z) / 2};
  constexpr double tol = 1e-12;
  if (std::abs(longest - 1) <= tol && std::abs(c.x) <= tol && std::abs(c.y) <= tol && std::abs(c.z) <= tol) {
    return mesh;
  }
  TriMesh out = mesh;
  for (Vec3& v : out.vertices) v = {(v.x - c.x) / longest, (v.y - c.y) / longest, (v.z - c.z) / longest};
  return out;
}

ThinnessReport thinness_report(const TriMesh& mesh, double thin_threshold) {
  const std::size_t n = mesh.vertices.size();
  if (n < 3) throw Error(ErrorKind::DegenerateMesh, "thinness needs at least 3 vertices");
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const Vec3& v : mesh.vertices) mean += Eigen::Vector3d(v.x, v.y, v.z);
  mean /= static_cast<double>(n);
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const Vec3& v : mesh.vertices) {
    const Eigen::Vector3d d = Eigen::Vector3d(v.x, v.y, v.z) - mean;
    cov.noalias() += d * d.transpose();
  }
  cov /= static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov, Eigen::EigenvaluesOnly);
  const Eigen::Vector3d ev = solver.eigenvalues();  // ascending
  ThinnessReport r;
  const double k = 2.0 * std::sqrt(3.0);
  for (int i = 0; i < 3; ++i) r.principal_extents[i] = k * std::sqrt(std::max(0.0, ev[2 - i]));
  const double e2 = r.principal_extents[1], e3 = r.principal_extents[2];
  r.thinness_ratio = e2 > 0 ? std::clamp(e3 / e2, 0.0, 1.0) : 0.0;
  r.flagged_thin = r.thinness_ratio < thin_threshold;
  return r;
}

}  // namespace flatlift::mesh

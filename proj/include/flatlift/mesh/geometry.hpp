// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>

#include "flatlift/core/mesh.hpp"

namespace flatlift::mesh {

struct Bounds {
  Vec3 min;
  Vec3 max;
};

/// Axis-aligned bounds of the vertices; throws Error{DegenerateMesh} when empty.
Bounds bounding_box(const TriMesh& mesh);

/// Uniform scale and translation putting the bounding box centre at the
/// origin with a longest side of 1. A mesh that is already normalized to
/// within 1e-12 is returned unchanged, so the operation is idempotent.
/// Throws Error{DegenerateMesh} for an empty mesh or a zero-extent box.
TriMesh normalize_mesh(const TriMesh& mesh);

struct ThinnessReport {
  std::array<double, 3> principal_extents{};  // descending
  double thinness_ratio = 0;                  // e3 / e2, 0 when e2 == 0
  bool flagged_thin = false;
};

constexpr double kDefaultThinThreshold = 0.1;

/// PCA over vertex positions with uniform weights. Extents are
/// 2*sqrt(3)*sqrt(eigenvalue) of the population covariance, which equals the
/// side lengths for a uniformly filled box. Needs at least 3 vertices.
ThinnessReport thinness_report(const TriMesh& mesh, double thin_threshold = kDefaultThinThreshold);

}  // namespace flatlift::mesh

// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "flatlift/condition/foreground.hpp"
#include "flatlift/core/mesh.hpp"
#include "flatlift/kernels/plane.hpp"

namespace flatlift::mesh {

struct InflateParams {
  int grid_step = 2;          // pixels between grid nodes
  double height_scale = 0.9;
  bool mirror_back = true;

  /// Throws Error{InvalidConfig}.
  void validate() const;
};

/// Per-pixel height profile height_scale * sqrt(D / D_max), where D is the
/// distance to the nearest background pixel. Zero outside the foreground.
kernels::Plane<double> inflation_heightfield(const condition::ForegroundMask& mask, double height_scale);

/// Balloon-style cushion built from the mask. Grid nodes sit on every
/// grid_step-th pixel centre, a cell is kept when its four corners are
/// foreground, and node heights are the profile above multiplied by D_max so
/// depth and width share pixel units (x right, y up). Silhouette nodes lie at
/// z = 0 and are shared by the front surface and its mirrored back, so every
/// edge of the closed result borders exactly two triangles. The output is
/// normalized. Throws Error{EmptyForeground} for an empty mask and
/// Error{DegenerateMesh} when no grid cell fits inside it.
TriMesh inflate_silhouette(const condition::ForegroundMask& mask, const InflateParams& params = {});

}  // namespace flatlift::mesh

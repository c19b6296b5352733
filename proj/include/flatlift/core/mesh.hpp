// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "flatlift/core/image.hpp"

namespace flatlift {

struct Vec3 {
  double x = 0, y = 0, z = 0;
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

using Triangle = std::array<std::uint32_t, 3>;

// Indexed triangle mesh with optional per-vertex colours.
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  std::optional<std::vector<Rgb8>> vertex_colors;

  friend bool operator==(const TriMesh&, const TriMesh&) = default;
};

/// Throws Error{MalformedMesh} on out-of-range or repeated indices, non-finite
/// coordinates, or a colour list whose length differs from the vertex count.
void validate(const TriMesh& mesh);

}  // namespace flatlift

// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatlift/core/mesh.hpp"

#include <cmath>
#include <string>

#include "flatlift/core/error.hpp"

namespace flatlift {

void validate(const TriMesh& mesh) {
  const std::size_t n = mesh.vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& v = mesh.vertices[i];
    if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z)) {
      throw Error(ErrorKind::MalformedMesh, "vertex " + std::to_string(i) + " is not finite");
    }
  }
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    for (std::uint32_t idx : tri) {
      if (idx >= n) {
        throw Error(ErrorKind::MalformedMesh, "triangle " + std::to_string(t) + " references vertex " +
                                                  std::to_string(idx) + " of " + std::to_string(n));
      }
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      throw Error(ErrorKind::MalformedMesh, "triangle " + std::to_string(t) + " repeats a vertex");
    }
  }
  if (mesh.vertex_colors && mesh.vertex_colors->size() != n) {
    throw Error(ErrorKind::MalformedMesh, "vertex colour count " +
                                              std::to_string(mesh.vertex_colors->size()) +
                                              " != vertex count " + std::to_string(n));
  }
}

}  // namespace flatlift

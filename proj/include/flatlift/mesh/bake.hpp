// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "flatlift/condition/foreground.hpp"
#include "flatlift/core/image.hpp"
#include "flatlift/core/mesh.hpp"

namespace flatlift::mesh {

enum class HiddenFill : std::uint8_t { NearestVisible, MirrorFront };

std::string_view to_string(HiddenFill fill);
std::optional<HiddenFill> hidden_fill_from_string(std::string_view name);

struct BakeParams {
  int raster_size = 512;
  double depth_epsilon = 1e-3;  // in normalized (unit cube) units
  HiddenFill hidden_fill = HiddenFill::NearestVisible;

  /// Throws Error{InvalidConfig}.
  void validate() const;
};

/// Which vertices of the normalized mesh are seen by an orthographic camera
/// looking down -z, judged against a raster_size^2 depth buffer.
std::vector<bool> frontal_visibility(const TriMesh& mesh, const BakeParams& params = {});

/// Colours every vertex from `img`. The mesh is normalized and viewed along
/// -z; the pixel centres of the mask's bounding box map linearly onto the
/// mesh's xy bounding box (image rows grow downward, mesh y grows upward).
/// Visible vertices take a mask-weighted bilinear sample at their projection;
/// hidden ones are filled per params.hidden_fill. Vertex positions and
/// triangles are returned untouched.
/// Throws Error{EmptyForeground}, Error{DegenerateMesh} or Error{MalformedMesh}.
TriMesh bake_frontal(const TriMesh& mesh, const RasterImage& img, const condition::ForegroundMask& mask,
                     const BakeParams& params = {});

}  // namespace flatlift::mesh

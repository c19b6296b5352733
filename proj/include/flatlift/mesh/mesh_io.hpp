// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flatlift/core/mesh.hpp"

namespace flatlift::mesh {

enum class MeshFormat : std::uint8_t { PlyBinary, PlyAscii, Obj };

std::string_view to_string(MeshFormat format);

/// Parses PLY (ascii or binary little-endian) or OBJ, sniffed from the first
/// bytes. PLY vertex coordinates may be float or double; red/green/blue uchar
/// properties become vertex colours. Polygons are fan-triangulated. OBJ indices
/// are 1-based; negative (relative) indices are accepted.
/// Throws Error{MalformedMesh} on bad counts, truncation or invalid indices.
TriMesh load_mesh(std::span<const std::uint8_t> bytes);

/// Coordinates are written as float32. OBJ has no colour channel; when the
/// mesh carries colours a note is appended to `warnings` (if given).
std::vector<std::uint8_t> save_mesh(const TriMesh& mesh, MeshFormat format,
                                    std::vector<std::string>* warnings = nullptr);

}  // namespace flatlift::mesh

// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "flatlift/core/image.hpp"

namespace flatlift {

/// Decodes an 8-bit gray, gray+alpha, RGB, RGBA or opaque palette PNG.
/// Gray+alpha expands to Rgba8 and opaque palettes to Rgb8.
/// Throws Error{MalformedImage} for corrupt data and Error{UnsupportedFormat}
/// for 16-bit samples or palettes carrying transparency.
RasterImage decode_image(std::span<const std::uint8_t> png);

/// Deterministic encoding: identical images always produce identical bytes.
std::vector<std::uint8_t> encode_image(const RasterImage& img);

/// Content hash of the canonical PNG encoding; used as the image identity.
ContentHash image_hash(const RasterImage& img);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
/// Writes via a temporary sibling and rename so readers never see partial files.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace flatlift

// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "flatlift/core/hash.hpp"

namespace flatlift {

enum class Channels : std::uint8_t { Gray8, Rgb8, Rgba8 };

constexpr int channel_count(Channels c) {
  switch (c) {
    case Channels::Gray8: return 1;
    case Channels::Rgb8: return 3;
    case Channels::Rgba8: return 4;
  }
  return 0;
}

std::string_view to_string(Channels c);

using Rgb8 = std::array<std::uint8_t, 3>;

// Row-major 8-bit pixel grid. Width and height are at least 1 and the buffer
// always holds width * height * channel_count bytes.
class RasterImage {
 public:
  /// Zero-filled image. Throws Error{InvalidArgument} on a zero dimension.
  RasterImage(int width, int height, Channels channels);
  /// Takes ownership of `data`; throws Error{InvalidArgument} on a size mismatch.
  RasterImage(int width, int height, Channels channels, std::vector<std::uint8_t> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  Channels channels() const noexcept { return channels_; }
  int channel_count() const noexcept { return flatlift::channel_count(channels_); }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }
  bool has_alpha() const noexcept { return channels_ == Channels::Rgba8; }
  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::span<std::uint8_t> mutable_data() noexcept { return data_; }

  std::size_t offset(int x, int y) const noexcept {
    return (static_cast<std::size_t>(y) * width_ + x) * channel_count();
  }
  std::uint8_t at(int x, int y, int c = 0) const { return data_[offset(x, y) + c]; }
  std::uint8_t& at(int x, int y, int c = 0) { return data_[offset(x, y) + c]; }

  /// RGB triple of a pixel; gray pixels replicate the single channel.
  Rgb8 rgb(int x, int y) const;
  void set_rgb(int x, int y, Rgb8 value);

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  int width_;
  int height_;
  Channels channels_;
  std::vector<std::uint8_t> data_;
};

/// Rec.601 luma scaled by 1000 (299 R + 587 G + 114 B), exact in integers.
inline std::int32_t luma_milli(Rgb8 c) { return 299 * c[0] + 587 * c[1] + 114 * c[2]; }
inline double luma(Rgb8 c) { return luma_milli(c) / 1000.0; }

/// Converts to Rgb8, compositing alpha over `background` when present.
RasterImage to_rgb(const RasterImage& img, Rgb8 background = {255, 255, 255});

/// Area-average downscale so the long side is at most `max_side`. Images that
/// already fit are returned unchanged.
RasterImage clamp_resolution(const RasterImage& img, int max_side = 1024);

constexpr int kWorkingResolution = 1024;

}  // namespace flatlift

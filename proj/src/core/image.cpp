// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatlift/core/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flatlift/core/error.hpp"

namespace flatlift {

std::string_view to_string(Channels c) {
  switch (c) {
    case Channels::Gray8: return "gray8";
    case Channels::Rgb8: return "rgb8";
    case Channels::Rgba8: return "rgba8";
  }
  return "?";
}

RasterImage::RasterImage(int width, int height, Channels channels)
    : width_(width), height_(height), channels_(channels) {
  if (width < 1 || height < 1) {
    throw Error(ErrorKind::InvalidArgument, "image dimensions must be at least 1x1");
  }
  data_.assign(pixel_count() * flatlift::channel_count(channels), 0);
}

RasterImage::RasterImage(int width, int height, Channels channels, std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  if (width < 1 || height < 1) {
    throw Error(ErrorKind::InvalidArgument, "image dimensions must be at least 1x1");
  }
  if (data_.size() != pixel_count() * flatlift::channel_count(channels)) {
    throw Error(ErrorKind::InvalidArgument,
                "pixel buffer holds " + std::to_string(data_.size()) + " bytes, expected " +
                    std::to_string(pixel_count() * flatlift::channel_count(channels)));
  }
}

Rgb8 RasterImage::rgb(int x, int y) const {
  const std::uint8_t* p = data_.data() + offset(x, y);
  if (channels_ == Channels::Gray8) return {p[0], p[0], p[0]};
  return {p[0], p[1], p[2]};
}

void RasterImage::set_rgb(int x, int y, Rgb8 value) {
  std::uint8_t* p = data_.data() + offset(x, y);
  if (channels_ == Channels::Gray8) {
    p[0] = static_cast<std::uint8_t>((luma_milli(value) + 500) / 1000);
    return;
  }
  p[0] = value[0];
  p[1] = value[1];
  p[2] = value[2];
}

RasterImage to_rgb(const RasterImage& img, Rgb8 background) {
  if (img.channels() == Channels::Rgb8) return img;
  RasterImage out(img.width(), img.height(), Channels::Rgb8);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      Rgb8 c = img.rgb(x, y);
      if (img.has_alpha()) {
        int a = img.at(x, y, 3);
        for (int k = 0; k < 3; ++k) {
          c[k] = static_cast<std::uint8_t>((c[k] * a + background[k] * (255 - a) + 127) / 255);
        }
      }
      out.set_rgb(x, y, c);
    }
  }
  return out;
}

RasterImage clamp_resolution(const RasterImage& img, int max_side) {
  const int long_side = std::max(img.width(), img.height());
  if (long_side <= max_side) return img;
  const double scale = static_cast<double>(max_side) / long_side;
  const int w = std::max(1, static_cast<int>(std::lround(img.width() * scale)));
  const int h = std::max(1, static_cast<int>(std::lround(img.height() * scale)));
  const int cc = img.channel_count();
  RasterImage out(w, h, img.channels());
  const double fx = static_cast<double>(img.width()) / w;
  const double fy = static_cast<double>(img.height()) / h;
  std::vector<double> acc(cc);
  for (int oy = 0; oy < h; ++oy) {
    const double y0 = oy * fy, y1 = (oy + 1) * fy;
    for (int ox = 0; ox < w; ++ox) {
      const double x0 = ox * fx, x1 = (ox + 1) * fx;
      std::fill(acc.begin(), acc.end(), 0.0);
      double total = 0.0;
      for (int sy = static_cast<int>(y0); sy < std::min(img.height(), static_cast<int>(std::ceil(y1))); ++sy) {
        const double wy = std::min<double>(sy + 1, y1) - std::max<double>(sy, y0);
        if (wy <= 0) continue;
        for (int sx = static_cast<int>(x0); sx < std::min(img.width(), static_cast<int>(std::ceil(x1))); ++sx) {
          const double wx = std::min<double>(sx + 1, x1) - std::max<double>(sx, x0);
          if (wx <= 0) continue;
          const double wgt = wx * wy;
          for (int c = 0; c < cc; ++c) acc[c] += wgt * img.at(sx, sy, c);
          total += wgt;
        }
      }
      for (int c = 0; c < cc; ++c) {
        out.at(ox, oy, c) = static_cast<std::uint8_t>(std::clamp(std::lround(acc[c] / total), 0L, 255L));
      }
    }
  }
  return out;
}

}  // namespace flatlift

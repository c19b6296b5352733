// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatlift/core/png.hpp"

#include <png.h>

#include <unistd.h>

#include <atomic>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <thread>

#include "flatlift/core/error.hpp"

namespace flatlift {

namespace {

constexpr std::uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

std::uint32_t read_be32(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
}

struct HeaderInfo {
  int bit_depth = 0;
  int color_type = 0;
  bool has_trns = false;
};

// Walks the chunk list up to IDAT. The simplified libpng reader hides the raw
// bit depth and colour type, which decide whether we accept the file at all.
HeaderInfo scan_header(std::span<const std::uint8_t> png) {
  if (png.size() < 8 + 25 || std::memcmp(png.data(), kPngSignature, 8) != 0) {
    throw Error(ErrorKind::MalformedImage, "missing PNG signature or IHDR");
  }
  HeaderInfo info;
  std::size_t pos = 8;
  bool seen_ihdr = false;
  while (pos + 12 <= png.size()) {
    const std::uint32_t len = read_be32(png.data() + pos);
    const char* type = reinterpret_cast<const char*>(png.data() + pos + 4);
    if (len > png.size() - pos - 12) {
      throw Error(ErrorKind::MalformedImage, "truncated PNG chunk");
    }
    if (std::memcmp(type, "IHDR", 4) == 0 && len >= 13) {
      info.bit_depth = png[pos + 8 + 8];
      info.color_type = png[pos + 8 + 9];
      seen_ihdr = true;
    } else if (std::memcmp(type, "tRNS", 4) == 0) {
      info.has_trns = true;
    } else if (std::memcmp(type, "IDAT", 4) == 0) {
      break;
    }
    pos += 12 + len;
  }
  if (!seen_ihdr) throw Error(ErrorKind::MalformedImage, "PNG has no IHDR chunk");
  return info;
}

}  // namespace

RasterImage decode_image(std::span<const std::uint8_t> png) {
  const HeaderInfo info = scan_header(png);
  if (info.bit_depth == 16) {
    throw Error(ErrorKind::UnsupportedFormat, "16-bit PNG samples are not supported");
  }
  if (info.color_type == PNG_COLOR_TYPE_PALETTE && info.has_trns) {
    throw Error(ErrorKind::UnsupportedFormat, "palette PNG with transparency is not supported");
  }

  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, png.data(), png.size())) {
    std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorKind::MalformedImage, msg);
  }

  Channels channels = Channels::Rgb8;
  if (info.color_type == PNG_COLOR_TYPE_GRAY && !info.has_trns) {
    channels = Channels::Gray8;
    image.format = PNG_FORMAT_GRAY;
  } else if ((info.color_type & PNG_COLOR_MASK_ALPHA) || info.has_trns) {
    channels = Channels::Rgba8;
    image.format = PNG_FORMAT_RGBA;
  } else {
    image.format = PNG_FORMAT_RGB;
  }

  const int width = static_cast<int>(image.width);
  const int height = static_cast<int>(image.height);
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorKind::MalformedImage, msg);
  }
  return RasterImage(width, height, channels, std::move(buffer));
}

std::vector<std::uint8_t> encode_image(const RasterImage& img) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  switch (img.channels()) {
    case Channels::Gray8: image.format = PNG_FORMAT_GRAY; break;
    case Channels::Rgb8: image.format = PNG_FORMAT_RGB; break;
    case Channels::Rgba8: image.format = PNG_FORMAT_RGBA; break;
  }
  png_alloc_size_t size = 0;
  if (!png_image_write_get_memory_size(image, size, 0, img.data().data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorKind::MalformedImage, "PNG encode failed: " + msg);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, img.data().data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorKind::MalformedImage, "PNG encode failed: " + msg);
  }
  out.resize(size);
  return out;
}

ContentHash image_hash(const RasterImage& img) { return content_hash(encode_image(img)); }

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  static std::atomic<unsigned> counter{0};
  if (path.has_parent_path()) {
    std::error_code dir_ec;
    std::filesystem::create_directories(path.parent_path(), dir_ec);
    if (dir_ec) throw Error(ErrorKind::CacheIo, "cannot create " + path.parent_path().string());
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) + "." +
         std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::CacheIo, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::CacheIo, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error(ErrorKind::CacheIo, "rename to " + path.string() + " failed: " + ec.message());
  }
}

}  // namespace flatlift

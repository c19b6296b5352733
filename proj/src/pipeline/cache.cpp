// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatlift/pipeline/cache.hpp"

#include "flatlift/core/error.hpp"
#include "flatlift/core/png.hpp"

namespace flatlift::pipeline {

Cache::Cache(std::filesystem::path root) : root_(std::move(root)) {
  std::error_code ec;
  std::filesystem::create_directories(root_, ec);
  if (ec || !std::filesystem::is_directory(root_)) {
    throw Error(ErrorKind::CacheIo, "cannot create cache directory " + root_.string());
  }
}

std::filesystem::path Cache::path_for(const ContentHash& key) const {
  const std::string hex = key.hex();
  return root_ / hex.substr(0, 2) / hex;
}

std::optional<std::vector<std::uint8_t>> Cache::get(const ContentHash& key) const {
  const auto path = path_for(key);
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) return std::nullopt;
  try {
    return read_file(path);
  } catch (const Error& e) {
    throw Error(ErrorKind::CacheIo, "cannot read cache entry " + path.string());
  }
}

void Cache::put(const ContentHash& key, std::span<const std::uint8_t> bytes) const {
  try {
    write_file_atomic(path_for(key), bytes);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::CacheIo) throw;
    throw Error(ErrorKind::CacheIo, e.what());
  }
}

bool Cache::contains(const ContentHash& key) const {
  std::error_code ec;
  return std::filesystem::is_regular_file(path_for(key), ec);
}

}  // namespace flatlift::pipeline

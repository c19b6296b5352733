// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "flatlift/core/hash.hpp"

namespace flatlift::pipeline {

// Content-addressed byte store: <root>/<hh>/<hash>. Puts go through a unique
// temporary file and a rename, so concurrent readers see either nothing or
// the complete value.
class Cache {
 public:
  /// Creates the directory if needed. Throws Error{CacheIo}.
  explicit Cache(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  std::optional<std::vector<std::uint8_t>> get(const ContentHash& key) const;
  /// Throws Error{CacheIo}.
  void put(const ContentHash& key, std::span<const std::uint8_t> bytes) const;
  bool contains(const ContentHash& key) const;

 private:
  std::filesystem::path path_for(const ContentHash& key) const;

  std::filesystem::path root_;
};

}  // namespace flatlift::pipeline

// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace flatlift {

/// SHA-256 digest. Rendered as exactly 64 lowercase hex characters.
class ContentHash {
 public:
  using Digest = std::array<std::uint8_t, 32>;

  ContentHash() = default;
  explicit ContentHash(const Digest& digest) : digest_(digest) {}

  const Digest& digest() const noexcept { return digest_; }
  std::string hex() const;

  /// Throws Error{InvalidArgument} unless `hex` is 64 hex characters.
  static ContentHash from_hex(std::string_view hex);

  friend bool operator==(const ContentHash&, const ContentHash&) = default;
  friend auto operator<=>(const ContentHash&, const ContentHash&) = default;

 private:
  Digest digest_{};
};

ContentHash content_hash(std::span<const std::uint8_t> bytes);
ContentHash content_hash(std::string_view text);

// Incremental hashing for composite keys. Each field is length-prefixed so
// ("ab","c") and ("a","bc") produce different digests.
class Hasher {
 public:
  Hasher();
  ~Hasher();
  Hasher(Hasher&&) noexcept;
  Hasher& operator=(Hasher&&) noexcept;
  Hasher(const Hasher&) = delete;
  Hasher& operator=(const Hasher&) = delete;

  Hasher& field(std::span<const std::uint8_t> bytes);
  Hasher& field(std::string_view text);
  Hasher& field(const ContentHash& hash);
  ContentHash finish();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace flatlift

// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatlift/core/hash.hpp"

#include <openssl/evp.h>

#include "flatlift/core/error.hpp"

namespace flatlift {

namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string ContentHash::hex() const {
  std::string out;
  out.reserve(64);
  for (std::uint8_t b : digest_) {
    out.push_back(kHexDigits[b >> 4]);
    out.push_back(kHexDigits[b & 0x0f]);
  }
  return out;
}

ContentHash ContentHash::from_hex(std::string_view hex) {
  if (hex.size() != 64) {
    throw Error(ErrorKind::InvalidArgument, "content hash must be 64 hex chars");
  }
  Digest d{};
  for (std::size_t i = 0; i < 32; ++i) {
    int hi = hex_value(hex[2 * i]);
    int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) {
      throw Error(ErrorKind::InvalidArgument, "content hash contains a non-hex character");
    }
    d[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return ContentHash(d);
}

struct Hasher::Impl {
  EVP_MD_CTX* ctx = nullptr;
  Impl() : ctx(EVP_MD_CTX_new()) { EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr); }
  ~Impl() { EVP_MD_CTX_free(ctx); }
  void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx, data, n); }
};

Hasher::Hasher() : impl_(std::make_unique<Impl>()) {}
Hasher::~Hasher() = default;
Hasher::Hasher(Hasher&&) noexcept = default;
Hasher& Hasher::operator=(Hasher&&) noexcept = default;

Hasher& Hasher::field(std::span<const std::uint8_t> bytes) {
  std::uint64_t n = bytes.size();
  std::uint8_t len[8];
  for (int i = 0; i < 8; ++i) len[i] = static_cast<std::uint8_t>(n >> (8 * i));
  impl_->update(len, sizeof len);
  impl_->update(bytes.data(), bytes.size());
  return *this;
}

Hasher& Hasher::field(std::string_view text) {
  return field(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

Hasher& Hasher::field(const ContentHash& hash) { return field(std::span(hash.digest())); }

ContentHash Hasher::finish() {
  ContentHash::Digest d{};
  unsigned int n = 0;
  EVP_DigestFinal_ex(impl_->ctx, d.data(), &n);
  EVP_DigestInit_ex(impl_->ctx, EVP_sha256(), nullptr);
  return ContentHash(d);
}

ContentHash content_hash(std::span<const std::uint8_t> bytes) {
  ContentHash::Digest d{};
  unsigned int n = 0;
  EVP_Digest(bytes.data(), bytes.size(), d.data(), &n, EVP_sha256(), nullptr);
  return ContentHash(d);
}

ContentHash content_hash(std::string_view text) {
  return content_hash(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace flatlift

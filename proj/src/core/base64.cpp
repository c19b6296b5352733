// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatlift/core/base64.hpp"

#include <openssl/evp.h>

#include "flatlift/core/error.hpp"

namespace flatlift {

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  if (bytes.empty()) return out;
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw Error(ErrorKind::InvalidArgument, "base64 length is not a multiple of 4");
  if (text.empty()) return {};
  std::size_t pad = 0;
  while (pad < 2 && text[text.size() - 1 - pad] == '=') ++pad;
  // EVP_DecodeBlock skips leading whitespace and tolerates odd padding, so
  // the alphabet is checked here first.
  for (std::size_t i = 0; i < text.size() - pad; ++i) {
    const char c = text[i];
    const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '+' || c == '/';
    if (!ok) throw Error(ErrorKind::InvalidArgument, "invalid base64 character at offset " + std::to_string(i));
  }
  std::vector<std::uint8_t> out(text.size() / 4 * 3);
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "invalid base64 payload");
  out.resize(static_cast<std::size_t>(n) - pad);
  // Non-canonical encodings (stray bits under the padding) are rejected so
  // every payload has exactly one spelling.
  if (base64_encode(out) != text) throw Error(ErrorKind::InvalidArgument, "non-canonical base64 padding");
  return out;
}

}  // namespace flatlift

// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace flatlift {

/// Standard alphabet with '=' padding, no line breaks.
std::string base64_encode(std::span<const std::uint8_t> bytes);

/// Strict decoder: rejects whitespace, bad characters and bad padding with
/// Error{InvalidArgument}.
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace flatlift

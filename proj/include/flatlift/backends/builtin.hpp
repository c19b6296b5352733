// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string>
#include <string_view>

#include "flatlift/backends/transport.hpp"
#include "flatlift/condition/foreground.hpp"
#include "flatlift/mesh/bake.hpp"
#include "flatlift/mesh/inflate.hpp"
#include "flatlift/select/select.hpp"

namespace httplib {
class Server;
}

namespace flatlift::backends {

inline constexpr double kShadingSigma = 3.0;

struct BuiltinOptions {
  condition::MaskParams mask;
  mesh::InflateParams inflate;
  mesh::BakeParams bake;
  select::RealismWeights realism;
  double shading_sigma = kShadingSigma;
};

/// Offline stand-in for conditioned generation. The input is composited over
/// white and, on its foreground only, every channel is scaled by
///   canny: 0.5 + 0.5 * blur(max(0, 255 - dist_to_edge)) / 255
///   depth: 0.5 + 0.5 * depth / 255
/// with a Gaussian of `sigma` (replicated borders) and round-half-away
/// rounding. Without any edge pixel the canny field is 0.
RasterImage shading_overlay(const RasterImage& img, const ConditionMap& cond, const condition::ForegroundMask& fg,
                            double sigma = kShadingSigma);

/// 1-based argmax of the realism score, each image scored on its own
/// foreground mask (an empty foreground scores 0).
int builtin_vqa_choice(std::span<const RasterImage> images, const BuiltinOptions& options = {});

/// Serves one wire request with the builtin implementations. Throws
/// Error{InvalidArgument} for a malformed request; stage errors such as
/// EmptyForeground propagate.
std::string builtin_respond(std::string_view path, const std::string& body, const BuiltinOptions& options = {});

class BuiltinTransport final : public Transport {
 public:
  explicit BuiltinTransport(BuiltinOptions options = {}) : options_(std::move(options)) {}
  std::string id() const override { return "builtin"; }
  std::string post(std::string_view path, const std::string& body) override {
    return builtin_respond(path, body, options_);
  }

 private:
  BuiltinOptions options_;
};

using WireHandler = std::function<std::string(std::string_view path, const std::string& body)>;

/// Registers POST /v1/<role> for all roles. Errors map to HTTP statuses:
/// bad requests 400, unknown fixtures 404, unprocessable inputs 422, else 500.
void register_wire_routes(httplib::Server& server, WireHandler handler);

}  // namespace flatlift::backends

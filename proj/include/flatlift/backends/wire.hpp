// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>

#include "flatlift/backends/backend.hpp"
#include "flatlift/backends/transport.hpp"

namespace flatlift::backends {

// Client side of the JSON wire contract:
//   /v1/caption   {"image_png_b64"} -> {"caption"}
//   /v1/generate  {"image_png_b64", "condition_png_b64", "condition_kind",
//                  "prompt", "seed"} -> {"image_png_b64"}
//   /v1/vqa       {"question", "images_png_b64": [...]} -> {"answer"}
//   /v1/shape     {"image_png_b64", "seed"} -> {"mesh_ply_b64"}
//   /v1/texture   {"mesh_ply_b64", "image_png_b64"} -> {"mesh_ply_b64"}
// Bodies are compact JSON with sorted keys, so equal requests hash equally.
// Every call, successful or not, appends one record to the log.
class WireBackend final : public CaptionBackend,
                          public GenerateBackend,
                          public VqaBackend,
                          public ShapeBackend,
                          public TextureBackend {
 public:
  WireBackend(std::shared_ptr<Transport> transport, RetryPolicy retry, std::shared_ptr<CallLog> log);

  std::string id() const override { return transport_->id(); }

  Caption caption(const RasterImage& img) override;
  CandidateImage generate(const RasterImage& img, const ConditionMap& cond, const Caption& cap, std::uint64_t seed,
                          int condition_index) override;
  std::string vqa(const std::string& question, std::span<const RasterImage> images) override;
  TriMesh shape(const RasterImage& img, std::uint64_t seed) override;
  TriMesh texture(const TriMesh& mesh, const RasterImage& img) override;

  /// Sends a raw body with retries and logging; returns the response body.
  std::string call(BackendRole role, const std::string& body);

 private:
  std::shared_ptr<Transport> transport_;
  RetryPolicy retry_;
  std::shared_ptr<CallLog> log_;
};

// Request builders shared by the client, fixture tooling and tests.
std::string caption_request(const RasterImage& img);
std::string generate_request(const RasterImage& img, const ConditionMap& cond, const Caption& cap,
                             std::uint64_t seed);
std::string vqa_request(const std::string& question, std::span<const RasterImage> images);
std::string shape_request(const RasterImage& img, std::uint64_t seed);
std::string texture_request(const TriMesh& mesh, const RasterImage& img);

}  // namespace flatlift::backends

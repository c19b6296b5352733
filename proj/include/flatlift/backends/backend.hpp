// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flatlift/core/hash.hpp"
#include "flatlift/core/image.hpp"
#include "flatlift/core/mesh.hpp"
#include "flatlift/core/types.hpp"

namespace flatlift::backends {

enum class BackendRole : std::uint8_t { Caption, Generate, Vqa, Shape, Texture };

inline constexpr BackendRole kAllRoles[] = {BackendRole::Caption, BackendRole::Generate, BackendRole::Vqa,
                                            BackendRole::Shape, BackendRole::Texture};

/// "caption", "generate", "vqa", "shape", "texture".
std::string_view to_string(BackendRole role);
std::optional<BackendRole> backend_role_from_string(std::string_view name);
/// "/v1/<role>".
std::string endpoint_path(BackendRole role);

inline constexpr std::string_view kFallbackCaption = "a flat-colored illustration";
inline constexpr std::string_view kTokenEnv = "FLATLIFT_BACKEND_TOKEN";
inline constexpr int kMaxVqaImages = 16;

struct BackendEndpoint {
  // http://host[:port][/prefix], https://..., or fixture://<directory> for
  // offline replay of recorded responses.
  std::string base_url;
  BackendRole role = BackendRole::Caption;
  std::optional<std::string> auth_token;
  double timeout_s = 120;
  int max_retries = 2;

  /// Throws Error{InvalidConfig}.
  void validate() const;
};

struct BackendCallRecord {
  BackendRole role = BackendRole::Caption;
  ContentHash request_hash;
  ContentHash response_hash;  // all zero when no response arrived
  double latency_ms = 0;
  int attempts = 0;
  std::string backend_id;
  bool ok = false;
  std::string error;
};

// Append-only, shared between concurrent backend calls.
class CallLog {
 public:
  void append(BackendCallRecord record) {
    std::lock_guard lock(mu_);
    records_.push_back(std::move(record));
  }
  std::vector<BackendCallRecord> snapshot() const {
    std::lock_guard lock(mu_);
    return records_;
  }
  std::size_t size() const {
    std::lock_guard lock(mu_);
    return records_.size();
  }

 private:
  mutable std::mutex mu_;
  std::vector<BackendCallRecord> records_;
};

// One interface per model role. Implementations must be safe to call from
// several threads at once.

class CaptionBackend {
 public:
  virtual ~CaptionBackend() = default;
  virtual std::string id() const = 0;
  virtual Caption caption(const RasterImage& img) = 0;
};

class GenerateBackend {
 public:
  virtual ~GenerateBackend() = default;
  virtual std::string id() const = 0;
  virtual CandidateImage generate(const RasterImage& img, const ConditionMap& cond, const Caption& cap,
                                  std::uint64_t seed, int condition_index) = 0;
};

class VqaBackend {
 public:
  virtual ~VqaBackend() = default;
  virtual std::string id() const = 0;
  virtual std::string vqa(const std::string& question, std::span<const RasterImage> images) = 0;
};

class ShapeBackend {
 public:
  virtual ~ShapeBackend() = default;
  virtual std::string id() const = 0;
  virtual TriMesh shape(const RasterImage& img, std::uint64_t seed) = 0;
};

class TextureBackend {
 public:
  virtual ~TextureBackend() = default;
  virtual std::string id() const = 0;
  virtual TriMesh texture(const TriMesh& mesh, const RasterImage& img) = 0;
};

}  // namespace flatlift::backends

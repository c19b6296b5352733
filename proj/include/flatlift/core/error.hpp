// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace flatlift {

enum class ErrorKind {
  MalformedImage,
  UnsupportedFormat,
  DimensionMismatch,
  EmptyForeground,
  InvalidArgument,
  InvalidConfig,
  BackendUnavailable,
  MalformedResponse,
  MalformedMesh,
  DegenerateMesh,
  NoCandidates,
  Unparseable,
  CacheIo,
  ManifestCorrupt,
  ManifestInvalid,
  RunMismatch,
  StageFailed,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (CLI exit
// codes, HTTP status mapping, pipeline degradation rules) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Wraps an error raised inside a pipeline stage with the stage name.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& inner)
      : Error(ErrorKind::StageFailed, stage + ": " + inner.what()),
        stage_(std::move(stage)),
        inner_kind_(inner.kind()) {}

  const std::string& stage() const noexcept { return stage_; }
  ErrorKind inner_kind() const noexcept { return inner_kind_; }

 private:
  std::string stage_;
  ErrorKind inner_kind_;
};

}  // namespace flatlift

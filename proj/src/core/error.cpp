// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatlift/core/error.hpp"

namespace flatlift {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedImage: return "MalformedImage";
    case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::EmptyForeground: return "EmptyForeground";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::BackendUnavailable: return "BackendUnavailable";
    case ErrorKind::MalformedResponse: return "MalformedResponse";
    case ErrorKind::MalformedMesh: return "MalformedMesh";
    case ErrorKind::DegenerateMesh: return "DegenerateMesh";
    case ErrorKind::NoCandidates: return "NoCandidates";
    case ErrorKind::Unparseable: return "Unparseable";
    case ErrorKind::CacheIo: return "CacheIo";
    case ErrorKind::ManifestCorrupt: return "ManifestCorrupt";
    case ErrorKind::ManifestInvalid: return "ManifestInvalid";
    case ErrorKind::RunMismatch: return "RunMismatch";
    case ErrorKind::StageFailed: return "StageFailed";
  }
  return "Unknown";
}

}  // namespace flatlift

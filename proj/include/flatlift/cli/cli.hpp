// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "flatlift/pipeline/pipeline.hpp"

namespace flatlift::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitStageFailure = 2;

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

/// Parses and runs one command line (args[0] is the program name). Returns
/// the process exit code: 0 success, 1 usage or configuration error, 2 when
/// the pipeline or another runtime step fails.
/// `base_options` seeds the run options of every pipeline invocation (tests
/// inject transports through it).
int cli_dispatch(const std::vector<std::string>& args, Streams io,
                 const pipeline::RunOptions& base_options = {});

}  // namespace flatlift::cli

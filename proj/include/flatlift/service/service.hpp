// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "flatlift/pipeline/config.hpp"
#include "flatlift/pipeline/pipeline.hpp"

namespace httplib {
class Server;
}

namespace flatlift::service {

// Listed in the order a job moves through them; Failed can follow any.
enum class JobStatus : std::uint8_t {
  Queued,
  ConditionsReady,
  CandidatesReady,
  AwaitingSelection,
  ShapeReady,
  Done,
  Failed,
};

std::string_view to_string(JobStatus status);

/// Status implied by a manifest alone.
JobStatus status_from_manifest(const pipeline::RunManifest& m);

struct ServiceOptions {
  // Uploaded configs are merged over this one. Endpoints and cache_dir are
  // server-side settings and cannot be changed per job.
  pipeline::PipelineConfig base;
  std::filesystem::path runs_dir = "flatlift-runs";
  pipeline::RunOptions run_options;
};

/// The job API. Each job runs on its own worker thread in runs_dir/<job_id>;
/// manifest.json there is the only persistent state.
class JobService {
 public:
  explicit JobService(ServiceOptions options);
  ~JobService();  // waits for running workers
  JobService(const JobService&) = delete;
  JobService& operator=(const JobService&) = delete;

  void mount(httplib::Server& server);

  /// Blocks until no worker is running.
  void wait_idle();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Serves the job API on host:port until the process is stopped. Throws
/// Error{InvalidArgument} when the port cannot be bound.
void serve(const ServiceOptions& options, const std::string& host, int port, std::ostream& log);

}  // namespace flatlift::service

// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatlift/service/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <map>
#include <mutex>
#include <random>
#include <thread>

#include "flatlift/core/error.hpp"
#include "flatlift/core/hash.hpp"
#include "flatlift/core/png.hpp"

namespace flatlift::service {

namespace fs = std::filesystem;
using nlohmann::json;
using pipeline::PipelineConfig;
using pipeline::RunManifest;
using pipeline::RunStatus;

std::string_view to_string(JobStatus status) {
  switch (status) {
    case JobStatus::Queued: return "Queued";
    case JobStatus::ConditionsReady: return "ConditionsReady";
    case JobStatus::CandidatesReady: return "CandidatesReady";
    case JobStatus::AwaitingSelection: return "AwaitingSelection";
    case JobStatus::ShapeReady: return "ShapeReady";
    case JobStatus::Done: return "Done";
    case JobStatus::Failed: return "Failed";
  }
  return "Failed";
}

JobStatus status_from_manifest(const RunManifest& m) {
  switch (m.status) {
    case RunStatus::Complete: return JobStatus::Done;
    case RunStatus::Failed: return JobStatus::Failed;
    case RunStatus::Paused: return JobStatus::AwaitingSelection;
    case RunStatus::Running: break;
  }
  if (m.completed("shape")) return JobStatus::ShapeReady;
  if (m.completed("candidates")) return JobStatus::CandidatesReady;
  if (m.completed("conditions")) return JobStatus::ConditionsReady;
  return JobStatus::Queued;
}

namespace {

constexpr std::size_t kMaxUpload = 32u << 20;

struct Job {
  std::string id;
  fs::path dir;
  PipelineConfig cfg;
  bool interactive = false;

  std::mutex mu;
  std::thread worker;
  bool running = false;
  bool failed = false;
  std::string error;
  JobStatus high = JobStatus::Queued;  // keeps reported status monotone
};

struct HttpError {
  int status;
  std::string message;
};

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

std::string content_type_for(const std::string& name) {
  const auto ext = fs::path(name).extension().string();
  if (ext == ".png") return "image/png";
  if (ext == ".json") return "application/json";
  return "application/octet-stream";
}

std::string nonce() {
  static std::atomic<std::uint64_t> counter{0};
  std::random_device rd;
  return std::to_string(rd()) + "-" + std::to_string(rd()) + "-" + std::to_string(counter++);
}

bool parse_flag(const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0" || text.empty()) return false;
  throw HttpError{400, "interactive must be true or false"};
}

}  // namespace

struct JobService::Impl {
  ServiceOptions opts;
  std::mutex mu;
  std::map<std::string, std::shared_ptr<Job>> jobs;
  std::condition_variable idle;
  int active = 0;

  explicit Impl(ServiceOptions o) : opts(std::move(o)) {}

  std::shared_ptr<Job> find(const std::string& id) {
    std::lock_guard lock(mu);
    const auto it = jobs.find(id);
    if (it == jobs.end()) throw HttpError{404, "unknown job " + id};
    return it->second;
  }

  // Caller holds job->mu and has set running.
  void launch(const std::shared_ptr<Job>& job, std::vector<std::uint8_t> input, std::optional<int> override_index) {
    {
      std::lock_guard lock(mu);
      ++active;
    }
    if (job->worker.joinable()) job->worker.join();
    job->worker = std::thread([this, job, input = std::move(input), override_index] {
      pipeline::RunOptions o = opts.run_options;
      o.override_index = override_index;
      try {
        if (input.empty()) {
          pipeline::resume(job->dir, job->cfg, o);
        } else {
          if (job->interactive) o.stop_before = "select";
          pipeline::run_pipeline(input, job->cfg, job->dir, o);
        }
      } catch (const std::exception& e) {
        std::lock_guard lock(job->mu);
        job->failed = true;
        job->error = e.what();
      }
      {
        std::lock_guard lock(job->mu);
        job->running = false;
      }
      std::lock_guard lock(mu);
      --active;
      idle.notify_all();
    });
  }

  PipelineConfig job_config(const httplib::Request& req, bool& interactive) {
    if (!req.has_file("config")) return opts.base;
    json doc = json::parse(req.get_file_value("config").content, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw HttpError{400, "config must be a JSON object"};
    if (doc.contains("interactive")) {
      if (!doc["interactive"].is_boolean()) throw HttpError{400, "interactive must be a boolean"};
      interactive = interactive || doc["interactive"].get<bool>();
      doc.erase("interactive");
    }
    for (const char* key : {"endpoints", "cache_dir"}) {
      if (doc.contains(key)) throw HttpError{400, std::string(key) + " cannot be set per job"};
    }
    json merged = pipeline::to_json(opts.base);
    merged.merge_patch(doc);
    try {
      PipelineConfig cfg = pipeline::config_from_json(merged);
      cfg.validate();
      return cfg;
    } catch (const Error& e) {
      throw HttpError{400, e.what()};
    }
  }

  void create(const httplib::Request& req, httplib::Response& res) {
    if (!req.is_multipart_form_data()) throw HttpError{400, "expected multipart/form-data"};
    if (!req.has_file("image")) throw HttpError{400, "missing image part"};
    const std::string& body = req.get_file_value("image").content;
    std::vector<std::uint8_t> input(body.begin(), body.end());
    try {
      (void)decode_image(input);
    } catch (const Error& e) {
      throw HttpError{400, e.what()};
    }
    bool interactive = req.has_file("interactive") && parse_flag(req.get_file_value("interactive").content);
    PipelineConfig cfg = job_config(req, interactive);

    Hasher h;
    h.field("flatlift-job-v1").field(content_hash(input)).field(pipeline::identity_json(cfg).dump());
    h.field(interactive ? "interactive" : "batch");
    if (interactive) h.field(nonce());
    const std::string id = h.finish().hex();

    std::shared_ptr<Job> job;
    {
      std::lock_guard lock(mu);
      if (jobs.count(id)) {
        send_json(res, 200, {{"job_id", id}});
        return;
      }
      job = std::make_shared<Job>();
      job->id = id;
      job->dir = opts.runs_dir / id;
      job->cfg = std::move(cfg);
      job->interactive = interactive;
      jobs.emplace(id, job);
    }
    std::lock_guard lock(job->mu);
    job->running = true;
    launch(job, std::move(input), std::nullopt);
    send_json(res, 201, {{"job_id", id}});
  }

  json state(const std::shared_ptr<Job>& job) {
    std::optional<RunManifest> m;
    try {
      m = pipeline::read_manifest(job->dir);
    } catch (const Error&) {
      // Not written yet.
    }
    std::lock_guard lock(job->mu);
    JobStatus s = m ? status_from_manifest(*m) : JobStatus::Queued;
    if (job->failed) s = JobStatus::Failed;
    if (s != JobStatus::Failed) {
      s = std::max(s, job->high);
      job->high = s;
    }
    const bool awaiting = !job->running && m && m->status == RunStatus::Paused && !job->failed;
    return {{"job_id", job->id},
            {"status", std::string(to_string(s))},
            {"awaiting_selection", awaiting},
            {"interactive", job->interactive},
            {"candidate_count", job->cfg.candidate_count()},
            {"manifest", m ? pipeline::to_json(*m) : json(nullptr)},
            {"error", job->failed ? json(job->error) : json(nullptr)}};
  }

  void artifact(const std::shared_ptr<Job>& job, const std::string& name, httplib::Response& res) {
    RunManifest m;
    try {
      m = pipeline::read_manifest(job->dir);
    } catch (const Error&) {
      throw HttpError{404, "no artifacts yet"};
    }
    if (!pipeline::is_run_artifact(m, name)) throw HttpError{404, "unknown artifact " + name};
    std::vector<std::uint8_t> bytes;
    try {
      bytes = read_file(job->dir / name);
    } catch (const Error&) {
      throw HttpError{404, "artifact missing on disk: " + name};
    }
    res.status = 200;
    res.set_content(std::string(bytes.begin(), bytes.end()), content_type_for(name));
  }

  void select(const std::shared_ptr<Job>& job, const std::string& body, httplib::Response& res) {
    const json doc = json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw HttpError{400, "body must be a JSON object"};
    std::optional<int> index;
    if (doc.contains("index")) {
      if (!doc["index"].is_number_integer()) throw HttpError{400, "index must be an integer"};
      const auto k = doc["index"].get<long long>();
      const int n = job->cfg.candidate_count();
      if (k < 1 || k > n) {
        throw HttpError{400, "index " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]"};
      }
      index = static_cast<int>(k);
    } else if (!(doc.contains("accept_suggestion") && doc["accept_suggestion"] == true)) {
      throw HttpError{400, "expected {\"index\": k} or {\"accept_suggestion\": true}"};
    }

    std::optional<RunManifest> m;
    try {
      m = pipeline::read_manifest(job->dir);
    } catch (const Error&) {
    }
    std::lock_guard lock(job->mu);
    if (job->running || job->failed || !m || m->status != RunStatus::Paused) {
      throw HttpError{409, "job is not awaiting selection"};
    }
    job->running = true;
    launch(job, {}, index);
    send_json(res, 202, {{"job_id", job->id}, {"index", index ? json(*index) : json(nullptr)}});
  }
};

JobService::JobService(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

JobService::~JobService() {
  wait_idle();
  std::lock_guard lock(impl_->mu);
  for (auto& [id, job] : impl_->jobs) {
    if (job->worker.joinable()) job->worker.join();
  }
}

void JobService::wait_idle() {
  std::unique_lock lock(impl_->mu);
  impl_->idle.wait(lock, [&] { return impl_->active == 0; });
}

void JobService::mount(httplib::Server& server) {
  Impl* impl = impl_.get();
  // Route handlers report failures by throwing HttpError.
  auto guarded = [](auto fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
      try {
        fn(req, res);
      } catch (const HttpError& e) {
        send_json(res, e.status, {{"error", e.message}});
      } catch (const std::exception& e) {
        send_json(res, 500, {{"error", e.what()}});
      }
    };
  };
  server.set_payload_max_length(kMaxUpload);
  server.Get("/api/health", guarded([](const auto&, auto& res) { send_json(res, 200, {{"ok", true}}); }));
  server.Post("/api/jobs", guarded([impl](const auto& req, auto& res) { impl->create(req, res); }));
  server.Get(R"(/api/jobs/([0-9a-f]{64}))", guarded([impl](const auto& req, auto& res) {
               send_json(res, 200, impl->state(impl->find(req.matches[1])));
             }));
  server.Get(R"(/api/jobs/([0-9a-f]{64})/artifact/(.+))", guarded([impl](const auto& req, auto& res) {
               impl->artifact(impl->find(req.matches[1]), req.matches[2], res);
             }));
  server.Post(R"(/api/jobs/([0-9a-f]{64})/select)", guarded([impl](const auto& req, auto& res) {
                impl->select(impl->find(req.matches[1]), req.body, res);
              }));
  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) send_json(res, res.status, {{"error", res.status == 404 ? "not found" : "bad request"}});
  });
}

void serve(const ServiceOptions& options, const std::string& host, int port, std::ostream& log) {
  httplib::Server server;
  JobService jobs(options);
  jobs.mount(server);
  if (!server.bind_to_port(host, port)) {
    throw Error(ErrorKind::InvalidArgument, "cannot bind " + host + ":" + std::to_string(port));
  }
  log << "listening on http://" << host << ":" << port << "\n" << std::flush;
  server.listen_after_bind();
}

}  // namespace flatlift::service

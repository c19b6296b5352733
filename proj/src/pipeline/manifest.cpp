// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatlift/pipeline/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

#include "flatlift/core/error.hpp"
#include "flatlift/core/png.hpp"

namespace flatlift::pipeline {

using nlohmann::json;

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Running: return "running";
    case RunStatus::Paused: return "paused";
    case RunStatus::Complete: return "complete";
    case RunStatus::Failed: return "failed";
  }
  return "?";
}

std::optional<RunStatus> run_status_from_string(std::string_view name) {
  for (RunStatus s : {RunStatus::Running, RunStatus::Paused, RunStatus::Complete, RunStatus::Failed}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

const StageRecord* RunManifest::stage(std::string_view name) const {
  for (const auto& s : stages)
    if (s.name == name) return &s;
  return nullptr;
}

std::size_t RunManifest::call_count(backends::BackendRole role) const {
  std::size_t n = 0;
  for (const auto& c : backend_calls) n += c.record.role == role;
  return n;
}

namespace {

mesh::ThinnessReport thinness_from_json(const json& j) {
  mesh::ThinnessReport r;
  for (std::size_t i = 0; i < 3; ++i) r.principal_extents[i] = j.at("principal_extents").at(i).get<double>();
  r.thinness_ratio = j.at("thinness_ratio").get<double>();
  r.flagged_thin = j.at("flagged_thin").get<bool>();
  return r;
}

std::optional<mesh::ThinnessReport> thinness_at(const RunManifest& m, std::string_view stage, const char* key) {
  const StageRecord* s = m.stage(stage);
  if (s == nullptr || !s->meta.contains(key)) return std::nullopt;
  return thinness_from_json(s->meta.at(key));
}

}  // namespace

std::optional<SelectionInfo> RunManifest::selection() const {
  const StageRecord* s = stage("select");
  if (s == nullptr) return std::nullopt;
  SelectionInfo info;
  info.chosen_index = s->meta.at("chosen_index").get<int>();
  info.method = selection_method_from_string(s->meta.at("method").get<std::string>()).value();
  info.rationale = s->meta.at("rationale").get<std::string>();
  info.candidate_count = s->meta.at("candidate_count").get<int>();
  return info;
}

std::optional<condition::FlatnessReport> RunManifest::flatness() const {
  const StageRecord* s = stage("flatness");
  if (s == nullptr) return std::nullopt;
  condition::FlatnessReport r;
  r.distinct_color_count = s->meta.at("distinct_color_count").get<int>();
  r.flat_pixel_fraction = s->meta.at("flat_pixel_fraction").get<double>();
  r.shading_score = s->meta.at("shading_score").get<double>();
  r.is_flat = s->meta.at("is_flat").get<bool>();
  return r;
}

std::optional<mesh::ThinnessReport> RunManifest::baseline_thinness() const {
  return thinness_at(*this, "shape", "baseline_thinness");
}

std::optional<mesh::ThinnessReport> RunManifest::final_thinness() const {
  return thinness_at(*this, "bake", "final_thinness");
}

std::vector<std::string> RunManifest::warnings() const {
  std::vector<std::string> out;
  for (const auto& s : stages) {
    if (!s.meta.contains("warnings")) continue;
    for (const auto& w : s.meta.at("warnings")) out.push_back(s.name + ": " + w.get<std::string>());
  }
  return out;
}

json to_json(const condition::FlatnessReport& r) {
  return {{"distinct_color_count", r.distinct_color_count},
          {"flat_pixel_fraction", r.flat_pixel_fraction},
          {"shading_score", r.shading_score},
          {"is_flat", r.is_flat}};
}

json to_json(const mesh::ThinnessReport& r) {
  return {{"principal_extents", r.principal_extents},
          {"thinness_ratio", r.thinness_ratio},
          {"flagged_thin", r.flagged_thin}};
}

json to_json(const CallEntry& c) {
  const auto& r = c.record;
  return {{"stage", c.stage},
          {"role", std::string(backends::to_string(r.role))},
          {"request_hash", r.request_hash.hex()},
          {"response_hash", r.response_hash.hex()},
          {"latency_ms", r.latency_ms},
          {"attempts", r.attempts},
          {"backend_id", r.backend_id},
          {"ok", r.ok},
          {"error", r.error}};
}

json to_json(const RunManifest& m) {
  json j;
  j["schema"] = m.schema;
  j["run_id"] = m.run_id.hex();
  j["input_hash"] = m.input_hash.hex();
  j["config"] = m.config;
  j["override_index"] = m.override_index ? json(*m.override_index) : json(nullptr);
  j["status"] = std::string(to_string(m.status));
  if (!m.failed_stage.empty()) j["failed_stage"] = m.failed_stage;
  if (!m.error.empty()) j["error"] = m.error;

  json stages = json::array();
  for (const auto& s : m.stages) {
    json ins = json::array();
    for (const auto& h : s.input_hashes) ins.push_back(h.hex());
    json outs = json::object();
    for (const auto& [path, h] : s.output_hashes) outs[path] = h.hex();
    stages.push_back({{"name", s.name},
                      {"key", s.key.hex()},
                      {"input_hashes", ins},
                      {"output_hashes", outs},
                      {"meta", s.meta},
                      {"started_at", s.started_at},
                      {"finished_at", s.finished_at},
                      {"cache_hit", s.cache_hit}});
  }
  j["stages"] = stages;

  json calls = json::array();
  for (const auto& c : m.backend_calls) calls.push_back(to_json(c));
  j["backend_calls"] = calls;

  if (auto sel = m.selection()) {
    j["selection"] = {{"chosen_index", sel->chosen_index},
                      {"method", std::string(to_string(sel->method))},
                      {"rationale", sel->rationale},
                      {"candidate_count", sel->candidate_count}};
  } else {
    j["selection"] = nullptr;
  }
  json diag = json::object();
  if (auto f = m.flatness()) diag["flatness"] = to_json(*f);
  json thin = json::object();
  if (auto b = m.baseline_thinness()) thin["baseline"] = to_json(*b);
  if (auto f = m.final_thinness()) thin["final"] = to_json(*f);
  diag["thinness"] = thin;
  j["diagnostics"] = diag;
  j["warnings"] = m.warnings();
  return j;
}

namespace {

ContentHash hash_field(const json& j) { return ContentHash::from_hex(j.get<std::string>()); }

}  // namespace

RunManifest manifest_from_json(const json& doc) {
  try {
    if (!doc.is_object()) throw Error(ErrorKind::ManifestCorrupt, "manifest is not an object");
    const int schema = doc.at("schema").get<int>();
    if (schema != kManifestSchema) {
      throw Error(ErrorKind::ManifestCorrupt, "unsupported manifest schema " + std::to_string(schema));
    }
    RunManifest m;
    m.run_id = hash_field(doc.at("run_id"));
    m.input_hash = hash_field(doc.at("input_hash"));
    m.config = doc.at("config");
    if (!doc.at("override_index").is_null()) m.override_index = doc.at("override_index").get<int>();
    auto status = run_status_from_string(doc.at("status").get<std::string>());
    if (!status) throw Error(ErrorKind::ManifestCorrupt, "unknown run status");
    m.status = *status;
    m.failed_stage = doc.value("failed_stage", "");
    m.error = doc.value("error", "");

    std::size_t order = 0;
    for (const auto& s : doc.at("stages")) {
      StageRecord r;
      r.name = s.at("name").get<std::string>();
      // Stages are recorded in pipeline order without gaps.
      if (order >= kStageNames.size() || r.name != kStageNames[order]) {
        throw Error(ErrorKind::ManifestCorrupt, "unexpected stage '" + r.name + "'");
      }
      ++order;
      r.key = hash_field(s.at("key"));
      for (const auto& h : s.at("input_hashes")) r.input_hashes.push_back(hash_field(h));
      for (const auto& [path, h] : s.at("output_hashes").items()) r.output_hashes[path] = hash_field(h);
      r.meta = s.at("meta");
      r.started_at = s.at("started_at").get<std::string>();
      r.finished_at = s.at("finished_at").get<std::string>();
      r.cache_hit = s.at("cache_hit").get<bool>();
      m.stages.push_back(std::move(r));
    }
    for (const auto& c : doc.at("backend_calls")) {
      CallEntry e;
      e.stage = c.at("stage").get<std::string>();
      auto role = backends::backend_role_from_string(c.at("role").get<std::string>());
      if (!role) throw Error(ErrorKind::ManifestCorrupt, "unknown backend role");
      e.record.role = *role;
      e.record.request_hash = hash_field(c.at("request_hash"));
      e.record.response_hash = hash_field(c.at("response_hash"));
      e.record.latency_ms = c.at("latency_ms").get<double>();
      e.record.attempts = c.at("attempts").get<int>();
      e.record.backend_id = c.at("backend_id").get<std::string>();
      e.record.ok = c.at("ok").get<bool>();
      e.record.error = c.at("error").get<std::string>();
      m.backend_calls.push_back(std::move(e));
    }
    // The derived views must parse too.
    (void)m.selection();
    (void)m.flatness();
    (void)m.baseline_thinness();
    (void)m.final_thinness();
    (void)m.warnings();
    return m;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ManifestCorrupt) throw;
    throw Error(ErrorKind::ManifestCorrupt, e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorKind::ManifestCorrupt, e.what());
  }
}

RunManifest read_manifest(const std::filesystem::path& run_dir) {
  const auto path = run_dir / kManifestFile;
  std::vector<std::uint8_t> bytes;
  try {
    bytes = read_file(path);
  } catch (const Error&) {
    throw Error(ErrorKind::ManifestCorrupt, "cannot read " + path.string());
  }
  json doc = json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorKind::ManifestCorrupt, path.string() + " is not valid JSON");
  return manifest_from_json(doc);
}

void write_manifest(const std::filesystem::path& run_dir, const RunManifest& m) {
  const std::string text = to_json(m).dump(2) + "\n";
  write_file_atomic(run_dir / kManifestFile,
                    {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

json stable_view(const RunManifest& m) {
  json j = to_json(m);
  for (auto& s : j["stages"]) {
    s.erase("started_at");
    s.erase("finished_at");
    s.erase("cache_hit");
  }
  for (auto& c : j["backend_calls"]) c.erase("latency_ms");
  return j;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

}  // namespace flatlift::pipeline

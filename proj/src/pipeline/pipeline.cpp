// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatlift/pipeline/pipeline.hpp"

#include <algorithm>
#include <future>

#include "flatlift/backends/builtin.hpp"
#include "flatlift/backends/wire.hpp"
#include "flatlift/condition/canny.hpp"
#include "flatlift/condition/depth.hpp"
#include "flatlift/core/error.hpp"
#include "flatlift/core/png.hpp"
#include "flatlift/mesh/mesh_io.hpp"
#include "flatlift/pipeline/cache.hpp"

namespace flatlift::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;
using backends::BackendRole;
using Bytes = std::vector<std::uint8_t>;

ContentHash compute_run_id(std::span<const std::uint8_t> input_png, const PipelineConfig& cfg) {
  return Hasher().field("flatlift-run-v1").field(content_hash(input_png)).field(identity_json(cfg).dump()).finish();
}

namespace {

constexpr std::string_view kInputFile = "input.png";

std::span<const std::uint8_t> bytes_of(const std::string& s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

struct StageOutput {
  std::map<std::string, Bytes> files;
  json meta = json::object();
};

std::string condition_file(ConditionKind kind, int index) {
  return "conditions/" + std::string(wire_name(kind)) + "_" + std::to_string(index) + ".png";
}

std::string candidate_file(int index) { return "candidates/cand_" + std::to_string(index) + ".png"; }

class Runner {
 public:
  Runner(const PipelineConfig& cfg, fs::path run_dir, const RunOptions& options, Bytes input,
         std::optional<RunManifest> prior)
      : cfg_(cfg), dir_(std::move(run_dir)), opts_(options), input_(std::move(input)), prior_(std::move(prior)) {
    work_ = clamp_resolution(decode_image(input_), cfg_.max_side);
    if (!cfg_.cache_dir.empty()) cache_.emplace(cfg_.cache_dir);
    builtin_ = std::make_shared<backends::BuiltinTransport>(cfg_.builtin_options());
    const json id = identity_json(cfg_);
    builtin_identity_ = {{"mask", id["mask"]},       {"inflate", id["inflate"]},
                         {"bake", id["bake"]},       {"realism", id["realism"]},
                         {"generator", id["generator"]}};
    m_.run_id = compute_run_id(input_, cfg_);
    m_.input_hash = content_hash(input_);
    m_.config = id;
    m_.override_index = opts_.override_index;
    hashes_[std::string(kInputFile)] = m_.input_hash;
    files_[std::string(kInputFile)] = input_;
  }

  RunManifest run() {
    write_manifest(dir_, m_);
    const json seed = json(cfg_.seed);

    if (!stage("mask", {std::string(kInputFile)}, {}, {{"max_side", cfg_.max_side}, {"mask", m_.config["mask"]}},
               [&] { return run_mask(); }))
      return m_;
    if (!stage("flatness", {std::string(kInputFile), "mask.png"}, {},
               {{"max_side", cfg_.max_side}, {"flatness", m_.config["flatness"]}}, [&] { return run_flatness(); }))
      return m_;
    if (!stage("conditions", {std::string(kInputFile), "mask.png"}, {},
               {{"max_side", cfg_.max_side},
                {"canny", m_.config["canny"]},
                {"n_canny", cfg_.effective_n_canny()},
                {"n_depth", cfg_.effective_n_depth()}},
               [&] { return run_conditions(); }))
      return m_;
    if (!stage("caption", {std::string(kInputFile)}, {},
               {{"max_side", cfg_.max_side}, {"backend", identity(BackendRole::Caption)}},
               [&] { return run_caption(); }))
      return m_;

    std::vector<std::string> cand_inputs = {std::string(kInputFile), "mask.png"};
    for (const auto& c : meta("conditions").at("conditions")) cand_inputs.push_back(c.at("file").get<std::string>());
    const std::string caption_text = meta("caption").at("text").get<std::string>();
    if (!stage("candidates", cand_inputs, {content_hash(caption_text)},
               {{"max_side", cfg_.max_side}, {"seed", seed}, {"backend", identity(BackendRole::Generate)}},
               [&] { return run_candidates(caption_text); }))
      return m_;

    std::vector<std::string> sel_inputs = {"mask.png"};
    for (const auto& c : meta("candidates").at("candidates")) sel_inputs.push_back(c.at("file").get<std::string>());
    if (!stage("select", sel_inputs, {},
               {{"override_index", opts_.override_index ? json(*opts_.override_index) : json(nullptr)},
                {"realism", m_.config["realism"]},
                {"mask", m_.config["mask"]},
                {"iou_warning", cfg_.iou_warning},
                {"backend", identity(BackendRole::Vqa)}},
               [&] { return run_select(); }))
      return m_;
    if (!stage("shape", {"proxy.png", std::string(kInputFile)}, {},
               {{"max_side", cfg_.max_side},
                {"seed", seed},
                {"thin_threshold", cfg_.thin_threshold},
                {"backend", identity(BackendRole::Shape)}},
               [&] { return run_shape(); }))
      return m_;
    if (!stage("bake", {"shape.ply", std::string(kInputFile)}, {},
               {{"max_side", cfg_.max_side},
                {"thin_threshold", cfg_.thin_threshold},
                {"backend", identity(BackendRole::Texture)}},
               [&] { return run_bake(); }))
      return m_;

    m_.status = RunStatus::Complete;
    write_manifest(dir_, m_);
    return m_;
  }

 private:
  // Runs, restores or replays one stage. Returns false when the run stops
  // before it.
  bool stage(std::string_view name, const std::vector<std::string>& input_files,
             const std::vector<ContentHash>& extra_inputs, const json& config_subset,
             const std::function<StageOutput()>& body) {
    if (opts_.stop_before && *opts_.stop_before == name) {
      m_.status = RunStatus::Paused;
      write_manifest(dir_, m_);
      return false;
    }

    StageRecord rec;
    rec.name = std::string(name);
    for (const auto& f : input_files) rec.input_hashes.push_back(hashes_.at(f));
    for (const auto& h : extra_inputs) rec.input_hashes.push_back(h);
    Hasher key;
    key.field("flatlift-stage-v1").field(name);
    for (const auto& h : rec.input_hashes) key.field(h);
    key.field(config_subset.dump());
    rec.key = key.finish();

    if (!restore_from_prior(rec) && !restore_from_cache(rec)) execute(rec, body);

    m_.stages.push_back(rec);
    write_manifest(dir_, m_);
    if (opts_.on_stage) opts_.on_stage(m_);
    return true;
  }

  bool restore_from_prior(StageRecord& rec) {
    if (!prior_) return false;
    const StageRecord* old = prior_->stage(rec.name);
    if (old == nullptr || old->key != rec.key) return false;
    std::map<std::string, Bytes> loaded;
    for (const auto& [path, hash] : old->output_hashes) {
      std::error_code ec;
      if (!fs::is_regular_file(dir_ / path, ec)) return false;
      Bytes bytes = read_file(dir_ / path);
      if (content_hash(bytes) != hash) return false;
      loaded[path] = std::move(bytes);
    }
    for (auto& [path, bytes] : loaded) adopt(path, std::move(bytes));
    rec = *old;
    rec.cache_hit = true;
    for (const auto& c : prior_->backend_calls)
      if (c.stage == rec.name) m_.backend_calls.push_back(c);
    return true;
  }

  bool restore_from_cache(StageRecord& rec) {
    if (!cache_) return false;
    auto entry_bytes = cache_->get(rec.key);
    if (!entry_bytes) return false;
    json entry = json::parse(entry_bytes->begin(), entry_bytes->end(), nullptr, false);
    if (entry.is_discarded() || entry.value("stage", "") != rec.name) return false;
    std::map<std::string, Bytes> loaded;
    for (const auto& [path, hex] : entry.at("outputs").items()) {
      const ContentHash hash = ContentHash::from_hex(hex.get<std::string>());
      auto blob = cache_->get(hash);
      if (!blob || content_hash(*blob) != hash) return false;
      loaded[path] = std::move(*blob);
    }
    rec.started_at = utc_timestamp();
    for (auto& [path, bytes] : loaded) {
      write_file_atomic(dir_ / path, bytes);
      rec.output_hashes[path] = content_hash(bytes);
      adopt(path, std::move(bytes));
    }
    rec.meta = entry.at("meta");
    rec.finished_at = utc_timestamp();
    rec.cache_hit = true;
    return true;
  }

  void execute(StageRecord& rec, const std::function<StageOutput()>& body) {
    rec.started_at = utc_timestamp();
    stage_logs_.clear();
    StageOutput out;
    try {
      try {
        out = body();
      } catch (const Error&) {
        throw;
      } catch (const std::exception& e) {
        throw Error(ErrorKind::StageFailed, e.what());
      }
      collect_calls(rec.name);
      for (auto& [path, bytes] : out.files) {
        write_file_atomic(dir_ / path, bytes);
        rec.output_hashes[path] = content_hash(bytes);
      }
    } catch (const Error& e) {
      collect_calls(rec.name);
      m_.status = RunStatus::Failed;
      m_.failed_stage = rec.name;
      m_.error = e.what();
      write_manifest(dir_, m_);
      throw StageError(rec.name, e);
    }
    rec.meta = std::move(out.meta);
    rec.finished_at = utc_timestamp();
    rec.cache_hit = false;

    if (cache_) {
      json outputs = json::object();
      for (const auto& [path, bytes] : out.files) {
        const ContentHash h = rec.output_hashes.at(path);
        if (!cache_->contains(h)) cache_->put(h, bytes);
        outputs[path] = h.hex();
      }
      const std::string entry = json{{"stage", rec.name}, {"outputs", outputs}, {"meta", rec.meta}}.dump();
      cache_->put(rec.key, bytes_of(entry));
    }
    for (auto& [path, bytes] : out.files) adopt(path, std::move(bytes));
  }

  void collect_calls(const std::string& stage) {
    for (const auto& log : stage_logs_)
      for (auto& r : log->snapshot()) m_.backend_calls.push_back({stage, std::move(r)});
    stage_logs_.clear();
  }

  void adopt(const std::string& path, Bytes bytes) {
    hashes_[path] = content_hash(bytes);
    files_[path] = std::move(bytes);
  }

  const json& meta(std::string_view stage) const { return m_.stage(stage)->meta; }

  RasterImage image(const std::string& path) const { return decode_image(files_.at(path)); }

  condition::ForegroundMask mask() const { return condition::ForegroundMask::from_image(image("mask.png")); }

  json identity(BackendRole role) const {
    if (auto it = opts_.transports.find(role); it != opts_.transports.end()) {
      return {{"transport", it->second->id()}};
    }
    if (auto it = cfg_.endpoints.find(role); it != cfg_.endpoints.end()) return {{"url", it->second.base_url}};
    return {{"builtin", builtin_identity_}};
  }

  // A client with its own call log, so concurrent calls are recorded in
  // creation order rather than completion order.
  std::shared_ptr<backends::WireBackend> backend(BackendRole role) {
    auto log = std::make_shared<backends::CallLog>();
    stage_logs_.push_back(log);
    backends::RetryPolicy retry;
    retry.sleep = opts_.sleep;
    std::shared_ptr<backends::Transport> transport;
    const auto ep = cfg_.endpoints.find(role);
    if (ep != cfg_.endpoints.end()) retry.max_retries = ep->second.max_retries;
    if (auto it = opts_.transports.find(role); it != opts_.transports.end()) {
      transport = it->second;
    } else if (ep != cfg_.endpoints.end()) {
      auto& cached = remote_[role];
      if (!cached) cached = backends::make_transport(ep->second);
      transport = cached;
    } else {
      transport = builtin_;
      retry.max_retries = 0;  // in-process calls do not fail transiently
    }
    return std::make_shared<backends::WireBackend>(std::move(transport), retry, std::move(log));
  }

  StageOutput run_mask() {
    auto fg = condition::foreground_mask(work_, cfg_.mask);
    if (fg.coverage <= 0) throw Error(ErrorKind::EmptyForeground, "input has no foreground");
    StageOutput out;
    out.files["mask.png"] = encode_image(fg.mask);
    out.meta = {{"width", work_.width()}, {"height", work_.height()}, {"coverage", fg.coverage}};
    return out;
  }

  StageOutput run_flatness() {
    const auto report = condition::flatness_report(work_, mask(), cfg_.flatness);
    StageOutput out;
    out.meta = to_json(report);
    if (!report.is_flat) out.meta["warnings"] = {"input does not look flat-coloured"};
    return out;
  }

  StageOutput run_conditions() {
    StageOutput out;
    json list = json::array();
    auto add = [&](const ConditionMap& cm, int index) {
      const std::string file = condition_file(cm.kind, index);
      out.files[file] = encode_image(cm.map);
      list.push_back({{"kind", std::string(wire_name(cm.kind))}, {"index", index}, {"file", file}, {"note", cm.note}});
    };
    for (int i = 0; i < cfg_.effective_n_canny(); ++i) {
      condition::CannyParams p = cfg_.canny;
      p.gaussian_sigma *= 1.0 + 0.5 * i;
      add(condition::canny_edges(work_, p), i);
    }
    if (cfg_.effective_n_depth() > 0) {
      const auto fg = mask();
      for (int i = 0; i < cfg_.effective_n_depth(); ++i) add(condition::builtin_depth(fg, i), i);
    }
    out.meta["conditions"] = list;
    return out;
  }

  StageOutput run_caption() {
    StageOutput out;
    auto client = backend(BackendRole::Caption);
    try {
      const Caption cap = client->caption(work_);
      out.meta = {{"text", cap.text}, {"source", "backend"}};
    } catch (const Error& e) {
      out.meta = {{"text", std::string(backends::kFallbackCaption)},
                  {"source", "fallback"},
                  {"error", e.what()},
                  {"warnings", {"caption backend failed; using the fallback caption"}}};
    }
    return out;
  }

  StageOutput run_candidates(const std::string& caption_text) {
    const Caption cap{caption_text, CaptionSource::Backend};
    const json& conds = meta("conditions").at("conditions");
    const int n = static_cast<int>(conds.size());

    std::vector<ConditionMap> maps;
    std::vector<std::shared_ptr<backends::WireBackend>> clients;
    for (const auto& c : conds) {
      ConditionMap cm;
      cm.kind = condition_kind_from_wire(c.at("kind").get<std::string>()).value();
      cm.map = image(c.at("file").get<std::string>());
      cm.source_hash = m_.input_hash;
      cm.note = c.at("note").get<std::string>();
      maps.push_back(std::move(cm));
      clients.push_back(backend(BackendRole::Generate));
    }

    std::vector<std::future<CandidateImage>> pending;
    for (int k = 0; k < n; ++k) {
      const int ci = conds[k].at("index").get<int>();
      const std::uint64_t seed = cfg_.seed + static_cast<std::uint64_t>(k);
      pending.push_back(std::async(std::launch::async, [&, k, ci, seed] {
        return clients[k]->generate(work_, maps[k], cap, seed, ci);
      }));
    }
    std::vector<CandidateImage> results;
    std::exception_ptr first_error;
    for (auto& f : pending) {
      try {
        results.push_back(f.get());
      } catch (...) {
        if (!first_error) first_error = std::current_exception();
      }
    }
    if (first_error) std::rethrow_exception(first_error);

    StageOutput out;
    json list = json::array();
    for (int k = 0; k < n; ++k) {
      const auto& c = results[k];
      const std::string file = candidate_file(k + 1);
      out.files[file] = encode_image(c.image);
      list.push_back({{"index", k + 1},
                      {"file", file},
                      {"condition_kind", std::string(wire_name(c.condition_kind))},
                      {"condition_index", c.condition_index},
                      {"seed", c.seed},
                      {"backend_id", c.backend_id}});
    }
    out.meta["candidates"] = list;
    return out;
  }

  StageOutput run_select() {
    const json& cands = meta("candidates").at("candidates");
    std::vector<CandidateImage> candidates;
    for (const auto& c : cands) {
      CandidateImage ci;
      ci.image = to_rgb(image(c.at("file").get<std::string>()));
      ci.condition_kind = condition_kind_from_wire(c.at("condition_kind").get<std::string>()).value();
      ci.condition_index = c.at("condition_index").get<int>();
      ci.seed = c.at("seed").get<std::uint64_t>();
      ci.backend_id = c.at("backend_id").get<std::string>();
      candidates.push_back(std::move(ci));
    }
    const auto fg = mask();
    auto client = backend(BackendRole::Vqa);
    const ProxyImage proxy = select::select_proxy(candidates, client.get(), fg, opts_.override_index, cfg_.realism);

    const auto proxy_fg = condition::foreground_mask(proxy.image, cfg_.mask);
    const double iou = condition::mask_iou(proxy_fg, fg);

    StageOutput out;
    out.files["proxy.png"] = encode_image(proxy.image);
    out.meta = {{"chosen_index", proxy.chosen_index},
                {"method", std::string(to_string(proxy.method))},
                {"rationale", proxy.rationale},
                {"candidate_count", static_cast<int>(candidates.size())},
                {"proxy_mask_iou", iou}};
    json warnings = json::array();
    if (proxy.method == SelectionMethod::HeuristicFallback) warnings.push_back("vqa unavailable; heuristic pick");
    if (iou < cfg_.iou_warning) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "proxy silhouette IoU %.3f below %.2f", iou, cfg_.iou_warning);
      warnings.push_back(buf);
    }
    if (!warnings.empty()) out.meta["warnings"] = warnings;
    return out;
  }

  StageOutput run_shape() {
    auto client = backend(BackendRole::Shape);
    const TriMesh shape = client->shape(image("proxy.png"), cfg_.seed);
    StageOutput out;
    out.files["shape.ply"] = mesh::save_mesh(shape, mesh::MeshFormat::PlyBinary);
    out.meta = {{"vertex_count", shape.vertices.size()},
                {"triangle_count", shape.triangles.size()},
                {"shape_thinness", to_json(mesh::thinness_report(shape, cfg_.thin_threshold))}};
    // Diagnostic only: the same shape backend on the raw input.
    try {
      const TriMesh baseline = client->shape(work_, cfg_.seed);
      out.files["baseline.ply"] = mesh::save_mesh(baseline, mesh::MeshFormat::PlyBinary);
      out.meta["baseline_thinness"] = to_json(mesh::thinness_report(baseline, cfg_.thin_threshold));
    } catch (const Error& e) {
      out.meta["baseline_error"] = e.what();
      out.meta["warnings"] = {"baseline shape failed"};
    }
    return out;
  }

  StageOutput run_bake() {
    const TriMesh shape = mesh::load_mesh(files_.at("shape.ply"));
    auto client = backend(BackendRole::Texture);
    const TriMesh textured = client->texture(shape, work_);  // the original input, never the proxy
    StageOutput out;
    out.files["final.ply"] = mesh::save_mesh(textured, mesh::MeshFormat::PlyBinary);
    out.meta = {{"vertex_count", textured.vertices.size()},
                {"triangle_count", textured.triangles.size()},
                {"final_thinness", to_json(mesh::thinness_report(textured, cfg_.thin_threshold))}};
    return out;
  }

  const PipelineConfig& cfg_;
  fs::path dir_;
  const RunOptions& opts_;
  Bytes input_;
  std::optional<RunManifest> prior_;
  RasterImage work_{1, 1, Channels::Rgb8};
  std::optional<Cache> cache_;
  std::shared_ptr<backends::Transport> builtin_;
  json builtin_identity_;
  std::map<BackendRole, std::shared_ptr<backends::Transport>> remote_;
  std::vector<std::shared_ptr<backends::CallLog>> stage_logs_;
  std::map<std::string, Bytes> files_;
  std::map<std::string, ContentHash> hashes_;
  RunManifest m_;
};

void check_override(const PipelineConfig& cfg, std::optional<int> override_index) {
  if (override_index && (*override_index < 1 || *override_index > cfg.candidate_count())) {
    throw Error(ErrorKind::InvalidArgument, "override index " + std::to_string(*override_index) + " outside [1, " +
                                                std::to_string(cfg.candidate_count()) + "]");
  }
}

}  // namespace

RunManifest run_pipeline(std::span<const std::uint8_t> input_png, const PipelineConfig& cfg,
                         const fs::path& run_dir, const RunOptions& options) {
  cfg.validate();
  check_override(cfg, options.override_index);
  (void)decode_image(input_png);  // reject bad input before touching the directory

  std::error_code ec;
  for (const char* stale : {"conditions", "candidates"}) fs::remove_all(run_dir / stale, ec);
  for (const char* stale :
       {"manifest.json", "mask.png", "proxy.png", "shape.ply", "baseline.ply", "final.ply"}) {
    fs::remove(run_dir / stale, ec);
  }
  Bytes input(input_png.begin(), input_png.end());
  write_file_atomic(run_dir / kInputFile, input);
  Runner runner(cfg, run_dir, options, std::move(input), std::nullopt);
  return runner.run();
}

RunManifest resume(const fs::path& run_dir, const PipelineConfig& cfg, const RunOptions& options) {
  RunManifest prior = read_manifest(run_dir);
  Bytes input;
  try {
    input = read_file(run_dir / kInputFile);
  } catch (const Error&) {
    throw Error(ErrorKind::ManifestCorrupt, "run directory has no input.png");
  }
  if (content_hash(input) != prior.input_hash) {
    throw Error(ErrorKind::ManifestCorrupt, "input.png does not match the manifest");
  }
  cfg.validate();
  if (compute_run_id(input, cfg) != prior.run_id) {
    throw Error(ErrorKind::RunMismatch, "config or input changed since the run started; start a new run");
  }
  RunOptions opts = options;
  if (!opts.override_index) opts.override_index = prior.override_index;
  check_override(cfg, opts.override_index);
  Runner runner(cfg, run_dir, opts, std::move(input), std::move(prior));
  return runner.run();
}

bool is_run_artifact(const RunManifest& m, std::string_view name) {
  if (name == kManifestFile || name == kInputFile) return true;
  for (const auto& s : m.stages)
    for (const auto& [path, hash] : s.output_hashes)
      if (path == name) return true;
  return false;
}

PipelineConfig config_from_manifest(const RunManifest& m, const PipelineConfig& secrets_from) {
  PipelineConfig cfg;
  try {
    cfg = config_from_json(m.config);
  } catch (const Error& e) {
    throw Error(ErrorKind::ManifestCorrupt, std::string("recorded config: ") + e.what());
  }
  cfg.cache_dir = secrets_from.cache_dir;
  for (auto& [role, ep] : cfg.endpoints) {
    auto it = secrets_from.endpoints.find(role);
    if (it != secrets_from.endpoints.end()) ep.auth_token = it->second.auth_token;
  }
  return cfg;
}

}  // namespace flatlift::pipeline

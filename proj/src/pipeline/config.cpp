// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatlift/pipeline/config.hpp"

#include <cstdlib>
#include <set>
#include <sstream>
#include <toml++/toml.hpp>

#include "flatlift/core/error.hpp"
#include "flatlift/core/png.hpp"

namespace flatlift::pipeline {

using nlohmann::json;

backends::BuiltinOptions PipelineConfig::builtin_options() const {
  backends::BuiltinOptions o;
  o.mask = mask;
  o.inflate = inflate;
  o.bake = bake;
  o.realism = realism;
  o.shading_sigma = shading_sigma;
  return o;
}

void PipelineConfig::validate() const {
  auto bad = [](const std::string& msg) { throw Error(ErrorKind::InvalidConfig, msg); };
  if (n_canny < 0 || n_depth < 0) bad("n_canny and n_depth must be >= 0");
  if (candidate_count() < 1) bad("at least one condition required");
  if (candidate_count() > backends::kMaxVqaImages) {
    bad("at most " + std::to_string(backends::kMaxVqaImages) + " conditions supported");
  }
  if (max_side < 1) bad("max_side must be >= 1");
  if (!(thin_threshold > 0)) bad("thin_threshold must be > 0");
  if (!(iou_warning >= 0 && iou_warning <= 1)) bad("iou_warning must lie in [0, 1]");
  if (!(shading_sigma > 0)) bad("generator.shading_sigma must be > 0");
  if (!(mask.background_tolerance >= 0)) bad("mask.background_tolerance must be >= 0");
  if (mask.alpha_threshold < 0 || mask.alpha_threshold > 255) bad("mask.alpha_threshold must lie in [0, 255]");
  if (!(flatness.gradient_tau > 0) || flatness.max_colors < 1 ||
      !(flatness.min_flat_fraction >= 0 && flatness.min_flat_fraction <= 1)) {
    bad("flatness parameters out of range");
  }
  canny.validate();
  inflate.validate();
  bake.validate();
  for (const auto& [role, ep] : endpoints) {
    if (ep.role != role) bad("endpoint role mismatch for " + std::string(backends::to_string(role)));
    ep.validate();
  }
}

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json sections(const PipelineConfig& c) {
  json j;
  j["n_canny"] = c.n_canny;
  j["n_depth"] = c.n_depth;
  j["seed"] = c.seed;
  j["single_condition_mode"] = c.single_condition_mode;
  j["max_side"] = c.max_side;
  j["thin_threshold"] = c.thin_threshold;
  j["iou_warning"] = c.iou_warning;
  j["canny"] = {{"gaussian_sigma", c.canny.gaussian_sigma},
                {"low_threshold", optional_number(c.canny.low_threshold)},
                {"high_threshold", optional_number(c.canny.high_threshold)},
                {"auto_threshold", c.canny.auto_threshold}};
  j["mask"] = {{"background_tolerance", c.mask.background_tolerance},
               {"alpha_threshold", c.mask.alpha_threshold}};
  j["flatness"] = {{"gradient_tau", c.flatness.gradient_tau},
                   {"max_colors", c.flatness.max_colors},
                   {"min_flat_fraction", c.flatness.min_flat_fraction}};
  j["inflate"] = {{"grid_step", c.inflate.grid_step},
                  {"height_scale", c.inflate.height_scale},
                  {"mirror_back", c.inflate.mirror_back}};
  j["bake"] = {{"raster_size", c.bake.raster_size},
               {"depth_epsilon", c.bake.depth_epsilon},
               {"hidden_fill", std::string(mesh::to_string(c.bake.hidden_fill))}};
  j["realism"] = {{"shading_weight", c.realism.shading}, {"entropy_weight", c.realism.entropy}};
  j["generator"] = {{"shading_sigma", c.shading_sigma}};
  return j;
}

json endpoint_json(const backends::BackendEndpoint& ep, bool with_token) {
  json e = {{"base_url", ep.base_url}, {"timeout_s", ep.timeout_s}, {"max_retries", ep.max_retries}};
  if (with_token && ep.auth_token) e["auth_token"] = *ep.auth_token;
  return e;
}

// Reads an object while remembering which keys were consumed, so leftovers
// can be reported as unknown.
class Reader {
 public:
  Reader(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) fail(where_.empty() ? "config must be an object" : where_ + " must be a table");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!it->is_boolean()) throw std::invalid_argument("expected a boolean");
      } else if constexpr (std::is_integral_v<T>) {
        if (!it->is_number_integer()) throw std::invalid_argument("expected an integer");
        if constexpr (std::is_unsigned_v<T>) {
          if (it->is_number_unsigned() == false && it->template get<long long>() < 0) {
            throw std::invalid_argument("expected a non-negative integer");
          }
        }
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!it->is_number()) throw std::invalid_argument("expected a number");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!it->is_string()) throw std::invalid_argument("expected a string");
      }
      out = it->template get<T>();
    } catch (const std::exception& e) {
      fail(path(key) + ": " + e.what());
    }
  }

  void get_optional(const char* key, std::optional<double>& out) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end() || it->is_null()) return;
    if (!it->is_number()) fail(path(key) + ": expected a number");
    out = it->get<double>();
  }

  const json* sub(const char* key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  std::string path(const std::string& key) const { return where_.empty() ? key : where_ + "." + key; }

  void finish() const {
    for (const auto& [k, v] : obj_.items()) {
      if (!seen_.count(k)) fail("unknown config key '" + path(k) + "'");
    }
  }

  [[noreturn]] static void fail(const std::string& msg) { throw Error(ErrorKind::InvalidConfig, msg); }

 private:
  const json& obj_;
  std::string where_;
  std::set<std::string, std::less<>> seen_;
};

}  // namespace

json to_json(const PipelineConfig& cfg) {
  json j = sections(cfg);
  j["cache_dir"] = cfg.cache_dir.string();
  json eps = json::object();
  for (const auto& [role, ep] : cfg.endpoints) eps[std::string(backends::to_string(role))] = endpoint_json(ep, true);
  j["endpoints"] = eps;
  return j;
}

json identity_json(const PipelineConfig& cfg) {
  json j = sections(cfg);
  json eps = json::object();
  for (const auto& [role, ep] : cfg.endpoints) eps[std::string(backends::to_string(role))] = endpoint_json(ep, false);
  j["endpoints"] = eps;
  return j;
}

PipelineConfig config_from_json(const json& doc) {
  PipelineConfig c;
  Reader top(doc, "");
  top.get("n_canny", c.n_canny);
  top.get("n_depth", c.n_depth);
  top.get("seed", c.seed);
  top.get("single_condition_mode", c.single_condition_mode);
  top.get("max_side", c.max_side);
  top.get("thin_threshold", c.thin_threshold);
  top.get("iou_warning", c.iou_warning);
  std::string cache_dir = c.cache_dir.string();
  top.get("cache_dir", cache_dir);
  c.cache_dir = cache_dir;

  if (const json* s = top.sub("canny")) {
    Reader r(*s, "canny");
    r.get("gaussian_sigma", c.canny.gaussian_sigma);
    r.get_optional("low_threshold", c.canny.low_threshold);
    r.get_optional("high_threshold", c.canny.high_threshold);
    r.get("auto_threshold", c.canny.auto_threshold);
    r.finish();
  }
  if (const json* s = top.sub("mask")) {
    Reader r(*s, "mask");
    r.get("background_tolerance", c.mask.background_tolerance);
    r.get("alpha_threshold", c.mask.alpha_threshold);
    r.finish();
  }
  if (const json* s = top.sub("flatness")) {
    Reader r(*s, "flatness");
    r.get("gradient_tau", c.flatness.gradient_tau);
    r.get("max_colors", c.flatness.max_colors);
    r.get("min_flat_fraction", c.flatness.min_flat_fraction);
    r.finish();
  }
  if (const json* s = top.sub("inflate")) {
    Reader r(*s, "inflate");
    r.get("grid_step", c.inflate.grid_step);
    r.get("height_scale", c.inflate.height_scale);
    r.get("mirror_back", c.inflate.mirror_back);
    r.finish();
  }
  if (const json* s = top.sub("bake")) {
    Reader r(*s, "bake");
    r.get("raster_size", c.bake.raster_size);
    r.get("depth_epsilon", c.bake.depth_epsilon);
    std::string fill(mesh::to_string(c.bake.hidden_fill));
    r.get("hidden_fill", fill);
    auto parsed = mesh::hidden_fill_from_string(fill);
    if (!parsed) Reader::fail("bake.hidden_fill: unknown value '" + fill + "'");
    c.bake.hidden_fill = *parsed;
    r.finish();
  }
  if (const json* s = top.sub("realism")) {
    Reader r(*s, "realism");
    r.get("shading_weight", c.realism.shading);
    r.get("entropy_weight", c.realism.entropy);
    r.finish();
  }
  if (const json* s = top.sub("generator")) {
    Reader r(*s, "generator");
    r.get("shading_sigma", c.shading_sigma);
    r.finish();
  }
  if (const json* s = top.sub("endpoints")) {
    Reader eps(*s, "endpoints");
    for (backends::BackendRole role : backends::kAllRoles) {
      const std::string name(backends::to_string(role));
      const json* e = eps.sub(name.c_str());
      if (e == nullptr) continue;
      Reader r(*e, "endpoints." + name);
      backends::BackendEndpoint ep;
      ep.role = role;
      r.get("base_url", ep.base_url);
      std::string token;
      r.get("auth_token", token);
      if (!token.empty()) ep.auth_token = token;
      r.get("timeout_s", ep.timeout_s);
      r.get("max_retries", ep.max_retries);
      r.finish();
      c.endpoints[role] = ep;
    }
    eps.finish();
  }
  top.finish();
  return c;
}

PipelineConfig config_from_toml(std::string_view text) {
  toml::table table;
  try {
    table = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "TOML line " << e.source().begin.line << ": " << e.description();
    throw Error(ErrorKind::InvalidConfig, msg.str());
  }
  std::ostringstream out;
  out << toml::json_formatter{table};
  return config_from_json(json::parse(out.str()));
}

PipelineConfig load_config_file(const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes;
  try {
    bytes = read_file(path);
  } catch (const Error& e) {
    throw Error(ErrorKind::InvalidConfig, "cannot read config " + path.string());
  }
  const std::string text(bytes.begin(), bytes.end());
  if (path.extension() == ".json") {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::InvalidConfig, std::string("config JSON: ") + e.what());
    }
    return config_from_json(doc);
  }
  return config_from_toml(text);
}

void apply_env_overrides(PipelineConfig& cfg) {
  if (const char* dir = std::getenv(std::string(kCacheDirEnv).c_str()); dir != nullptr && *dir != '\0') {
    cfg.cache_dir = dir;
  }
}

}  // namespace flatlift::pipeline

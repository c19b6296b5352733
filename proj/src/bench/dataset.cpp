// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#include <set>

#include "flatlift/bench/bench.hpp"
#include "flatlift/core/error.hpp"
#include "flatlift/core/png.hpp"

namespace flatlift::bench {

using nlohmann::json;

namespace {

bool safe_id(const std::string& id) {
  if (id.empty() || id == "." || id == "..") return false;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' ||
                    c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

const std::set<std::string, std::less<>> kEntryKeys = {"id", "path", "style", "license"};
const std::set<std::string, std::less<>> kTopKeys = {"schema", "name", "entries"};

}  // namespace

std::vector<std::string> manifest_violations(const json& doc, const std::filesystem::path& root) {
  std::vector<std::string> v;
  if (!doc.is_object()) return {"manifest must be a JSON object"};
  for (const auto& [k, val] : doc.items())
    if (!kTopKeys.count(k)) v.push_back("unknown top-level key '" + k + "'");
  if (!doc.contains("schema") || !doc["schema"].is_number_integer() || doc["schema"].get<long long>() != kDatasetSchema) {
    v.push_back("schema must be " + std::to_string(kDatasetSchema));
  }
  if (!doc.contains("name") || !doc["name"].is_string()) v.push_back("name must be a string");
  if (!doc.contains("entries") || !doc["entries"].is_array()) {
    v.push_back("entries must be a list");
    return v;
  }
  const json& entries = doc["entries"];
  if (entries.empty()) v.push_back("entries list is empty");

  std::set<std::string> seen;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const json& e = entries[i];
    std::string label = "entry #" + std::to_string(i);
    if (!e.is_object()) {
      v.push_back(label + ": must be an object");
      continue;
    }
    if (e.contains("id") && e["id"].is_string()) {
      const std::string id = e["id"].get<std::string>();
      label = "entry '" + id + "'";
      if (!safe_id(id)) v.push_back(label + ": id must match [A-Za-z0-9._-]+");
      if (!seen.insert(id).second) v.push_back(label + ": duplicate id '" + id + "'");
    } else {
      v.push_back(label + ": id must be a string");
    }
    for (const auto& [k, val] : e.items())
      if (!kEntryKeys.count(k)) v.push_back(label + ": unknown key '" + k + "'");
    for (const char* key : {"style", "license"})
      if (!e.contains(key) || !e[key].is_string()) v.push_back(label + ": " + key + " must be a string");

    if (!e.contains("path") || !e["path"].is_string() || e["path"].get<std::string>().empty()) {
      v.push_back(label + ": path must be a non-empty string");
      continue;
    }
    const std::filesystem::path rel = e["path"].get<std::string>();
    if (rel.is_absolute()) {
      v.push_back(label + ": path must be relative");
      continue;
    }
    const auto full = root / rel;
    std::error_code ec;
    if (!std::filesystem::is_regular_file(full, ec)) {
      v.push_back(label + ": file not found: " + rel.string());
      continue;
    }
    try {
      (void)decode_image(read_file(full));
    } catch (const Error& err) {
      v.push_back(label + ": " + rel.string() + " does not decode (" + err.what() + ")");
    }
  }
  return v;
}

DatasetManifest parse_manifest(const json& doc, const std::filesystem::path& root) {
  const auto violations = manifest_violations(doc, root);
  if (!violations.empty()) {
    std::string msg = std::to_string(violations.size()) + " violation(s): ";
    for (std::size_t i = 0; i < violations.size(); ++i) msg += (i ? "; " : "") + violations[i];
    throw Error(ErrorKind::ManifestInvalid, msg);
  }
  DatasetManifest m;
  m.name = doc["name"].get<std::string>();
  m.root = root;
  for (const auto& e : doc["entries"]) {
    m.entries.push_back({e["id"].get<std::string>(), e["path"].get<std::string>(), e["style"].get<std::string>(),
                         e["license"].get<std::string>()});
  }
  return m;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes;
  try {
    bytes = read_file(path);
  } catch (const Error&) {
    throw Error(ErrorKind::ManifestInvalid, "cannot read " + path.string());
  }
  json doc = json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorKind::ManifestInvalid, path.string() + " is not valid JSON");
  return parse_manifest(doc, path.parent_path());
}

json to_json(const DatasetManifest& m) {
  json entries = json::array();
  for (const auto& e : m.entries)
    entries.push_back({{"id", e.id}, {"path", e.path}, {"style", e.style}, {"license", e.license}});
  return {{"schema", kDatasetSchema}, {"name", m.name}, {"entries", entries}};
}

}  // namespace flatlift::bench

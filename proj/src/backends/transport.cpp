// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatlift/backends/transport.hpp"

#include <httplib.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "flatlift/core/error.hpp"

namespace flatlift::backends {

namespace {

constexpr std::string_view kFixtureScheme = "fixture://";

struct ParsedUrl {
  std::string origin;
  std::string prefix;
};

ParsedUrl parse_http_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorKind::InvalidConfig, "backend url lacks a scheme: " + url);
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw Error(ErrorKind::InvalidConfig, "unsupported backend url scheme: " + scheme);
  }
  const auto host_start = scheme_end + 3;
  const auto path_start = url.find('/', host_start);
  const std::string authority = url.substr(host_start, path_start == std::string::npos ? std::string::npos
                                                                                       : path_start - host_start);
  if (authority.empty() || authority.find_first_of(" \t?#@") != std::string::npos) {
    throw Error(ErrorKind::InvalidConfig, "backend url has no valid host: " + url);
  }
  const auto colon = authority.rfind(':');
  if (colon != std::string::npos && authority.find(']') == std::string::npos) {
    const std::string port = authority.substr(colon + 1);
    if (port.empty() || port.size() > 5 || !std::all_of(port.begin(), port.end(), ::isdigit) ||
        std::stoi(port) > 65535 || colon == 0) {
      throw Error(ErrorKind::InvalidConfig, "backend url has a bad port: " + url);
    }
  }
  ParsedUrl out{scheme + "://" + authority, path_start == std::string::npos ? "" : url.substr(path_start)};
  while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
  return out;
}

}  // namespace

void BackendEndpoint::validate() const {
  if (!(timeout_s > 0) || !std::isfinite(timeout_s)) {
    throw Error(ErrorKind::InvalidConfig, "backend timeout must be > 0");
  }
  if (max_retries < 0) throw Error(ErrorKind::InvalidConfig, "backend max_retries must be >= 0");
  if (base_url.rfind(kFixtureScheme, 0) == 0) {
    if (base_url.size() == kFixtureScheme.size()) throw Error(ErrorKind::InvalidConfig, "fixture url has no directory");
    return;
  }
  parse_http_url(base_url);
}

HttpTransport::HttpTransport(const BackendEndpoint& endpoint)
    : base_url_(endpoint.base_url), token_(endpoint.auth_token), timeout_s_(endpoint.timeout_s) {
  endpoint.validate();
  const ParsedUrl url = parse_http_url(endpoint.base_url);
  origin_ = url.origin;
  prefix_ = url.prefix;
  if (const char* env = std::getenv(std::string(kTokenEnv).c_str()); env != nullptr && *env != '\0') token_ = env;
}

std::string HttpTransport::post(std::string_view path, const std::string& body) {
  httplib::Client client(origin_);
  const auto timeout = std::chrono::duration<double>(timeout_s_);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  if (token_) client.set_bearer_token_auth(*token_);
  const std::string target = prefix_ + std::string(path);
  auto res = client.Post(target, body, "application/json");
  if (!res) {
    throw Error(ErrorKind::BackendUnavailable, "POST " + base_url_ + std::string(path) + ": " +
                                                   httplib::to_string(res.error()));
  }
  if (res->status >= 500 || res->status == 429 || res->status == 408) {
    throw Error(ErrorKind::BackendUnavailable, "POST " + target + " returned HTTP " + std::to_string(res->status));
  }
  if (res->status != 200) {
    throw Error(ErrorKind::MalformedResponse, "POST " + target + " returned HTTP " + std::to_string(res->status));
  }
  return res->body;
}

FixtureStore FixtureStore::load(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error(ErrorKind::InvalidArgument, "fixture directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  FixtureStore store;
  for (const auto& file : files) {
    std::ifstream in(file, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::InvalidArgument, file.string() + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("endpoint") || !doc["endpoint"].is_string() || !doc.contains("request") ||
        !doc["request"].is_object() || !doc.contains("response") || !doc["response"].is_object()) {
      throw Error(ErrorKind::InvalidArgument, file.string() + ": expected endpoint, request and response");
    }
    store.add(doc["endpoint"].get<std::string>(), doc["request"].dump(), doc["response"].dump());
  }
  return store;
}

void FixtureStore::add(std::string endpoint, const std::string& request_body, std::string response_body) {
  auto key = std::make_pair(std::move(endpoint), content_hash(request_body));
  auto [it, inserted] = responses_.try_emplace(key, response_body);
  if (!inserted && it->second != response_body) {
    throw Error(ErrorKind::InvalidArgument, "conflicting fixtures for " + key.first + " " + key.second.hex());
  }
}

const std::string* FixtureStore::find(std::string_view endpoint, const ContentHash& request_hash) const {
  auto it = responses_.find(std::make_pair(std::string(endpoint), request_hash));
  return it == responses_.end() ? nullptr : &it->second;
}

std::string FixtureTransport::post(std::string_view path, const std::string& body) {
  const ContentHash h = content_hash(body);
  if (const std::string* hit = store_->find(path, h)) return *hit;
  throw Error(ErrorKind::BackendUnavailable, "no fixture for " + std::string(path) + " request " + h.hex());
}

std::shared_ptr<Transport> make_transport(const BackendEndpoint& endpoint) {
  endpoint.validate();
  if (endpoint.base_url.rfind(kFixtureScheme, 0) == 0) {
    const std::filesystem::path dir = endpoint.base_url.substr(kFixtureScheme.size());
    auto store = std::make_shared<const FixtureStore>(FixtureStore::load(dir));
    return std::make_shared<FixtureTransport>(std::move(store), endpoint.base_url);
  }
  return std::make_shared<HttpTransport>(endpoint);
}

}  // namespace flatlift::backends

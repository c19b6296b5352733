// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>

#include "flatlift/backends/backend.hpp"

namespace flatlift::backends {

// Moves one JSON request body to an endpoint path and returns the response
// body. Transient failures (connection errors, timeouts, 5xx) throw
// Error{BackendUnavailable} and are retried by the caller; anything else the
// server rejects throws Error{MalformedResponse}.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual std::string id() const = 0;
  virtual std::string post(std::string_view path, const std::string& body) = 0;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

struct RetryPolicy {
  int max_retries = 2;
  std::chrono::milliseconds initial_backoff{500};  // doubles per retry, no jitter
  Sleeper sleep;                                   // empty: std::this_thread::sleep_for

  /// Delay before retry number `retry` (1-based).
  std::chrono::milliseconds backoff(int retry) const { return initial_backoff * (1LL << (retry - 1)); }
};

// Plain HTTP(S) POST via cpp-httplib. The bearer token comes from
// FLATLIFT_BACKEND_TOKEN when set, else from the endpoint.
class HttpTransport final : public Transport {
 public:
  explicit HttpTransport(const BackendEndpoint& endpoint);
  std::string id() const override { return base_url_; }
  std::string post(std::string_view path, const std::string& body) override;

 private:
  std::string base_url_;
  std::string origin_;  // scheme://host:port
  std::string prefix_;  // path prefix without trailing slash
  std::optional<std::string> token_;
  double timeout_s_;
};

// Recorded request/response pairs keyed by (endpoint path, request hash).
// Each fixture file is a JSON object
//   {"endpoint": "/v1/...", "request": {...}, "response": {...}}
// and the key hashes the compact serialization of "request".
class FixtureStore {
 public:
  FixtureStore() = default;
  /// Loads every *.json file in `dir`. Throws Error{InvalidArgument} on a
  /// malformed file or a conflicting duplicate key.
  static FixtureStore load(const std::filesystem::path& dir);

  void add(std::string endpoint, const std::string& request_body, std::string response_body);
  const std::string* find(std::string_view endpoint, const ContentHash& request_hash) const;
  std::size_t size() const { return responses_.size(); }

 private:
  std::map<std::pair<std::string, ContentHash>, std::string, std::less<>> responses_;
};

// Replays a FixtureStore in-process; unknown requests are unavailable.
class FixtureTransport final : public Transport {
 public:
  FixtureTransport(std::shared_ptr<const FixtureStore> store, std::string id)
      : store_(std::move(store)), id_(std::move(id)) {}
  std::string id() const override { return id_; }
  std::string post(std::string_view path, const std::string& body) override;

 private:
  std::shared_ptr<const FixtureStore> store_;
  std::string id_;
};

/// HttpTransport, or FixtureTransport for fixture:// URLs. Validates the endpoint.
std::shared_ptr<Transport> make_transport(const BackendEndpoint& endpoint);

}  // namespace flatlift::backends

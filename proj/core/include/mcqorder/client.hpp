// Copyright 2026 The mcqorder Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "mcqorder/simulated.hpp"
#include "mcqorder/types.hpp"

namespace mcqorder {

class ProviderError : public Error {
 public:
  using Error::Error;
};

class RateLimited : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

class Timeout : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

class CacheCorrupt : public Error {
 public:
  using Error::Error;
};

struct ModelRequest {
  std::string model_id;
  std::string prompt;
  int max_tokens = 64;
  double temperature = 0.0;
};

struct ModelResponse {
  std::string text;
  bool cached = false;
  double latency_ms = 0.0;
};

struct EndpointConfig {
  std::string url;                          // e.g. http://host:port/v1/completions
  std::string api_key_env = "MCQ_API_KEY";  // empty: no auth header
  int max_retries = 3;
  int retry_base_ms = 250;
  int timeout_ms = 30000;
};

struct ClientConfig {
  std::optional<EndpointConfig> endpoint;
  std::optional<std::filesystem::path> cache_dir;
  int max_inflight = 4;
  int min_request_interval_ms = 0;
};

struct CacheStats {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t stores = 0;
};

/// On-disk completion cache. Entries are keyed by a digest of the request
/// (model id, prompt, decoding parameters), one JSON file per entry,
/// written via temp-file-plus-rename so concurrent writers never expose a
/// partial record.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  static std::string digest(const ModelRequest& request);

  std::optional<std::string> lookup(const ModelRequest& request);
  void store(const ModelRequest& request, const std::string& text);
  CacheStats stats() const;

 private:
  std::filesystem::path dir_;
  mutable std::mutex mutex_;
  CacheStats stats_;
};

/// Routes completion requests to a backend, with optional caching.
///
/// Model ids starting with "simulated:" resolve locally:
///   "simulated:demo"        a built-in procedural model;
///   "simulated:<path>.json" a utility table loaded from disk;
///   anything registered via register_simulated under any id.
/// Other model ids require a configured remote endpoint.
///
/// complete() is safe to call from multiple threads. Backend calls respect
/// max_inflight and min_request_interval_ms; retryable failures (429, 5xx,
/// timeouts) back off exponentially before surfacing as RateLimited /
/// ProviderError / Timeout.
class CompletionClient {
 public:
  explicit CompletionClient(ClientConfig config);
  ~CompletionClient();

  CompletionClient(const CompletionClient&) = delete;
  CompletionClient& operator=(const CompletionClient&) = delete;

  void register_simulated(const std::string& model_id, SimulatedModel model);
  ModelResponse complete(const ModelRequest& request);

  bool has_cache() const { return cache_ != nullptr; }
  CacheStats cache_stats() const;
  const ClientConfig& config() const { return config_; }

 private:
  std::string call_backend(const ModelRequest& request);
  std::string call_remote(const ModelRequest& request);
  const SimulatedResponder* resolve_simulated(const std::string& model_id);
  void pace();

  ClientConfig config_;
  std::unique_ptr<ResponseCache> cache_;
  std::mutex registry_mutex_;
  std::map<std::string, std::unique_ptr<SimulatedResponder>> registry_;
  std::mutex pace_mutex_;
  std::chrono::steady_clock::time_point last_call_{};
  struct Inflight;
  std::unique_ptr<Inflight> inflight_;
};

}  // namespace mcqorder

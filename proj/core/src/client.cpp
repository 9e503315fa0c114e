// Copyright 2026 The mcqorder Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcqorder/client.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <semaphore>
#include <thread>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

namespace mcqorder {

namespace {

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static const char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(static_cast<size_t>(length) * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0x0f]);
  }
  return out;
}

std::string format_temperature(double temperature) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", temperature);
  return buffer;
}

struct ParsedUrl {
  std::string base;  // scheme://host[:port]
  std::string path;  // /v1/completions
};

ParsedUrl parse_url(const std::string& url) {
  const size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("endpoint url must include a scheme: " + url);
  }
  const size_t path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

/// Pulls completion text out of the common response shapes:
/// choices[0].text, choices[0].message.content, completion, text.
std::string extract_completion_text(const nlohmann::json& j) {
  if (j.contains("choices") && j["choices"].is_array() && !j["choices"].empty()) {
    const auto& choice = j["choices"][0];
    if (choice.contains("text") && choice["text"].is_string()) {
      return choice["text"].get<std::string>();
    }
    if (choice.contains("message") && choice["message"].is_object() &&
        choice["message"].contains("content") && choice["message"]["content"].is_string()) {
      return choice["message"]["content"].get<std::string>();
    }
  }
  if (j.contains("completion") && j["completion"].is_string()) {
    return j["completion"].get<std::string>();
  }
  if (j.contains("text") && j["text"].is_string()) {
    return j["text"].get<std::string>();
  }
  throw ProviderError("endpoint response has no recognizable completion field: " + j.dump());
}

std::atomic<std::uint64_t> g_temp_counter{0};

}  // namespace

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::string ResponseCache::digest(const ModelRequest& request) {
  std::string key;
  key += request.model_id;
  key += '\x1f';
  key += request.prompt;
  key += '\x1f';
  key += std::to_string(request.max_tokens);
  key += '\x1f';
  key += format_temperature(request.temperature);
  return sha256_hex(key);
}

std::optional<std::string> ResponseCache::lookup(const ModelRequest& request) {
  const std::filesystem::path path = dir_ / (digest(request) + ".json");
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (!std::filesystem::exists(path)) {
      ++stats_.misses;
      return std::nullopt;
    }
  }
  std::ifstream in(path);
  if (!in) throw CacheCorrupt("cannot open cache entry: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw CacheCorrupt("cache entry " + path.string() + " is not valid JSON: " + e.what());
  }
  if (!j.is_object() || !j.contains("text") || !j["text"].is_string() ||
      !j.contains("prompt") || !j["prompt"].is_string()) {
    throw CacheCorrupt("cache entry " + path.string() + " is missing fields");
  }
  if (j["prompt"].get<std::string>() != request.prompt) {
    throw CacheCorrupt("cache entry " + path.string() + " does not match its request");
  }
  std::lock_guard<std::mutex> lock(mutex_);
  ++stats_.hits;
  return j["text"].get<std::string>();
}

void ResponseCache::store(const ModelRequest& request, const std::string& text) {
  const std::string name = digest(request) + ".json";
  const std::filesystem::path path = dir_ / name;
  nlohmann::ordered_json j;
  j["digest"] = digest(request);
  j["model_id"] = request.model_id;
  j["max_tokens"] = request.max_tokens;
  j["temperature"] = request.temperature;
  j["prompt"] = request.prompt;
  j["text"] = text;
  // Audit field only; lookups ignore it, so warm runs stay deterministic.
  j["created_unix_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::system_clock::now().time_since_epoch())
          .count();
  const std::filesystem::path temp =
      dir_ / (name + ".tmp." + std::to_string(g_temp_counter.fetch_add(1)));
  {
    std::ofstream out(temp);
    if (!out) throw IoError("cannot write cache entry: " + temp.string());
    out << j.dump() << '\n';
    if (!out) throw IoError("failed writing cache entry: " + temp.string());
  }
  std::filesystem::rename(temp, path);
  std::lock_guard<std::mutex> lock(mutex_);
  ++stats_.stores;
}

CacheStats ResponseCache::stats() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return stats_;
}

struct CompletionClient::Inflight {
  explicit Inflight(int slots) : semaphore(slots) {}
  std::counting_semaphore<4096> semaphore;
};

CompletionClient::CompletionClient(ClientConfig config) : config_(std::move(config)) {
  if (config_.max_inflight < 1 || config_.max_inflight > 4096) {
    throw ConfigError("max_inflight must be in [1, 4096]");
  }
  if (config_.cache_dir) cache_ = std::make_unique<ResponseCache>(*config_.cache_dir);
  inflight_ = std::make_unique<Inflight>(config_.max_inflight);
}

CompletionClient::~CompletionClient() = default;

void CompletionClient::register_simulated(const std::string& model_id, SimulatedModel model) {
  std::lock_guard<std::mutex> lock(registry_mutex_);
  registry_[model_id] = std::make_unique<SimulatedResponder>(std::move(model));
}

const SimulatedResponder* CompletionClient::resolve_simulated(const std::string& model_id) {
  std::lock_guard<std::mutex> lock(registry_mutex_);
  const auto it = registry_.find(model_id);
  if (it != registry_.end()) return it->second.get();
  if (model_id.rfind("simulated:", 0) != 0) return nullptr;
  const std::string rest = model_id.substr(10);
  if (rest == "demo") {
    auto responder = std::make_unique<SimulatedResponder>(SimulatedModel::demo());
    return (registry_[model_id] = std::move(responder)).get();
  }
  if (rest.size() > 5 && rest.compare(rest.size() - 5, 5, ".json") == 0) {
    auto responder = std::make_unique<SimulatedResponder>(load_simulated_spec(rest));
    return (registry_[model_id] = std::move(responder)).get();
  }
  throw ConfigError("unknown simulated model id: " + model_id +
                    " (use simulated:demo, simulated:<path>.json, or register one)");
}

void CompletionClient::pace() {
  if (config_.min_request_interval_ms <= 0) return;
  std::lock_guard<std::mutex> lock(pace_mutex_);
  const auto interval = std::chrono::milliseconds(config_.min_request_interval_ms);
  const auto now = std::chrono::steady_clock::now();
  if (last_call_.time_since_epoch().count() != 0 && now < last_call_ + interval) {
    std::this_thread::sleep_for(last_call_ + interval - now);
  }
  last_call_ = std::chrono::steady_clock::now();
}

std::string CompletionClient::call_remote(const ModelRequest& request) {
  const EndpointConfig& endpoint = *config_.endpoint;
  const ParsedUrl url = parse_url(endpoint.url);

  httplib::Headers headers;
  if (!endpoint.api_key_env.empty()) {
    const char* key = std::getenv(endpoint.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
      throw ConfigError("environment variable " + endpoint.api_key_env +
                        " is not set; export an API key to use a remote endpoint");
    }
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  nlohmann::json body;
  body["model"] = request.model_id;
  body["prompt"] = request.prompt;
  body["max_tokens"] = request.max_tokens;
  body["temperature"] = request.temperature;
  const std::string payload = body.dump();

  std::string last_error;
  for (int attempt = 0; attempt <= endpoint.max_retries; ++attempt) {
    if (attempt > 0) {
      const auto delay =
          std::chrono::milliseconds(endpoint.retry_base_ms) * (1LL << (attempt - 1));
      std::this_thread::sleep_for(delay);
    }
    pace();

    httplib::Client http(url.base);
    http.set_connection_timeout(std::chrono::milliseconds(endpoint.timeout_ms));
    http.set_read_timeout(std::chrono::milliseconds(endpoint.timeout_ms));
    http.set_write_timeout(std::chrono::milliseconds(endpoint.timeout_ms));

    const httplib::Result result = http.Post(url.path, headers, payload, "application/json");
    if (!result) {
      last_error = "transport error: " + httplib::to_string(result.error());
      continue;  // connection failures and timeouts are retryable
    }
    const int status = result->status;
    if (status == 429 || (status >= 500 && status < 600)) {
      last_error = "status " + std::to_string(status);
      continue;
    }
    if (status < 200 || status >= 300) {
      throw ProviderError("endpoint returned status " + std::to_string(status) + ": " +
                          result->body);
    }
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(result->body);
    } catch (const nlohmann::json::parse_error& e) {
      throw ProviderError(std::string("endpoint returned invalid JSON: ") + e.what());
    }
    return extract_completion_text(j);
  }

  if (last_error.find("429") != std::string::npos) {
    throw RateLimited("request rejected after " + std::to_string(endpoint.max_retries + 1) +
                      " attempts (" + last_error + ")");
  }
  if (last_error.rfind("transport error:", 0) == 0) {
    throw Timeout("request failed after " + std::to_string(endpoint.max_retries + 1) +
                  " attempts (" + last_error + ")");
  }
  throw ProviderError("request failed after " + std::to_string(endpoint.max_retries + 1) +
                      " attempts (" + last_error + ")");
}

std::string CompletionClient::call_backend(const ModelRequest& request) {
  if (const SimulatedResponder* responder = resolve_simulated(request.model_id)) {
    pace();
    return responder->respond(request.prompt);
  }
  if (!config_.endpoint) {
    throw ConfigError("model '" + request.model_id +
                      "' requires a remote endpoint; configure one or use a simulated model");
  }
  return call_remote(request);
}

ModelResponse CompletionClient::complete(const ModelRequest& request) {
  if (request.model_id.empty()) throw ConfigError("model id is empty");
  if (cache_ != nullptr) {
    if (auto text = cache_->lookup(request)) {
      return ModelResponse{*text, true, 0.0};
    }
  }
  inflight_->semaphore.acquire();
  std::string text;
  const auto start = std::chrono::steady_clock::now();
  try {
    text = call_backend(request);
  } catch (...) {
    inflight_->semaphore.release();
    throw;
  }
  inflight_->semaphore.release();
  const auto elapsed = std::chrono::steady_clock::now() - start;
  if (cache_ != nullptr) cache_->store(request, text);
  ModelResponse response;
  response.text = std::move(text);
  response.cached = false;
  response.latency_ms =
      std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(elapsed).count();
  return response;
}

CacheStats CompletionClient::cache_stats() const {
  if (cache_ == nullptr) return {};
  return cache_->stats();
}

}  // namespace mcqorder

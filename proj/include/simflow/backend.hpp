#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "simflow/result.hpp"
#include "simflow/types.hpp"

namespace simflow::agent {

struct BackendRequest {
  std::string system_prompt;
  std::string user_context;
  std::string role_token;  // "planner", worker tokens, or "mono"
  bool deterministic = true;
};

struct BackendResponse {
  std::string text;
  long long tokens_in = 0;
  long long tokens_out = 0;
  std::uint64_t latency_us = 0;
  bool tokens_estimated = false;
};

struct BackendError {
  std::string code;  // unknown_scenario, script_exhausted, transport, auth_failed, ...
  std::string message;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual Result<BackendResponse, BackendError> complete(const BackendRequest& request) = 0;
  virtual std::string name() const = 0;
};

// One line per completed call; lets tests align context sizes across modes.
struct CallRecord {
  std::string role;
  long long call_index = 0;
  long long context_chars = 0;  // system + user
  long long tokens_in = 0;
  long long tokens_out = 0;
};

// Deterministic test double for a chat-completion backbone. A scenario file
// holds per-role completion queues; each call pops the next entry for the
// requesting role. Token counts are either declared per entry or derived
// from character counts (ceil(chars / 4)) when the scenario says
// "token_model": "char_proportional". Running past a queue is an
// orchestration bug and reported as script_exhausted.
class ScriptedBackend : public Backend {
 public:
  static Result<std::unique_ptr<ScriptedBackend>, BackendError> load(
      const std::filesystem::path& scenario_file, Clock* clock);

  Result<BackendResponse, BackendError> complete(const BackendRequest& request) override;
  std::string name() const override { return "scripted:" + scenario_id_; }

  const std::string& scenario_id() const { return scenario_id_; }
  const std::vector<CallRecord>& call_log() const { return call_log_; }
  long long total_calls() const { return static_cast<long long>(call_log_.size()); }

 private:
  struct Entry {
    std::string text;
    long long tokens_in = -1;
    long long tokens_out = -1;
    long long latency_ms = -1;
  };

  std::string scenario_id_;
  bool char_proportional_ = false;
  long long default_latency_ms_ = 120;
  long long per_token_out_ms_ = 2;
  long long per_kchar_in_ms_ = 100;
  std::map<std::string, std::vector<Entry>> queues_;
  std::map<std::string, std::size_t> cursor_;
  std::vector<CallRecord> call_log_;
  Clock* clock_ = nullptr;
};

// Resolves a scenario id against a scenario directory ("<dir>/<id>.json").
std::filesystem::path scenario_path(const std::filesystem::path& dir, const std::string& scenario_id);

struct HttpConfig {
  std::string host;  // e.g. "127.0.0.1" or "api.example.com"
  int port = 80;
  std::string path = "/v1/chat/completions";
  std::string model;
  std::string api_key;
  int max_attempts = 3;
  int backoff_ms = 100;
  std::filesystem::path log_file;  // llm_log.jsonl when set
};

// Chat-completion JSON client. Token counts come from the provider's usage
// object; when it is absent they are estimated as ceil(chars / 4) and
// flagged estimated.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpConfig config) : config_(std::move(config)) {}
  Result<BackendResponse, BackendError> complete(const BackendRequest& request) override;
  std::string name() const override { return "http:" + config_.model; }

 private:
  HttpConfig config_;
};

}  // namespace simflow::agent

#include <cmath>
#include <fstream>

#include "simflow/backend.hpp"

namespace simflow::agent {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path scenario_path(const fs::path& dir, const std::string& scenario_id) {
  return dir / (scenario_id + ".json");
}

Result<std::unique_ptr<ScriptedBackend>, BackendError> ScriptedBackend::load(
    const fs::path& scenario_file, Clock* clock) {
  std::ifstream in(scenario_file);
  if (!in) {
    return BackendError{"unknown_scenario", "scenario file not found: " + scenario_file.string()};
  }
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    return BackendError{"unknown_scenario", "scenario file is not valid JSON: " + scenario_file.string()};
  }
  auto backend = std::unique_ptr<ScriptedBackend>(new ScriptedBackend());
  backend->clock_ = clock;
  backend->scenario_id_ = j.value("scenario_id", scenario_file.stem().string());
  backend->char_proportional_ = j.value("token_model", "declared") == "char_proportional";
  if (j.contains("latency") && j["latency"].is_object()) {
    backend->default_latency_ms_ = j["latency"].value("per_call_ms", 120LL);
    backend->per_token_out_ms_ = j["latency"].value("per_token_out_ms", 2LL);
    backend->per_kchar_in_ms_ = j["latency"].value("per_kchar_in_ms", 100LL);
  }
  if (!j.contains("roles") || !j["roles"].is_object()) {
    return BackendError{"unknown_scenario", "scenario has no 'roles' object"};
  }
  for (auto it = j["roles"].begin(); it != j["roles"].end(); ++it) {
    std::vector<Entry> queue;
    for (const json& je : it.value()) {
      Entry e;
      if (je.contains("json")) {
        e.text = je["json"].dump();
      } else {
        e.text = je.value("text", "");
      }
      e.tokens_in = je.value("tokens_in", -1LL);
      e.tokens_out = je.value("tokens_out", -1LL);
      e.latency_ms = je.value("latency_ms", -1LL);
      queue.push_back(std::move(e));
    }
    backend->queues_[it.key()] = std::move(queue);
  }
  return backend;
}

Result<BackendResponse, BackendError> ScriptedBackend::complete(const BackendRequest& request) {
  auto qit = queues_.find(request.role_token);
  std::size_t& cursor = cursor_[request.role_token];
  if (qit == queues_.end() || cursor >= qit->second.size()) {
    return BackendError{"script_exhausted",
                        "no scripted completion left for role '" + request.role_token + "' (call " +
                            std::to_string(cursor + 1) + ")"};
  }
  const Entry& entry = qit->second[cursor++];

  BackendResponse resp;
  resp.text = entry.text;
  const long long context_chars =
      static_cast<long long>(request.system_prompt.size() + request.user_context.size());
  if (char_proportional_) {
    resp.tokens_in = (context_chars + 3) / 4;
    resp.tokens_out = (static_cast<long long>(entry.text.size()) + 3) / 4;
  } else {
    resp.tokens_in = entry.tokens_in >= 0 ? entry.tokens_in : (context_chars + 3) / 4;
    resp.tokens_out =
        entry.tokens_out >= 0 ? entry.tokens_out : (static_cast<long long>(entry.text.size()) + 3) / 4;
  }
  // Prefill scales with input length, decode with output tokens.
  long long latency_ms = entry.latency_ms >= 0
                             ? entry.latency_ms
                             : default_latency_ms_ + per_token_out_ms_ * resp.tokens_out +
                                   per_kchar_in_ms_ * context_chars / 1000;
  resp.latency_us = static_cast<std::uint64_t>(latency_ms) * 1000;
  if (clock_) clock_->advance_us(resp.latency_us);

  CallRecord record;
  record.role = request.role_token;
  record.call_index = static_cast<long long>(call_log_.size());
  record.context_chars = context_chars;
  record.tokens_in = resp.tokens_in;
  record.tokens_out = resp.tokens_out;
  call_log_.push_back(record);
  return resp;
}

}  // namespace simflow::agent

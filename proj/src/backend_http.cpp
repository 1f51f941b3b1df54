#include <fstream>
#include <thread>

#include "httplib.h"
#include "simflow/backend.hpp"

namespace simflow::agent {

using nlohmann::json;

Result<BackendResponse, BackendError> HttpBackend::complete(const BackendRequest& request) {
  json body;
  body["model"] = config_.model;
  body["messages"] = json::array({json{{"role", "system"}, {"content", request.system_prompt}},
                                  json{{"role", "user"}, {"content", request.user_context}}});
  if (request.deterministic) {
    body["temperature"] = 0.0;
    body["seed"] = 42;
  }
  const std::string payload = body.dump();

  httplib::Client client(config_.host, config_.port);
  client.set_read_timeout(120, 0);
  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  std::string last_error;
  for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(std::chrono::milliseconds(config_.backoff_ms * (attempt - 1)));
    }
    auto res = client.Post(config_.path, headers, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 401 || res->status == 403) {
      return BackendError{"auth_failed", "HTTP " + std::to_string(res->status)};
    }
    if (res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      return BackendError{"transport", "HTTP " + std::to_string(res->status) + ": " + res->body};
    }
    json j = json::parse(res->body, nullptr, false);
    if (j.is_discarded()) return BackendError{"transport", "response is not JSON"};
    BackendResponse out;
    try {
      out.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
      return BackendError{"transport", "response missing choices[0].message.content"};
    }
    if (j.contains("usage") && j["usage"].is_object() && j["usage"].contains("prompt_tokens") &&
        j["usage"].contains("completion_tokens")) {
      out.tokens_in = j["usage"]["prompt_tokens"].get<long long>();
      out.tokens_out = j["usage"]["completion_tokens"].get<long long>();
    } else {
      // No usage block: estimate at four characters per token and flag it so
      // estimated counts never mix into exact-token assertions.
      out.tokens_in = (static_cast<long long>(request.system_prompt.size() +
                                              request.user_context.size()) + 3) / 4;
      out.tokens_out = (static_cast<long long>(out.text.size()) + 3) / 4;
      out.tokens_estimated = true;
    }
    if (!config_.log_file.empty()) {
      std::ofstream log(config_.log_file, std::ios::app);
      if (log) {
        log << json{{"role", request.role_token},
                    {"attempt", attempt},
                    {"request", body},
                    {"response", j},
                    {"tokens_estimated", out.tokens_estimated}}
                   .dump()
            << "\n";
      }
    }
    return out;
  }
  return BackendError{"transport", "backend unreachable after " + std::to_string(config_.max_attempts) +
                                       " attempts: " + last_error};
}

}  // namespace simflow::agent

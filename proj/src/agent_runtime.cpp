#include "simflow/agent_runtime.hpp"

#include "simflow/prompts.hpp"

namespace simflow::agent {

using nlohmann::json;

std::string build_observation(const ErrorPayload& error) {
  json j;
  j["status"] = "error";
  j["code"] = error.code;
  j["message"] = error.message;
  j["candidates"] = error.candidates;
  return j.dump();
}

std::string AgentRuntime::build_user_context(const std::string& goal,
                                             const store::ArtifactStore& store) {
  std::string out = "GOAL: " + goal + "\nARTIFACTS:";
  bool any = false;
  for (int i = 0; i < store::kKindCount; ++i) {
    auto kind = static_cast<store::Kind>(i);
    if (auto artifact = store.latest(kind)) {
      out += "\n- " + std::string(store::to_token(kind)) + ": " + artifact->path + " (" +
             artifact->artifact_id + ")";
      any = true;
    }
  }
  if (!any) out += " none";
  return out;
}

ExecutionResult AgentRuntime::execute_role(Role role, const std::string& goal,
                                           store::ArtifactStore& store, orch::RunContext& ctx,
                                           int step_id) {
  ExecutionResult result;

  // Gate before spending tokens: the role's tool action must have its
  // prerequisite artifacts in place.
  auto deps = store.check_dependencies(primary_action(role));
  if (!deps.satisfied) {
    ErrorPayload payload;
    payload.code = "dependency_missing";
    payload.message = "prerequisite artifacts missing for " +
                      std::string(to_token(primary_action(role))) + ":";
    for (store::Kind k : deps.missing) {
      payload.message += " " + std::string(store::to_token(k));
      payload.candidates.push_back(std::string(store::to_token(k)));
    }
    result.error = std::move(payload);
    return result;
  }

  BackendRequest request;
  request.system_prompt = prompts::role_system(role);
  request.user_context = build_user_context(goal, store);
  request.role_token = std::string(to_token(role));

  std::optional<contract::ValidatedAction> action;
  for (int attempt = 0; attempt < 2; ++attempt) {
    auto response = backend_->complete(request);
    if (!response) {
      result.error = ErrorPayload{response.error().code, response.error().message, {}};
      return result;
    }
    result.tokens_in += response->tokens_in;
    result.tokens_out += response->tokens_out;
    ctx.add_tokens(response->tokens_in, response->tokens_out);
    if (events_) {
      events_->emit("backend_call",
                    json{{"iter", ctx.iter},
                         {"role", request.role_token},
                         {"context_chars", request.system_prompt.size() + request.user_context.size()},
                         {"tokens_in", response->tokens_in},
                         {"tokens_out", response->tokens_out}});
    }

    std::string rejection;
    auto envelope = contract::parse_envelope(response->text);
    if (envelope) {
      auto validated = contract::validate_action(*envelope, role);
      if (validated) {
        action = *validated;
        result.warnings = validated->warnings;
        break;
      }
      rejection = std::string(contract::to_string(validated.error().code)) + ": " +
                  validated.error().detail;
    } else {
      rejection = std::string(contract::to_string(envelope.error().code)) + ": " +
                  envelope.error().detail;
    }
    if (attempt == 0) {
      // One bounded in-role retry: the agent sees its own rejection.
      request.user_context += "\nOBSERVATION: " +
                              build_observation(ErrorPayload{"envelope_rejected", rejection, {}});
      continue;
    }
    result.error = ErrorPayload{"envelope_rejected", rejection, {}};
    return result;
  }

  if (action->action == Action::Stop) {
    result.status = ExecutionResult::Status::Success;
    return result;
  }

  // Deterministic seed unless the agent asked for one.
  if (!action->params.contains("seed")) action->params["seed"] = default_seed_;

  auto outcome = toolbox_->dispatch(*action, step_id);
  for (const auto& w : outcome.warnings) result.warnings.push_back(w);
  if (!outcome.ok) {
    result.error = outcome.error;
    return result;
  }
  result.status = ExecutionResult::Status::Success;
  result.artifacts = outcome.artifacts;
  result.kpi = outcome.kpi;
  return result;
}

}  // namespace simflow::agent

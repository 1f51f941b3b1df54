#include "simflow/orchestrator.hpp"
#include "simflow/prompts.hpp"

namespace simflow::orch {

using nlohmann::json;

namespace {

std::string render_constraints(const std::vector<kpi::KpiConstraint>& constraints) {
  if (constraints.empty()) return "none";
  std::string out;
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    if (i) out += ", ";
    out += constraints[i].to_text();
  }
  return out;
}

}  // namespace

RunOutcome run_monolithic(const Objective& objective, const EngineConfig& cfg) {
  auto instruments = make_instruments(cfg);
  RunContext ctx(objective);
  if (!instruments) {
    RunOutcome out;
    out.status = RunStatus::FailureFatal;
    out.last_error = instruments.error();
    return out;
  }
  Clock& clock = *instruments->clock;

  auto store = store::ArtifactStore::open(cfg.run_dir, &clock);
  if (!store) {
    RunOutcome out;
    out.status = RunStatus::FailureFatal;
    out.last_error = ErrorPayload{"run_dir", store.error().detail, {}};
    return out;
  }

  EventLog events(cfg.run_dir / "events.jsonl", &clock);
  simbridge::Toolbox toolbox(&*store, cfg.engine_mode == "external" ? simbridge::EngineMode::External
                                                                    : simbridge::EngineMode::Mock,
                             &clock, cfg.external);

  ctx.mark_start(clock.now_us());
  events.emit("run_started", json{{"objective", objective.text},
                                  {"mode", "monolithic"},
                                  {"max_react_steps", cfg.max_react_steps}});

  // One growing transcript: the whole history rides along on every call.
  std::string transcript = "OBJECTIVE: " + objective.text +
                           "\nCONSTRAINTS: " + render_constraints(objective.constraints);
  std::optional<kpi::KpiReport> report;
  std::optional<ErrorPayload> last_error;
  int steps_used = 0;
  bool stopped = false;

  for (int step = 1; step <= cfg.max_react_steps && !stopped; ++step) {
    steps_used = step;
    agent::BackendRequest request;
    request.system_prompt = agent::prompts::monolithic_system();
    request.user_context = transcript;
    request.role_token = "mono";

    auto response = instruments->backend->complete(request);
    if (!response) {
      ErrorPayload error{response.error().code, response.error().message, {}};
      return finish_run(ctx, RunStatus::FailureFatal, report, store->artifacts_of_iteration(1), step,
                        clock, events, error);
    }
    ctx.add_tokens(response->tokens_in, response->tokens_out);
    events.emit("backend_call",
                json{{"iter", 1},
                     {"role", "mono"},
                     {"context_chars", request.system_prompt.size() + request.user_context.size()},
                     {"tokens_in", response->tokens_in},
                     {"tokens_out", response->tokens_out}});

    std::string observation;
    auto envelope = contract::parse_envelope(response->text);
    if (!envelope) {
      ErrorPayload error{"envelope_rejected",
                         std::string(contract::to_string(envelope.error().code)) + ": " +
                             envelope.error().detail,
                         {}};
      last_error = error;
      observation = agent::build_observation(error);
      events.emit("step_failed",
                  json{{"iter", 1}, {"step_id", step}, {"role", "mono"}, {"error", error.to_json()}});
      transcript += "\nACTION " + std::to_string(step) + ": <rejected>\nOBSERVATION " +
                    std::to_string(step) + ": " + observation;
      continue;
    }

    transcript += "\nACTION " + std::to_string(step) + ": " + contract::serialize(*envelope);

    if (envelope->action == Action::Stop) {
      events.emit("step_succeeded", json{{"iter", 1}, {"step_id", step}, {"role", "mono"},
                                         {"action", "STOP"}, {"artifacts", json::array()}});
      stopped = true;
      break;
    }

    auto role = role_for_action(envelope->action);
    auto validated = role ? contract::validate_action(*envelope, *role)
                          : Result<contract::ValidatedAction, contract::Error>(
                                contract::Error{contract::ErrorCode::UnknownAction, "no role owns action"});
    if (!validated) {
      ErrorPayload error{"envelope_rejected",
                         std::string(contract::to_string(validated.error().code)) + ": " +
                             validated.error().detail,
                         {}};
      last_error = error;
      observation = agent::build_observation(error);
      events.emit("step_failed",
                  json{{"iter", 1}, {"step_id", step}, {"role", "mono"}, {"error", error.to_json()}});
      transcript += "\nOBSERVATION " + std::to_string(step) + ": " + observation;
      continue;
    }

    auto deps = store->check_dependencies(validated->action);
    if (!deps.satisfied) {
      ErrorPayload error{"dependency_missing", "prerequisite artifacts missing", {}};
      for (store::Kind k : deps.missing) error.candidates.push_back(std::string(store::to_token(k)));
      last_error = error;
      observation = agent::build_observation(error);
      events.emit("step_failed",
                  json{{"iter", 1}, {"step_id", step}, {"role", "mono"}, {"error", error.to_json()}});
      transcript += "\nOBSERVATION " + std::to_string(step) + ": " + observation;
      continue;
    }

    if (!validated->params.contains("seed")) validated->params["seed"] = cfg.seed;
    auto outcome = toolbox.dispatch(*validated, step);
    if (!outcome.ok) {
      last_error = outcome.error;
      observation = agent::build_observation(*outcome.error);
      events.emit("step_failed", json{{"iter", 1},
                                      {"step_id", step},
                                      {"role", "mono"},
                                      {"error", outcome.error->to_json()}});
      transcript += "\nOBSERVATION " + std::to_string(step) + ": " + observation;
      continue;
    }

    json ids = json::array();
    for (const auto& a : outcome.artifacts) ids.push_back(a.artifact_id);
    json ok_obs{{"status", "success"}, {"artifacts", ids}};
    if (outcome.kpi) ok_obs["kpis"] = outcome.kpi->to_json();
    events.emit("step_succeeded", json{{"iter", 1},
                                       {"step_id", step},
                                       {"role", "mono"},
                                       {"action", std::string(to_token(validated->action))},
                                       {"artifacts", ids}});
    transcript += "\nOBSERVATION " + std::to_string(step) + ": " + ok_obs.dump();

    if (outcome.kpi) {
      report = outcome.kpi;
      if (!ctx.first_kpi_recorded()) {
        ctx.mark_first_kpi(clock.now_us());
        events.emit("analysis",
                    json{{"iter", 1}, {"report", report->to_json()}, {"tti_s", *ctx.tti_seconds()}});
      }
      auto evaluation = kpi::evaluate(*report, objective.constraints);
      if (evaluation.satisfied) {
        return finish_run(ctx, RunStatus::Success, report, store->artifacts_of_iteration(1), step,
                          clock, events, std::nullopt);
      }
      std::string feedback = kpi::verbalize(*report, evaluation.violations);
      transcript += "\nFEEDBACK: " + feedback;
    }
  }

  // Budget exhausted, or the agent stopped without meeting the objective.
  if (report) {
    auto evaluation = kpi::evaluate(*report, objective.constraints);
    if (evaluation.satisfied) {
      return finish_run(ctx, RunStatus::Success, report, store->artifacts_of_iteration(1), steps_used,
                        clock, events, std::nullopt);
    }
  }
  return finish_run(ctx, RunStatus::FailureMaxIter, report, store->artifacts_of_iteration(1),
                    steps_used, clock, events, last_error);
}

}  // namespace simflow::orch

#include "simflow/orchestrator.hpp"

#include <fstream>

#include "simflow/planner.hpp"

namespace simflow::orch {

using nlohmann::json;

Result<EngineConfig, ErrorPayload> load_engine_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return ErrorPayload{"config", "cannot open engine config: " + path.string(), {}};
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    return ErrorPayload{"config", "engine config is not a JSON object: " + path.string(), {}};
  }
  EngineConfig cfg;
  cfg.backend_kind = j.value("backend", cfg.backend_kind);
  cfg.scenario_id = j.value("scenario", cfg.scenario_id);
  if (j.contains("scenario_dir")) cfg.scenario_dir = j["scenario_dir"].get<std::string>();
  cfg.engine_mode = j.value("engine", cfg.engine_mode);
  if (j.contains("run_dir")) cfg.run_dir = j["run_dir"].get<std::string>();
  cfg.max_react_steps = j.value("max_react_steps", cfg.max_react_steps);
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("external") && j["external"].is_object()) {
    cfg.external.build_command = j["external"].value("build_command", "");
    cfg.external.run_command = j["external"].value("run_command", "");
  }
  if (j.contains("http") && j["http"].is_object()) {
    const json& h = j["http"];
    cfg.http.host = h.value("host", cfg.http.host);
    cfg.http.port = h.value("port", cfg.http.port);
    cfg.http.path = h.value("path", cfg.http.path);
    cfg.http.model = h.value("model", cfg.http.model);
  }
  return cfg;
}

std::string_view to_token(RunStatus status) {
  switch (status) {
    case RunStatus::Success: return "SUCCESS";
    case RunStatus::FailureMaxIter: return "FAILURE_MAX_ITER";
    case RunStatus::FailureFatal: return "FAILURE_FATAL";
  }
  return "?";
}

Result<RunInstruments, ErrorPayload> make_instruments(const EngineConfig& cfg) {
  RunInstruments inst;
  if (cfg.backend_kind == "scripted") {
    inst.clock = std::make_unique<VirtualClock>();
    auto backend =
        agent::ScriptedBackend::load(agent::scenario_path(cfg.scenario_dir, cfg.scenario_id),
                                     inst.clock.get());
    if (!backend) return ErrorPayload{backend.error().code, backend.error().message, {}};
    inst.scripted = backend->get();
    inst.backend = std::move(*backend);
  } else if (cfg.backend_kind == "http") {
    inst.clock = std::make_unique<SteadyClock>();
    agent::HttpConfig http = cfg.http;
    if (http.log_file.empty()) http.log_file = cfg.run_dir / "llm_log.jsonl";
    inst.backend = std::make_unique<agent::HttpBackend>(http);
  } else {
    return ErrorPayload{"config", "unknown backend kind '" + cfg.backend_kind + "'", {}};
  }
  return inst;
}

namespace {

bool is_fatal(const ErrorPayload& error) {
  return error.code == "script_exhausted" || error.code == "unknown_scenario" ||
         error.code == "transport" || error.code == "auth_failed" || error.code == "config";
}

simbridge::EngineMode engine_mode(const EngineConfig& cfg) {
  return cfg.engine_mode == "external" ? simbridge::EngineMode::External
                                       : simbridge::EngineMode::Mock;
}

}  // namespace

RunOutcome finish_run(RunContext& ctx, RunStatus status, std::optional<kpi::KpiReport> kpis,
                      std::vector<store::Artifact> artifacts, int iterations_used, Clock& clock,
                      EventLog& events, std::optional<ErrorPayload> last_error) {
  clock.advance_us(1000);  // outcome bookkeeping always lands after the last KPI
  RunOutcome out;
  out.status = status;
  out.kpis = std::move(kpis);
  out.artifacts = std::move(artifacts);
  out.iterations_used = iterations_used;
  out.tokens_in = ctx.tokens_in();
  out.tokens_out = ctx.tokens_out();
  out.tti_seconds = ctx.tti_seconds();
  out.total_wall_seconds = static_cast<double>(clock.now_us() - ctx.start_us()) / 1e6;
  out.last_error = std::move(last_error);
  json fields{{"status", std::string(to_token(status))},
              {"iterations_used", iterations_used},
              {"tokens_in", out.tokens_in},
              {"tokens_out", out.tokens_out},
              {"total_wall_s", out.total_wall_seconds}};
  if (out.tti_seconds) fields["tti_s"] = *out.tti_seconds;
  if (out.kpis) fields["kpis"] = out.kpis->to_json();
  if (out.last_error) fields["last_error"] = out.last_error->to_json();
  events.emit("outcome", fields);
  return out;
}

RunOutcome run_pipeline(const Objective& objective, const EngineConfig& cfg) {
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
  simbridge::Toolbox toolbox(&*store, engine_mode(cfg), &clock, cfg.external);
  agent::AgentRuntime runtime(instruments->backend.get(), &toolbox, &events, &clock, cfg.seed);

  ctx.mark_start(clock.now_us());
  events.emit("run_started", json{{"objective", objective.text},
                                  {"mode", "multiagent"},
                                  {"max_iterations", objective.max_iterations},
                                  {"modification_requested", objective.modification_requested}});

  std::optional<ErrorPayload> last_error;
  std::optional<kpi::KpiReport> last_report;
  const int M = std::max(objective.max_iterations, 1);
  for (int iter = 1; iter <= M; ++iter) {
    ctx.iter = iter;
    store->begin_iteration(iter);

    auto plan = planner::make_plan(objective, ctx, *instruments->backend, &events);
    if (!plan) {
      ErrorPayload error{plan.error().code, plan.error().detail, {}};
      if (is_fatal(error)) {
        return finish_run(ctx, RunStatus::FailureFatal, std::nullopt, {}, iter, clock, events, error);
      }
      // A rejected plan consumes the iteration like any level-1 error.
      json violations = json::array();
      for (const auto& v : plan.error().violations) violations.push_back(v.to_json());
      json payload = error.to_json();
      payload["violations"] = violations;
      ctx.append_entry(iter, "last_error", payload);
      events.emit("feedback_injected", json{{"iter", iter}, {"kind", "last_error"}, {"payload", payload}});
      last_error = error;
      continue;
    }

    std::optional<ErrorPayload> iteration_error;
    std::optional<kpi::KpiReport> report;
    for (const auto& step : plan->steps) {
      auto role = step.active_role();
      if (!role) continue;  // validated plans always have exactly one
      const std::string& goal = step.agent_prompts[static_cast<std::size_t>(*role)];
      events.emit("step_started", json{{"iter", iter},
                                       {"step_id", step.step_id},
                                       {"role", std::string(to_token(*role))},
                                       {"goal", goal}});
      auto result = runtime.execute_role(*role, goal, *store, ctx, step.step_id);
      if (!result.success()) {
        if (result.error && is_fatal(*result.error)) {
          return finish_run(ctx, RunStatus::FailureFatal, std::nullopt, {}, iter, clock, events,
                            result.error);
        }
        events.emit("step_failed", json{{"iter", iter},
                                        {"step_id", step.step_id},
                                        {"role", std::string(to_token(*role))},
                                        {"error", result.error->to_json()}});
        iteration_error = result.error;
        break;  // abort the pipeline; nothing after the failed step runs
      }
      json ids = json::array();
      for (const auto& a : result.artifacts) ids.push_back(a.artifact_id);
      json step_fields{{"iter", iter},
                       {"step_id", step.step_id},
                       {"role", std::string(to_token(*role))},
                       {"artifacts", ids}};
      if (!result.warnings.empty()) step_fields["warnings"] = result.warnings;
      events.emit("step_succeeded", step_fields);
      if (result.kpi) {
        report = result.kpi;
        if (!ctx.first_kpi_recorded()) {
          ctx.mark_first_kpi(clock.now_us());
          events.emit("analysis", json{{"iter", iter},
                                       {"report", result.kpi->to_json()},
                                       {"tti_s", *ctx.tti_seconds()}});
        }
      }
    }

    if (iteration_error) {
      // Level 1: hand the execution error to the next planning round.
      ctx.append_entry(iter, "last_error", iteration_error->to_json());
      events.emit("feedback_injected",
                  json{{"iter", iter}, {"kind", "last_error"}, {"payload", iteration_error->to_json()}});
      last_error = iteration_error;
      continue;
    }

    if (!report) {
      // No analyst step ran; evaluate directly from the latest tripinfo.
      if (auto tripinfo = store->latest(store::Kind::Tripinfo)) {
        auto records = kpi::parse_tripinfo(cfg.run_dir / tripinfo->path);
        if (records) {
          report = kpi::aggregate(*records, kpi::Metric::All);
          if (!ctx.first_kpi_recorded()) {
            ctx.mark_first_kpi(clock.now_us());
            events.emit("analysis", json{{"iter", iter},
                                         {"report", report->to_json()},
                                         {"tti_s", *ctx.tti_seconds()}});
          }
        }
      }
    }
    if (!report) {
      std::string feedback =
          "No KPI was produced; the plan must include runner and analyst steps.";
      ctx.append_entry(iter, "kpi_feedback", feedback);
      events.emit("feedback_injected",
                  json{{"iter", iter}, {"kind", "kpi_feedback"}, {"payload", feedback}});
      continue;
    }
    last_report = report;

    auto evaluation = kpi::evaluate(*report, objective.constraints);
    if (evaluation.satisfied) {
      return finish_run(ctx, RunStatus::Success, report, store->artifacts_of_iteration(iter), iter,
                        clock, events, std::nullopt);
    }
    // Level 2: verbalized KPI feedback for the next round.
    std::string feedback = kpi::verbalize(*report, evaluation.violations);
    ctx.append_entry(iter, "kpi_feedback", feedback);
    events.emit("feedback_injected",
                json{{"iter", iter}, {"kind", "kpi_feedback"}, {"payload", feedback}});
  }

  return finish_run(ctx, RunStatus::FailureMaxIter, last_report,
                    store->artifacts_of_iteration(M), M, clock, events, last_error);
}

}  // namespace simflow::orch

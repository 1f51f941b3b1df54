#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "simflow/agent_runtime.hpp"
#include "simflow/backend.hpp"
#include "simflow/run_context.hpp"
#include "simflow/toolbox.hpp"

namespace simflow::orch {

enum class RunStatus { Success, FailureMaxIter, FailureFatal };

std::string_view to_token(RunStatus status);

struct RunOutcome {
  RunStatus status = RunStatus::FailureFatal;
  std::optional<kpi::KpiReport> kpis;
  std::vector<store::Artifact> artifacts;  // artifacts of the final iteration
  int iterations_used = 0;
  long long tokens_in = 0;
  long long tokens_out = 0;
  std::optional<double> tti_seconds;
  double total_wall_seconds = 0;
  std::optional<ErrorPayload> last_error;
};

struct EngineConfig {
  std::string backend_kind = "scripted";  // scripted | http
  std::string scenario_id;
  std::filesystem::path scenario_dir = "scenarios";
  agent::HttpConfig http;
  std::string engine_mode = "mock";  // mock | external
  simbridge::ExternalHooks external;
  std::filesystem::path run_dir = "runs/run";
  int max_react_steps = 12;  // monolithic step budget
  long long seed = 42;
};

// Loads an engine config from a JSON file; unknown keys are ignored so the
// file can carry operator notes.
Result<EngineConfig, ErrorPayload> load_engine_config(const std::filesystem::path& path);

// Instruments shared by both execution modes; exposed so the benchmark can
// reuse one scripted backend's call log per task run.
struct RunInstruments {
  std::unique_ptr<Clock> clock;
  std::unique_ptr<agent::Backend> backend;
  agent::ScriptedBackend* scripted = nullptr;  // non-null when backend_kind == scripted
};

Result<RunInstruments, ErrorPayload> make_instruments(const EngineConfig& cfg);

// The iterate-execute-evaluate engine. Per iteration: plan, run the steps in
// order gating each on artifact dependencies, break on the first error and
// inject it as last_error (level 1); on full success evaluate KPIs against
// the objective constraints and either finish or inject verbalized feedback
// (level 2). Artifacts reset per iteration; files stay on disk.
RunOutcome run_pipeline(const Objective& objective, const EngineConfig& cfg);

// Single-agent baseline: one context window holding every role contract and
// the whole observation history, acting one tool call per turn.
RunOutcome run_monolithic(const Objective& objective, const EngineConfig& cfg);

// Shared by both modes: evaluate a report against constraints and produce
// the outcome bookkeeping.
RunOutcome finish_run(RunContext& ctx, RunStatus status, std::optional<kpi::KpiReport> kpis,
                      std::vector<store::Artifact> artifacts, int iterations_used, Clock& clock,
                      EventLog& events, std::optional<ErrorPayload> last_error);

}  // namespace simflow::orch

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "simflow/artifact_store.hpp"
#include "simflow/backend.hpp"
#include "simflow/contract.hpp"
#include "simflow/event_log.hpp"
#include "simflow/kpi_analyst.hpp"
#include "simflow/run_context.hpp"
#include "simflow/toolbox.hpp"
#include "simflow/types.hpp"

namespace simflow::agent {

struct ExecutionResult {
  enum class Status { Success, Error } status = Status::Error;
  std::vector<store::Artifact> artifacts;
  std::optional<ErrorPayload> error;
  std::optional<kpi::KpiReport> kpi;
  long long tokens_in = 0;
  long long tokens_out = 0;
  std::vector<std::string> warnings;

  bool success() const { return status == Status::Success; }
};

// JSON observation handed back to an agent on its repair turn:
//   {"status":"error","code":...,"message":...,"candidates":[...]}
std::string build_observation(const ErrorPayload& error);

// Runs one worker turn: dependency gate, prompt assembly, backend call,
// envelope parsing/validation (with one retry carrying the parse error as an
// observation), seed injection and tool dispatch.
class AgentRuntime {
 public:
  AgentRuntime(Backend* backend, simbridge::Toolbox* toolbox, orch::EventLog* events, Clock* clock,
               long long default_seed = 42)
      : backend_(backend), toolbox_(toolbox), events_(events), clock_(clock),
        default_seed_(default_seed) {}

  ExecutionResult execute_role(Role role, const std::string& goal, store::ArtifactStore& store,
                               orch::RunContext& ctx, int step_id);

  // Goal + latest artifact references (+ observations on retries).
  static std::string build_user_context(const std::string& goal, const store::ArtifactStore& store);

 private:
  Backend* backend_;
  simbridge::Toolbox* toolbox_;
  orch::EventLog* events_;
  Clock* clock_;
  long long default_seed_ = 42;
};

}  // namespace simflow::agent

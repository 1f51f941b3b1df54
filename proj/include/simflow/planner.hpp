#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "simflow/backend.hpp"
#include "simflow/contract.hpp"
#include "simflow/event_log.hpp"
#include "simflow/result.hpp"
#include "simflow/run_context.hpp"

namespace simflow::planner {

// Deterministic lexicon matcher deciding whether the objective explicitly
// asks for a network/TLS modification. Gates only the plan's shape; it never
// authors instructions.
bool classify_modification(std::string_view objective_text);

struct PlanError {
  std::string code;  // plan_rejected | backend
  std::string detail;
  std::vector<contract::PlanViolation> violations;
};

// Calls the planner backend with the objective, constraints and the full
// feedback context; validates the returned plan, retrying once with the
// violation list as an observation.
Result<contract::PlanDoc, PlanError> make_plan(const orch::Objective& objective,
                                               orch::RunContext& ctx, agent::Backend& backend,
                                               orch::EventLog* events);

}  // namespace simflow::planner

#include "simflow/planner.hpp"

#include <algorithm>
#include <cctype>

#include "simflow/prompts.hpp"

namespace simflow::planner {

using nlohmann::json;

bool classify_modification(std::string_view objective_text) {
  std::string text(objective_text);
  std::transform(text.begin(), text.end(), text.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  static const std::vector<std::string> kVerbs = {"remove", "close", "delete", "modify", "optimize"};
  static const std::vector<std::string> kTargets = {"network", "edge",   "lane",
                                                    "street",  "road",   "tls",
                                                    "signal",  "traffic light", "junction"};
  bool verb = std::any_of(kVerbs.begin(), kVerbs.end(),
                          [&](const std::string& v) { return text.find(v) != std::string::npos; });
  bool target = std::any_of(kTargets.begin(), kTargets.end(),
                            [&](const std::string& t) { return text.find(t) != std::string::npos; });
  return verb && target;
}

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

std::vector<contract::PlanViolation> validate(const contract::PlanDoc& doc,
                                              const orch::Objective& objective) {
  auto validation = contract::validate_plan(doc, objective.modification_requested);
  auto violations = validation.violations;
  if (!objective.constraints.empty()) {
    bool has_analyst = false;
    for (const auto& step : doc.steps) {
      if (step.active_role() == Role::Analyst) has_analyst = true;
    }
    if (!has_analyst) {
      violations.push_back(contract::PlanViolation{
          contract::PlanViolationCode::AnalystRequired, 0,
          "objective carries KPI constraints; the plan needs an analyst step"});
    }
  }
  return violations;
}

}  // namespace

Result<contract::PlanDoc, PlanError> make_plan(const orch::Objective& objective,
                                               orch::RunContext& ctx, agent::Backend& backend,
                                               orch::EventLog* events) {
  agent::BackendRequest request;
  request.system_prompt = agent::prompts::planner_system();
  request.user_context = "USER_INPUT: " + objective.text +
                         "\nCONSTRAINTS: " + render_constraints(objective.constraints)         +
                         "\nCONTEXT: " + ctx.serialize_entries();
  request.role_token = "planner";

  if (events) {
    events->emit("plan_requested", json{{"iter", ctx.iter}, {"context", request.user_context}});
  }

  std::vector<contract::PlanViolation> last_violations;
  std::string last_detail;
  for (int attempt = 0; attempt < 2; ++attempt) {
    auto response = backend.complete(request);
    if (!response) {
      return PlanError{response.error().code, response.error().message, {}};
    }
    ctx.add_tokens(response->tokens_in, response->tokens_out);
    if (events) {
      events->emit("backend_call",
                   json{{"iter", ctx.iter},
                        {"role", "planner"},
                        {"context_chars", request.system_prompt.size() + request.user_context.size()},
                        {"tokens_in", response->tokens_in},
                        {"tokens_out", response->tokens_out}});
    }

    auto doc = contract::parse_plan(response->text);
    if (doc) {
      last_violations = validate(*doc, objective);
      if (last_violations.empty()) {
        if (events) {
          json roles = json::array();
          for (const auto& step : doc->steps) {
            if (auto role = step.active_role()) roles.push_back(std::string(to_token(*role)));
          }
          events->emit("plan_accepted",
                       json{{"iter", ctx.iter}, {"steps", doc->steps.size()}, {"roles", roles}});
        }
        return *doc;
      }
      last_detail = "plan violates the pipeline contract";
    } else {
      last_violations.clear();
      last_detail = std::string(contract::to_string(doc.error().code)) + ": " + doc.error().detail;
    }

    json violations = json::array();
    for (const auto& v : last_violations) violations.push_back(v.to_json());
    if (events) {
      events->emit("plan_rejected",
                   json{{"iter", ctx.iter}, {"detail", last_detail}, {"violations", violations}});
    }
    if (attempt == 0) {
      request.user_context +=
          "\nOBSERVATION: {\"status\":\"error\",\"code\":\"plan_rejected\",\"violations\":" +
          violations.dump() + "}";
    }
  }

  return PlanError{"plan_rejected", last_detail, last_violations};
}

}  // namespace simflow::planner

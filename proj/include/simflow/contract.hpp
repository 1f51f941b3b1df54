#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "simflow/result.hpp"
#include "simflow/types.hpp"

namespace simflow::contract {

// ---------------------------------------------------------------------------
// Action envelopes
// ---------------------------------------------------------------------------

// The one-JSON-object document every agent turn must produce:
//   {"action": "...", "params": {...}, "reason": "...", "decision": {"summary": "..."}}
struct ActionEnvelope {
  Action action = Action::Stop;
  nlohmann::json params = nlohmann::json::object();
  std::string reason;
  std::string decision_summary;

  bool operator==(const ActionEnvelope&) const = default;
};

enum class ErrorCode {
  NotSingleObject,
  SchemaMismatch,
  UnknownAction,
  RoleActionMismatch,
  MissingParam,
  ForbiddenParam,
  WrappedParams,
  BadEnumValue,
  BadParamType,
};

struct Error {
  ErrorCode code;
  std::string detail;
};

std::string_view to_string(ErrorCode code);

// Accepts exactly one top-level JSON object; surrounding whitespace is
// tolerated, anything else (prose, code fences, a second object) is not.
Result<ActionEnvelope, Error> parse_envelope(std::string_view raw);

std::string serialize(const ActionEnvelope& env);

// Replaces every underscore with a single space. Total and idempotent.
std::string normalize_road_name(std::string_view name);

// A role-checked, type-coerced action ready for tool dispatch. Road-name
// valued params stay verbatim here; resolution against the live edge table
// (id first, then normalized street name) happens in the tool layer.
struct ValidatedAction {
  Action action = Action::Stop;
  Role role = Role::Builder;
  nlohmann::json params = nlohmann::json::object();
  std::vector<std::string> warnings;
};

Result<ValidatedAction, Error> validate_action(const ActionEnvelope& env, Role role);

// Actions a role may emit: its own tool action plus STOP.
bool role_allows(Role role, Action action);

// ---------------------------------------------------------------------------
// Plans
// ---------------------------------------------------------------------------

struct PlanStep {
  int step_id = 0;
  std::string goal;
  // Indexed by Role; exactly one entry is expected to be non-empty.
  std::array<std::string, kRoleCount> agent_prompts{};

  std::optional<Role> active_role() const;
  int active_count() const;

  bool operator==(const PlanStep&) const = default;
};

struct PlanDoc {
  std::string status;
  std::string version;
  std::vector<PlanStep> steps;
  std::string reason;
  std::string decision_summary;

  bool operator==(const PlanDoc&) const = default;
};

Result<PlanDoc, Error> parse_plan(std::string_view raw);
std::string serialize(const PlanDoc& doc);

enum class PlanViolationCode {
  EmptyPlan,
  TooManySteps,
  NoActivePrompt,
  MultipleActivePrompts,
  OrderViolation,
  ModifierPolicyViolation,
  AnalystRequired,
};

std::string_view to_string(PlanViolationCode code);

struct PlanViolation {
  PlanViolationCode code;
  int step_id = 0;  // 0 when not tied to a step
  std::string detail;

  nlohmann::json to_json() const;
};

struct PlanValidation {
  bool accepted = false;
  std::vector<Role> role_sequence;
  std::vector<PlanViolation> violations;
};

// Checks step-count bounds, step_id ordering, the one-active-prompt rule,
// the pipeline role ordering and the modifier policy (modifier step present
// iff a modification was requested).
PlanValidation validate_plan(const PlanDoc& doc, bool modification_requested);

}  // namespace simflow::contract

#include "simflow/contract.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace simflow::contract {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

Result<json, Error> parse_single_object(std::string_view raw) {
  std::string_view body = trim(raw);
  if (body.empty()) return Error{ErrorCode::NotSingleObject, "empty input"};
  if (body.front() != '{') {
    return Error{ErrorCode::NotSingleObject, "output must start with a JSON object, got extra text"};
  }
  json j = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    return Error{ErrorCode::NotSingleObject,
                 "not exactly one JSON object (malformed JSON or trailing content)"};
  }
  if (!j.is_object()) return Error{ErrorCode::NotSingleObject, "top-level value is not an object"};
  return j;
}

// --- typed param extraction -------------------------------------------------

Result<double, Error> want_number(const json& params, const std::string& key) {
  if (!params.contains(key)) return Error{ErrorCode::MissingParam, key};
  const json& v = params[key];
  if (!v.is_number()) return Error{ErrorCode::BadParamType, key + " must be a number"};
  return v.get<double>();
}

// JSON has a single number type; a value counts as an integer only when its
// fractional part is zero.
Result<long long, Error> want_integer(const json& params, const std::string& key) {
  if (!params.contains(key)) return Error{ErrorCode::MissingParam, key};
  const json& v = params[key];
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    double d = v.get<double>();
    if (std::trunc(d) == d) return static_cast<long long>(d);
    return Error{ErrorCode::BadParamType, key + " must be an integer"};
  }
  return Error{ErrorCode::BadParamType, key + " must be an integer"};
}

Result<std::string, Error> want_string(const json& params, const std::string& key) {
  if (!params.contains(key)) return Error{ErrorCode::MissingParam, key};
  const json& v = params[key];
  if (!v.is_string()) return Error{ErrorCode::BadParamType, key + " must be a string"};
  std::string s = v.get<std::string>();
  if (s.empty()) return Error{ErrorCode::BadParamType, key + " must be non-empty"};
  return s;
}

std::optional<Error> check_positive(double v, const std::string& key) {
  if (v <= 0) return Error{ErrorCode::BadParamType, key + " must be > 0"};
  return std::nullopt;
}

// Appends a warning for every param key outside `known`.
void warn_unknown(const json& params, const std::vector<std::string>& known,
                  std::vector<std::string>& warnings) {
  for (auto it = params.begin(); it != params.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      warnings.push_back("unknown param ignored: " + it.key());
    }
  }
}

std::optional<Error> reject_unknown(const json& params, const std::vector<std::string>& known) {
  for (auto it = params.begin(); it != params.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      return Error{ErrorCode::ForbiddenParam, it.key()};
    }
  }
  return std::nullopt;
}

std::optional<Error> copy_optional_integer(const json& in, json& out, const std::string& key,
                                           bool positive = true) {
  if (!in.contains(key)) return std::nullopt;
  auto v = want_integer(in, key);
  if (!v) return v.error();
  if (positive && *v <= 0) return Error{ErrorCode::BadParamType, key + " must be > 0"};
  out[key] = *v;
  return std::nullopt;
}

Result<ValidatedAction, Error> validate_build_net(const ActionEnvelope& env, ValidatedAction va) {
  const json& p = env.params;
  // The builder params object must be flat: no nested wrapper keys.
  for (auto it = p.begin(); it != p.end(); ++it) {
    if (it.value().is_object() || it.value().is_array()) {
      return Error{ErrorCode::WrappedParams, "params must be flat, found nested value under '" + it.key() + "'"};
    }
  }
  auto type = want_string(p, "type");
  if (!type) return type.error();
  json out = json::object();
  out["type"] = *type;
  if (*type == "build_from_realworld") {
    auto city = want_string(p, "city_name");
    if (!city) return city.error();
    auto dist = want_number(p, "distance_miles");
    if (!dist) return dist.error();
    if (auto e = check_positive(*dist, "distance_miles")) return *e;
    auto volume = want_integer(p, "volume");
    if (!volume) return volume.error();
    if (*volume <= 0) return Error{ErrorCode::BadParamType, "volume must be > 0"};
    if (p.contains("radius")) return Error{ErrorCode::ForbiddenParam, "radius"};
    if (p.contains("lanes")) return Error{ErrorCode::ForbiddenParam, "lanes"};
    if (auto e = reject_unknown(p, {"type", "city_name", "distance_miles", "volume", "seed"})) return *e;
    out["city_name"] = normalize_road_name(*city);
    out["distance_miles"] = *dist;
    out["volume"] = *volume;
  } else if (*type == "roundabout") {
    auto radius = want_number(p, "radius");
    if (!radius) return radius.error();
    if (auto e = check_positive(*radius, "radius")) return *e;
    auto lanes = want_integer(p, "lanes");
    if (!lanes) return lanes.error();
    if (*lanes <= 0) return Error{ErrorCode::BadParamType, "lanes must be > 0"};
    auto volume = want_integer(p, "volume");
    if (!volume) return volume.error();
    if (*volume <= 0) return Error{ErrorCode::BadParamType, "volume must be > 0"};
    if (auto e = reject_unknown(p, {"type", "radius", "lanes", "volume", "seed"})) return *e;
    out["radius"] = *radius;
    out["lanes"] = *lanes;
    out["volume"] = *volume;
  } else {
    return Error{ErrorCode::BadEnumValue, "type must be build_from_realworld or roundabout"};
  }
  if (auto e = copy_optional_integer(p, out, "seed", /*positive=*/false)) return *e;
  va.params = std::move(out);
  return va;
}

Result<ValidatedAction, Error> validate_gen_demand(const ActionEnvelope& env, ValidatedAction va) {
  const json& p = env.params;
  auto type = want_string(p, "type");
  if (!type) return type.error();
  json out = json::object();
  out["type"] = *type;
  if (*type == "generate_flow_route") {
    auto from = want_string(p, "from_edge");
    if (!from) return from.error();
    auto to = want_string(p, "to_edge");
    if (!to) return to.error();
    auto vph = want_integer(p, "vph");
    if (!vph) return vph.error();
    if (*vph <= 0) return Error{ErrorCode::BadParamType, "vph must be > 0"};
    out["from_edge"] = *from;
    out["to_edge"] = *to;
    out["vph"] = *vph;
    warn_unknown(p, {"type", "from_edge", "to_edge", "vph", "seed", "begin", "end"}, va.warnings);
  } else if (*type == "build_routes_random") {
    // `flows` may be omitted: the tool layer falls back to the network's
    // stored volume (and to 1000 when no volume was recorded).
    if (p.contains("flows")) {
      auto flows = want_integer(p, "flows");
      if (!flows) return flows.error();
      if (*flows <= 0) return Error{ErrorCode::BadParamType, "flows must be > 0"};
      out["flows"] = *flows;
    }
    warn_unknown(p, {"type", "flows", "seed", "begin", "end"}, va.warnings);
  } else {
    return Error{ErrorCode::BadEnumValue, "type must be generate_flow_route or build_routes_random"};
  }
  if (auto e = copy_optional_integer(p, out, "seed", /*positive=*/false)) return *e;
  if (auto e = copy_optional_integer(p, out, "begin", /*positive=*/false)) return *e;
  if (auto e = copy_optional_integer(p, out, "end")) return *e;
  va.params = std::move(out);
  return va;
}

Result<ValidatedAction, Error> validate_modify(const ActionEnvelope& env, ValidatedAction va) {
  const json& p = env.params;
  auto op = want_string(p, "op");
  if (!op) return op.error();
  json out = json::object();
  out["op"] = *op;
  if (*op == "remove_edge") {
    auto edge = want_string(p, "edge_id");
    if (!edge) return edge.error();
    out["edge_id"] = *edge;
    if (p.contains("volume")) {
      auto vol = want_number(p, "volume");
      if (!vol) return vol.error();
      out["volume"] = *vol;
    }
    warn_unknown(p, {"op", "edge_id", "volume"}, va.warnings);
  } else if (*op == "edge_set_speed") {
    auto edge = want_string(p, "edge_id");
    if (!edge) return edge.error();
    auto vmax = want_number(p, "vmax");
    if (!vmax) return vmax.error();
    if (auto e = check_positive(*vmax, "vmax")) return *e;
    out["edge_id"] = *edge;
    out["vmax"] = *vmax;
    warn_unknown(p, {"op", "edge_id", "vmax"}, va.warnings);
  } else if (*op == "tls_optimize_and_apply") {
    auto tls = want_string(p, "tls_id");
    if (!tls) return tls.error();
    auto cycle = want_number(p, "cycle");
    if (!cycle) return cycle.error();
    if (auto e = check_positive(*cycle, "cycle")) return *e;
    out["tls_id"] = *tls;
    out["cycle"] = *cycle;
    warn_unknown(p, {"op", "tls_id", "cycle"}, va.warnings);
  } else if (*op == "tls_set_program") {
    auto tls = want_string(p, "tls_id");
    if (!tls) return tls.error();
    auto prog = want_string(p, "program_xml");
    if (!prog) return prog.error();
    out["tls_id"] = *tls;
    out["program_xml"] = *prog;
    warn_unknown(p, {"op", "tls_id", "program_xml"}, va.warnings);
  } else {
    return Error{ErrorCode::BadEnumValue,
                 "op must be one of remove_edge, edge_set_speed, tls_optimize_and_apply, tls_set_program"};
  }
  va.params = std::move(out);
  return va;
}

Result<ValidatedAction, Error> validate_run(const ActionEnvelope& env, ValidatedAction va) {
  const json& p = env.params;
  json out = json::object();
  if (p.contains("steps")) {
    auto steps = want_integer(p, "steps");
    if (!steps) return steps.error();
    if (*steps <= 0) return Error{ErrorCode::BadParamType, "steps must be > 0"};
    out["steps"] = *steps;
  }
  if (p.contains("gui")) {
    if (!p["gui"].is_boolean()) return Error{ErrorCode::BadParamType, "gui must be a boolean"};
    out["gui"] = p["gui"].get<bool>();
  }
  if (auto e = copy_optional_integer(p, out, "seed", /*positive=*/false)) return *e;
  warn_unknown(p, {"steps", "gui", "seed"}, va.warnings);
  va.params = std::move(out);
  return va;
}

Result<ValidatedAction, Error> validate_analyze(const ActionEnvelope& env, ValidatedAction va) {
  const json& p = env.params;
  auto metric = want_string(p, "metric");
  if (!metric) return metric.error();
  static const std::vector<std::string> kMetrics = {"mean_speed", "co2", "travel_time",
                                                    "waiting_time", "all"};
  if (std::find(kMetrics.begin(), kMetrics.end(), *metric) == kMetrics.end()) {
    return Error{ErrorCode::BadEnumValue, "metric '" + *metric + "' is not a known metric"};
  }
  json out = json::object();
  out["metric"] = *metric;
  warn_unknown(p, {"metric"}, va.warnings);
  va.params = std::move(out);
  return va;
}

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotSingleObject: return "NotSingleObject";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::UnknownAction: return "UnknownAction";
    case ErrorCode::RoleActionMismatch: return "RoleActionMismatch";
    case ErrorCode::MissingParam: return "MissingParam";
    case ErrorCode::ForbiddenParam: return "ForbiddenParam";
    case ErrorCode::WrappedParams: return "WrappedParams";
    case ErrorCode::BadEnumValue: return "BadEnumValue";
    case ErrorCode::BadParamType: return "BadParamType";
  }
  return "?";
}

Result<ActionEnvelope, Error> parse_envelope(std::string_view raw) {
  auto parsed = parse_single_object(raw);
  if (!parsed) return parsed.error();
  const json& j = *parsed;
  if (!j.contains("action")) return Error{ErrorCode::SchemaMismatch, "missing 'action'"};
  if (!j["action"].is_string()) return Error{ErrorCode::SchemaMismatch, "'action' must be a string"};
  if (!j.contains("params")) return Error{ErrorCode::SchemaMismatch, "missing 'params'"};
  if (!j["params"].is_object()) return Error{ErrorCode::SchemaMismatch, "'params' must be an object"};
  auto action = action_from_token(j["action"].get<std::string>());
  if (!action) {
    return Error{ErrorCode::UnknownAction, "unknown action '" + j["action"].get<std::string>() + "'"};
  }
  ActionEnvelope env;
  env.action = *action;
  env.params = j["params"];
  if (j.contains("reason")) {
    if (!j["reason"].is_string()) return Error{ErrorCode::SchemaMismatch, "'reason' must be a string"};
    env.reason = j["reason"].get<std::string>();
  }
  if (j.contains("decision")) {
    const json& d = j["decision"];
    if (!d.is_object()) return Error{ErrorCode::SchemaMismatch, "'decision' must be an object"};
    if (d.contains("summary")) {
      if (!d["summary"].is_string()) {
        return Error{ErrorCode::SchemaMismatch, "'decision.summary' must be a string"};
      }
      env.decision_summary = d["summary"].get<std::string>();
    }
  }
  return env;
}

std::string serialize(const ActionEnvelope& env) {
  ordered_json j;
  j["action"] = std::string(to_token(env.action));
  j["params"] = env.params;
  j["reason"] = env.reason;
  j["decision"] = ordered_json{{"summary", env.decision_summary}};
  return j.dump();
}

std::string normalize_road_name(std::string_view name) {
  std::string out(name);
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

bool role_allows(Role role, Action action) {
  return action == Action::Stop || action == primary_action(role);
}

Result<ValidatedAction, Error> validate_action(const ActionEnvelope& env, Role role) {
  if (!role_allows(role, env.action)) {
    return Error{ErrorCode::RoleActionMismatch,
                 std::string(to_token(role)) + " may not emit " + std::string(to_token(env.action))};
  }
  ValidatedAction va;
  va.action = env.action;
  va.role = role;
  switch (env.action) {
    case Action::Stop: {
      va.params = nlohmann::json::object();
      for (auto it = env.params.begin(); it != env.params.end(); ++it) {
        va.warnings.push_back("unknown param ignored: " + it.key());
      }
      return va;
    }
    case Action::BuildNet: return validate_build_net(env, std::move(va));
    case Action::GenDemand: return validate_gen_demand(env, std::move(va));
    case Action::Modify: return validate_modify(env, std::move(va));
    case Action::Run: return validate_run(env, std::move(va));
    case Action::Analyze: return validate_analyze(env, std::move(va));
  }
  return Error{ErrorCode::RoleActionMismatch, "unreachable"};
}

// ---------------------------------------------------------------------------
// Plans
// ---------------------------------------------------------------------------

std::optional<Role> PlanStep::active_role() const {
  std::optional<Role> found;
  for (int i = 0; i < kRoleCount; ++i) {
    if (!agent_prompts[static_cast<std::size_t>(i)].empty()) {
      if (found) return std::nullopt;  // more than one
      found = static_cast<Role>(i);
    }
  }
  return found;
}

int PlanStep::active_count() const {
  int n = 0;
  for (const auto& p : agent_prompts) {
    if (!p.empty()) ++n;
  }
  return n;
}

Result<PlanDoc, Error> parse_plan(std::string_view raw) {
  auto parsed = parse_single_object(raw);
  if (!parsed) return parsed.error();
  const json& j = *parsed;
  if (!j.contains("plan")) return Error{ErrorCode::SchemaMismatch, "missing 'plan'"};
  if (!j["plan"].is_array()) return Error{ErrorCode::SchemaMismatch, "'plan' must be an array"};
  PlanDoc doc;
  doc.status = j.value("status", "");
  doc.version = j.value("version", "");
  doc.reason = j.value("reason", "");
  if (j.contains("decision") && j["decision"].is_object()) {
    doc.decision_summary = j["decision"].value("summary", "");
  }
  for (const json& js : j["plan"]) {
    if (!js.is_object()) return Error{ErrorCode::SchemaMismatch, "plan step must be an object"};
    PlanStep step;
    if (!js.contains("step_id") || !js["step_id"].is_number_integer()) {
      return Error{ErrorCode::SchemaMismatch, "step missing integer 'step_id'"};
    }
    step.step_id = js["step_id"].get<int>();
    step.goal = js.value("goal", "");
    if (!js.contains("agent_prompts") || !js["agent_prompts"].is_object()) {
      return Error{ErrorCode::SchemaMismatch, "step missing 'agent_prompts' object"};
    }
    bool runner_seen = false;
    for (auto it = js["agent_prompts"].begin(); it != js["agent_prompts"].end(); ++it) {
      auto role = role_from_token(it.key());
      if (!role) {
        return Error{ErrorCode::SchemaMismatch, "unknown agent_prompts key '" + it.key() + "'"};
      }
      if (!it.value().is_string()) {
        return Error{ErrorCode::SchemaMismatch, "agent_prompts values must be strings"};
      }
      if (*role == Role::Runner) {
        // Both "runner" and the legacy "runner_planner" spelling are accepted,
        // but not together.
        if (runner_seen) return Error{ErrorCode::SchemaMismatch, "duplicate runner prompt key"};
        runner_seen = true;
      }
      step.agent_prompts[static_cast<std::size_t>(*role)] = it.value().get<std::string>();
    }
    doc.steps.push_back(std::move(step));
  }
  return doc;
}

std::string serialize(const PlanDoc& doc) {
  ordered_json j;
  j["status"] = doc.status;
  j["version"] = doc.version;
  ordered_json steps = ordered_json::array();
  for (const auto& s : doc.steps) {
    ordered_json js;
    js["step_id"] = s.step_id;
    js["goal"] = s.goal;
    ordered_json prompts;
    for (int i = 0; i < kRoleCount; ++i) {
      prompts[std::string(to_token(static_cast<Role>(i)))] = s.agent_prompts[static_cast<std::size_t>(i)];
    }
    js["agent_prompts"] = prompts;
    steps.push_back(js);
  }
  j["plan"] = steps;
  j["reason"] = doc.reason;
  j["decision"] = ordered_json{{"summary", doc.decision_summary}};
  return j.dump();
}

std::string_view to_string(PlanViolationCode code) {
  switch (code) {
    case PlanViolationCode::EmptyPlan: return "EmptyPlan";
    case PlanViolationCode::TooManySteps: return "TooManySteps";
    case PlanViolationCode::NoActivePrompt: return "NoActivePrompt";
    case PlanViolationCode::MultipleActivePrompts: return "MultipleActivePrompts";
    case PlanViolationCode::OrderViolation: return "OrderViolation";
    case PlanViolationCode::ModifierPolicyViolation: return "ModifierPolicyViolation";
    case PlanViolationCode::AnalystRequired: return "AnalystRequired";
  }
  return "?";
}

nlohmann::json PlanViolation::to_json() const {
  return nlohmann::json{{"code", std::string(to_string(code))}, {"step_id", step_id}, {"detail", detail}};
}

PlanValidation validate_plan(const PlanDoc& doc, bool modification_requested) {
  PlanValidation out;
  auto violate = [&](PlanViolationCode code, int step_id, std::string detail) {
    out.violations.push_back(PlanViolation{code, step_id, std::move(detail)});
  };

  if (doc.steps.empty()) {
    violate(PlanViolationCode::EmptyPlan, 0, "plan has no steps");
    return out;
  }
  if (doc.steps.size() > 5) {
    violate(PlanViolationCode::TooManySteps, 0,
            "plan has " + std::to_string(doc.steps.size()) + " steps, maximum is 5");
  }

  int prev_id = 0;
  for (std::size_t i = 0; i < doc.steps.size(); ++i) {
    const PlanStep& s = doc.steps[i];
    if (i == 0 && s.step_id != 1) {
      violate(PlanViolationCode::OrderViolation, s.step_id, "step_ids must start at 1");
    } else if (s.step_id <= prev_id) {
      violate(PlanViolationCode::OrderViolation, s.step_id, "step_ids must be strictly increasing");
    }
    prev_id = s.step_id;
    int active = s.active_count();
    if (active == 0) {
      violate(PlanViolationCode::NoActivePrompt, s.step_id, "step has no active agent_prompt");
    } else if (active > 1) {
      violate(PlanViolationCode::MultipleActivePrompts, s.step_id,
              "step has " + std::to_string(active) + " active agent_prompts");
    }
  }

  // Role ordering over steps with exactly one active prompt.
  std::array<int, kRoleCount> first_index;
  first_index.fill(-1);
  std::vector<Role> sequence;
  for (std::size_t i = 0; i < doc.steps.size(); ++i) {
    auto role = doc.steps[i].active_role();
    if (!role) continue;
    auto idx = static_cast<std::size_t>(*role);
    if (first_index[idx] >= 0) {
      violate(PlanViolationCode::OrderViolation, doc.steps[i].step_id,
              std::string(to_token(*role)) + " appears in more than one step");
      continue;
    }
    first_index[idx] = static_cast<int>(i);
    sequence.push_back(*role);
  }

  auto pos = [&](Role r) { return first_index[static_cast<std::size_t>(r)]; };
  const int builder = pos(Role::Builder), demand = pos(Role::Demand), modifier = pos(Role::Modifier),
            runner = pos(Role::Runner), analyst = pos(Role::Analyst);

  if (demand >= 0 && (builder < 0 || builder > demand)) {
    violate(PlanViolationCode::OrderViolation, 0, "demand requires a preceding builder step");
  }
  if (modifier >= 0) {
    if (builder < 0 || builder > modifier) {
      violate(PlanViolationCode::OrderViolation, 0, "modifier requires a preceding builder step");
    }
    if (demand < 0 || demand < modifier) {
      violate(PlanViolationCode::OrderViolation, 0, "modifier must come strictly before demand");
    }
  }
  if (runner >= 0 && (demand < 0 || demand > runner)) {
    violate(PlanViolationCode::OrderViolation, 0, "runner requires a preceding demand step");
  }
  if (analyst >= 0 && (runner < 0 || runner > analyst)) {
    violate(PlanViolationCode::OrderViolation, 0, "analyst requires a preceding runner step");
  }

  if (modifier >= 0 && !modification_requested) {
    violate(PlanViolationCode::ModifierPolicyViolation, 0,
            "plan contains a modifier step but no modification was requested");
  }
  if (modifier < 0 && modification_requested) {
    violate(PlanViolationCode::ModifierPolicyViolation, 0,
            "modification was requested but the plan has no modifier step");
  }

  out.accepted = out.violations.empty();
  if (out.accepted) out.role_sequence = std::move(sequence);
  return out;
}

}  // namespace simflow::contract

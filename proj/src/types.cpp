#include "simflow/types.hpp"

#include <chrono>

namespace simflow {

std::string_view to_token(Action a) {
  switch (a) {
    case Action::BuildNet: return "BUILD_NET";
    case Action::Modify: return "MODIFY";
    case Action::GenDemand: return "GEN_DEMAND";
    case Action::Run: return "RUN";
    case Action::Analyze: return "ANALYZE";
    case Action::Stop: return "STOP";
  }
  return "?";
}

std::string_view to_token(Role r) {
  switch (r) {
    case Role::Builder: return "builder";
    case Role::Demand: return "demand";
    case Role::Modifier: return "modifier";
    case Role::Runner: return "runner";
    case Role::Analyst: return "analyst";
  }
  return "?";
}

std::optional<Action> action_from_token(std::string_view token) {
  if (token == "BUILD_NET") return Action::BuildNet;
  if (token == "MODIFY") return Action::Modify;
  if (token == "GEN_DEMAND") return Action::GenDemand;
  if (token == "RUN") return Action::Run;
  if (token == "ANALYZE") return Action::Analyze;
  if (token == "STOP") return Action::Stop;
  return std::nullopt;
}

std::optional<Role> role_from_token(std::string_view token) {
  if (token == "builder") return Role::Builder;
  if (token == "demand") return Role::Demand;
  if (token == "modifier") return Role::Modifier;
  if (token == "runner" || token == "runner_planner") return Role::Runner;
  if (token == "analyst") return Role::Analyst;
  return std::nullopt;
}

Action primary_action(Role r) {
  switch (r) {
    case Role::Builder: return Action::BuildNet;
    case Role::Demand: return Action::GenDemand;
    case Role::Modifier: return Action::Modify;
    case Role::Runner: return Action::Run;
    case Role::Analyst: return Action::Analyze;
  }
  return Action::Stop;
}

std::optional<Role> role_for_action(Action a) {
  switch (a) {
    case Action::BuildNet: return Role::Builder;
    case Action::GenDemand: return Role::Demand;
    case Action::Modify: return Role::Modifier;
    case Action::Run: return Role::Runner;
    case Action::Analyze: return Role::Analyst;
    case Action::Stop: return std::nullopt;
  }
  return std::nullopt;
}

nlohmann::json ErrorPayload::to_json() const {
  return nlohmann::json{{"code", code}, {"message", message}, {"candidates", candidates}};
}

ErrorPayload ErrorPayload::from_json(const nlohmann::json& j) {
  ErrorPayload p;
  p.code = j.value("code", "");
  p.message = j.value("message", "");
  if (j.contains("candidates") && j["candidates"].is_array()) {
    for (const auto& c : j["candidates"]) {
      if (c.is_string()) p.candidates.push_back(c.get<std::string>());
    }
  }
  return p;
}

std::uint64_t SteadyClock::now_us() {
  auto d = std::chrono::steady_clock::now().time_since_epoch();
  return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::microseconds>(d).count());
}

std::uint64_t SplitMix64::next() {
  s_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = s_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::below(std::uint64_t n) {
  // Rejection sampling keeps the draw unbiased.
  const std::uint64_t limit = n * ((~0ULL) / n);
  std::uint64_t x = next();
  while (x >= limit) x = next();
  return x % n;
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace simflow

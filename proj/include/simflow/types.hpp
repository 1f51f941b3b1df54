#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace simflow {

// The six action tokens an agent may emit.
enum class Action { BuildNet, Modify, GenDemand, Run, Analyze, Stop };

// The five worker roles. The planner is not a worker and has no contract row.
enum class Role { Builder, Demand, Modifier, Runner, Analyst };

inline constexpr int kRoleCount = 5;

std::string_view to_token(Action a);
std::string_view to_token(Role r);
std::optional<Action> action_from_token(std::string_view token);
std::optional<Role> role_from_token(std::string_view token);

// Each worker role owns exactly one tool action besides STOP.
Action primary_action(Role r);
std::optional<Role> role_for_action(Action a);

// Structured tool/agent failure surfaced to the repair loops.
struct ErrorPayload {
  std::string code;
  std::string message;
  std::vector<std::string> candidates;

  nlohmann::json to_json() const;
  static ErrorPayload from_json(const nlohmann::json& j);
};

// Monotonic time source. Scripted/mock runs use a virtual clock so that
// latency-derived metrics are reproducible byte for byte; live runs use
// the steady clock.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::uint64_t now_us() = 0;
  virtual void advance_us(std::uint64_t) {}
  virtual bool is_virtual() const = 0;
};

class SteadyClock : public Clock {
 public:
  std::uint64_t now_us() override;
  bool is_virtual() const override { return false; }
};

class VirtualClock : public Clock {
 public:
  std::uint64_t now_us() override { return t_us_; }
  void advance_us(std::uint64_t d) override { t_us_ += d; }
  bool is_virtual() const override { return true; }

 private:
  std::uint64_t t_us_ = 0;
};

// Deterministic PRNG (splitmix64). Used instead of <random> distributions
// so generated files are identical across standard library implementations.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : s_(seed) {}
  std::uint64_t next();
  // Uniform in [0, n), n > 0.
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t s_;
};

std::uint64_t fnv1a64(std::string_view s);

}  // namespace simflow

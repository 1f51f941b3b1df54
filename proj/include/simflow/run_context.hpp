#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "simflow/kpi_analyst.hpp"
#include "simflow/types.hpp"

namespace simflow::orch {

struct Objective {
  std::string text;
  std::vector<kpi::KpiConstraint> constraints;
  bool modification_requested = false;
  int max_iterations = 3;  // M, covers both feedback levels
};

struct ContextEntry {
  int iter = 0;
  std::string kind;  // last_error | kpi_feedback
  nlohmann::json payload;
};

// The persistent context threaded through every iteration: the objective,
// an append-only feedback list, token totals and the run timers.
class RunContext {
 public:
  explicit RunContext(Objective objective) : objective_(std::move(objective)) {}

  const Objective& objective() const { return objective_; }

  void append_entry(int iter, std::string kind, nlohmann::json payload);
  const std::vector<ContextEntry>& entries() const { return entries_; }
  // Compact JSON array of entries, injected into the planner's user message.
  std::string serialize_entries() const;

  void add_tokens(long long in, long long out);
  long long tokens_in() const { return tokens_in_; }
  long long tokens_out() const { return tokens_out_; }

  void mark_start(std::uint64_t now_us) { start_us_ = now_us; }
  // First valid KPI extraction; sticky, later analyses never move it.
  void mark_first_kpi(std::uint64_t now_us);
  bool first_kpi_recorded() const { return first_kpi_us_.has_value(); }
  std::optional<double> tti_seconds() const;
  std::uint64_t start_us() const { return start_us_; }

  int iter = 0;

 private:
  Objective objective_;
  std::vector<ContextEntry> entries_;
  long long tokens_in_ = 0;
  long long tokens_out_ = 0;
  std::uint64_t start_us_ = 0;
  std::optional<std::uint64_t> first_kpi_us_;
};

}  // namespace simflow::orch

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "simflow/artifact_store.hpp"
#include "simflow/contract.hpp"
#include "simflow/kpi_analyst.hpp"
#include "simflow/network.hpp"
#include "simflow/types.hpp"

namespace simflow::simbridge {

enum class EngineMode { Mock, External };

// Optional hooks for driving a real simulator / geodata pipeline instead of
// the built-in deterministic implementations. Commands run through the shell
// with {placeholders} substituted; a non-zero exit is a tool error.
struct ExternalHooks {
  std::string build_command;  // {out} {city} {distance_miles} {volume}
  std::string run_command;    // {config} {net} {routes} {tripinfo} {summary} {steps}
};

struct ToolOutcome {
  bool ok = false;
  std::vector<store::Artifact> artifacts;
  std::optional<ErrorPayload> error;
  std::optional<kpi::KpiReport> kpi;  // set by ANALYZE
  std::vector<std::string> warnings;

  static ToolOutcome success() {
    ToolOutcome r;
    r.ok = true;
    return r;
  }
  static ToolOutcome failure(ErrorPayload e) {
    ToolOutcome r;
    r.error = std::move(e);
    return r;
  }
};

// The tool layer behind the worker roles. Every dispatch re-checks artifact
// dependencies; a dispatch that reaches a tool with unsatisfied prerequisites
// increments a process-wide violation counter (asserted zero by the tests).
class Toolbox {
 public:
  Toolbox(store::ArtifactStore* store, EngineMode mode, Clock* clock,
          ExternalHooks hooks = {});

  ToolOutcome dispatch(const contract::ValidatedAction& action, int step_id);

  static std::uint64_t dependency_violation_count();

 private:
  ToolOutcome build_net(const nlohmann::json& params, int step_id);
  ToolOutcome modify(const nlohmann::json& params, int step_id);
  ToolOutcome gen_demand(const nlohmann::json& params, int step_id);
  ToolOutcome run(const nlohmann::json& params, int step_id);
  ToolOutcome analyze(const nlohmann::json& params, int step_id);

  Result<Network, ErrorPayload> load_latest_network() const;

  store::ArtifactStore* store_;
  EngineMode mode_;
  Clock* clock_;
  ExternalHooks hooks_;
};

std::string write_config_xml(const std::string& net_path, const std::string& routes_path,
                             long long steps, bool gui, long long seed,
                             const std::string& tripinfo_path, const std::string& summary_path);

struct ConfigDoc {
  std::string net_path;
  std::string routes_path;
  long long steps = 3600;
  bool gui = false;
  long long seed = 42;
  std::string tripinfo_path;
  std::string summary_path;
};
Result<ConfigDoc, std::string> parse_config(const std::string& xml_text);
Result<ConfigDoc, std::string> read_config(const std::filesystem::path& path);

}  // namespace simflow::simbridge

// simflow command line: run one objective, run the benchmark, validate
// contract documents, inspect a finished run.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "simflow/bench.hpp"
#include "simflow/orchestrator.hpp"
#include "simflow/planner.hpp"

namespace fs = std::filesystem;
using namespace simflow;

namespace {

std::string getenv_or(const char* key, const std::string& fallback) {
  const char* v = std::getenv(key);
  return v ? v : fallback;
}

int exit_code_for(orch::RunStatus status) {
  switch (status) {
    case orch::RunStatus::Success: return 0;
    case orch::RunStatus::FailureMaxIter: return 2;
    case orch::RunStatus::FailureFatal: return 3;
  }
  return 3;
}

void print_outcome(const orch::RunOutcome& outcome) {
  std::cout << "status: " << orch::to_token(outcome.status) << "\n"
            << "iterations_used: " << outcome.iterations_used << "\n"
            << "tokens: in=" << outcome.tokens_in << " out=" << outcome.tokens_out << "\n";
  if (outcome.tti_seconds) std::cout << "tti_s: " << *outcome.tti_seconds << "\n";
  std::cout << "total_wall_s: " << outcome.total_wall_seconds << "\n";
  if (outcome.kpis) std::cout << "kpis: " << outcome.kpis->to_json().dump() << "\n";
  if (outcome.last_error) std::cout << "last_error: " << outcome.last_error->to_json().dump() << "\n";
}

agent::HttpConfig http_from_env() {
  agent::HttpConfig http;
  std::string endpoint = getenv_or("SIMFLOW_ENDPOINT", "http://127.0.0.1:8000");
  std::string rest = endpoint;
  if (rest.rfind("http://", 0) == 0) rest = rest.substr(7);
  auto colon = rest.find(':');
  auto slash = rest.find('/');
  http.host = rest.substr(0, std::min(colon, slash));
  http.port = 80;
  if (colon != std::string::npos && (slash == std::string::npos || colon < slash)) {
    http.port = std::atoi(rest.substr(colon + 1).c_str());
  }
  if (slash != std::string::npos) http.path = rest.substr(slash);
  http.model = getenv_or("SIMFLOW_MODEL", "default");
  http.api_key = getenv_or("SIMFLOW_API_KEY", "");
  return http;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simflow: multi-agent traffic simulation orchestration engine"};
  app.require_subcommand(1);

  // --- run ---------------------------------------------------------------
  auto* run = app.add_subcommand("run", "Run one objective through the engine");
  std::string objective_text;
  std::string backend = "scripted", engine = "mock", mode = "multiagent", scenario;
  std::string run_dir = "runs/run", scenario_dir = getenv_or("SIMFLOW_SCENARIO_DIR", "scenarios");
  std::string modification = "auto";
  int max_iterations = 3, repairs = -1, react_steps = 12;
  long long seed = 42;
  std::vector<std::string> requires_flags;
  std::string engine_config_file;
  run->add_option("objective", objective_text, "Natural-language objective")->required();
  run->add_option("--config", engine_config_file, "Engine config JSON file (flags override it)");
  auto* opt_backend = run->add_option("--backend", backend, "scripted|http")
                          ->check(CLI::IsMember({"scripted", "http"}));
  auto* opt_engine = run->add_option("--engine", engine, "mock|external")
                         ->check(CLI::IsMember({"mock", "external"}));
  run->add_option("--mode", mode, "multiagent|monolithic")
      ->check(CLI::IsMember({"multiagent", "monolithic"}));
  auto* opt_scenario = run->add_option("--scenario", scenario, "Scripted scenario id");
  auto* opt_scenario_dir =
      run->add_option("--scenario-dir", scenario_dir, "Directory holding scenario files");
  run->add_option("-M,--max-iterations", max_iterations, "Planning iterations budget");
  run->add_option("--repairs", repairs, "Repair attempts; maps to M = repairs + 1");
  auto* opt_react = run->add_option("--react-steps", react_steps, "Monolithic step budget");
  auto* opt_run_dir = run->add_option("--run-dir", run_dir, "Run directory");
  auto* opt_seed = run->add_option("--seed", seed, "Deterministic seed");
  run->add_option("--require", requires_flags,
                  "KPI constraint, e.g. \"waiting_time<=30\" (repeatable)");
  run->add_option("--modification", modification, "auto|yes|no")
      ->check(CLI::IsMember({"auto", "yes", "no"}));

  // --- bench ---------------------------------------------------------------
  auto* bench_cmd = app.add_subcommand("bench", "Run the task suite and emit report tables");
  std::string suite_path = "suites/bench30.json", bench_out = "bench_out";
  std::vector<std::string> bench_modes = {"multiagent"};
  std::vector<int> m_list;
  int bench_repairs = -1, bench_M = 1, jobs = 1;
  std::string bench_backend = "scripted", bench_engine = "mock";
  std::string bench_scenario_dir = getenv_or("SIMFLOW_SCENARIO_DIR", "scenarios");
  bench_cmd->add_option("--suite", suite_path, "Suite JSON file");
  bench_cmd->add_option("--mode", bench_modes, "multiagent and/or monolithic (repeatable)");
  bench_cmd->add_option("-M,--max-iterations", bench_M, "Planning iterations budget");
  bench_cmd->add_option("--repairs", bench_repairs, "Repair attempts; maps to M = repairs + 1");
  bench_cmd->add_option("--m-list", m_list, "Run several M values side by side");
  bench_cmd->add_option("--out-dir", bench_out, "Report output directory");
  bench_cmd->add_option("--scenario-dir", bench_scenario_dir, "Directory holding scenario files");
  bench_cmd->add_option("--backend", bench_backend, "scripted|http");
  bench_cmd->add_option("--engine", bench_engine, "mock|external");
  bench_cmd->add_option("--jobs", jobs, "Parallel task workers");

  // --- validate ------------------------------------------------------------
  auto* validate = app.add_subcommand("validate", "Validate an envelope or plan document");
  std::string validate_file, validate_kind = "envelope";
  bool modification_requested = false;
  validate->add_option("file", validate_file, "JSON document to validate")->required();
  validate->add_option("--kind", validate_kind, "envelope|plan")
      ->check(CLI::IsMember({"envelope", "plan"}));
  validate->add_flag("--modification-requested", modification_requested,
                     "Plan validation: a modification was requested");
  std::string validate_role;
  validate->add_option("--role", validate_role,
                       "Also check the envelope against this worker role's contract");

  // --- inspect ---------------------------------------------------------------
  auto* inspect = app.add_subcommand("inspect", "Show artifacts and events of a run directory");
  std::string inspect_dir;
  inspect->add_option("--run-dir", inspect_dir, "Run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;  // any flag/usage problem is a config error
  }

  if (*run) {
    if (repairs >= 0) max_iterations = repairs + 1;
    orch::Objective objective;
    objective.text = objective_text;
    objective.max_iterations = max_iterations;
    for (const auto& flag : requires_flags) {
      auto c = kpi::parse_constraint(flag);
      if (!c) {
        std::cerr << "error: bad --require constraint '" << flag << "'\n";
        return 1;
      }
      objective.constraints.push_back(*c);
    }
    objective.modification_requested = modification == "auto"
                                           ? planner::classify_modification(objective.text)
                                           : modification == "yes";
    orch::EngineConfig cfg;
    cfg.http = http_from_env();
    if (!engine_config_file.empty()) {
      auto loaded = orch::load_engine_config(engine_config_file);
      if (!loaded) {
        std::cerr << "error: " << loaded.error().message << "\n";
        return 1;
      }
      cfg = *loaded;
      if (cfg.http.host.empty()) cfg.http = http_from_env();
    }
    if (engine_config_file.empty() || opt_backend->count()) cfg.backend_kind = backend;
    if (engine_config_file.empty() || opt_scenario->count()) cfg.scenario_id = scenario;
    if (engine_config_file.empty() || opt_scenario_dir->count()) cfg.scenario_dir = scenario_dir;
    if (engine_config_file.empty() || opt_engine->count()) cfg.engine_mode = engine;
    if (engine_config_file.empty() || opt_run_dir->count()) cfg.run_dir = run_dir;
    if (engine_config_file.empty() || opt_react->count()) cfg.max_react_steps = react_steps;
    if (engine_config_file.empty() || opt_seed->count()) cfg.seed = seed;
    backend = cfg.backend_kind;
    scenario = cfg.scenario_id;
    if (backend == "scripted" && scenario.empty()) {
      std::cerr << "error: --scenario is required with the scripted backend\n";
      return 1;
    }
    orch::RunOutcome outcome =
        mode == "monolithic" ? orch::run_monolithic(objective, cfg) : orch::run_pipeline(objective, cfg);
    print_outcome(outcome);
    return exit_code_for(outcome.status);
  }

  if (*bench_cmd) {
    if (bench_repairs >= 0) bench_M = bench_repairs + 1;
    if (m_list.empty()) m_list.push_back(bench_M);
    auto suite = bench::load_suite(suite_path);
    if (!suite) {
      std::cerr << "error: " << suite.error().detail << "\n";
      return 1;
    }
    bench::BenchConfig cfg;
    cfg.scenario_dir = bench_scenario_dir;
    cfg.out_dir = bench_out;
    cfg.backend_kind = bench_backend;
    cfg.engine_mode = bench_engine;
    cfg.parallelism = jobs;
    cfg.http = http_from_env();
    std::vector<bench::BenchReport> reports;
    for (const auto& m : bench_modes) {
      for (int M : m_list) {
        auto report = bench::run_suite(*suite, m, M, cfg);
        report.suite_name = fs::path(suite_path).stem().string();
        reports.push_back(std::move(report));
      }
    }
    auto merged = bench::merge_reports(reports);
    bench::emit_tables(merged, bench_out);
    std::cout << "report written to " << bench_out << "/bench_report.{md,csv,json}\n";
    for (const auto& a : merged.aggregates) {
      std::cout << a.level << " " << a.mode << " M=" << a.max_iterations << " SR=" << a.sr_percent
                << "% avg_tokens=" << a.avg_tokens << "\n";
    }
    return 0;
  }

  if (*validate) {
    std::ifstream in(validate_file);
    if (!in) {
      std::cerr << "error: cannot open " << validate_file << "\n";
      return 1;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string raw = buf.str();
    if (validate_kind == "envelope") {
      auto env = contract::parse_envelope(raw);
      if (!env) {
        std::cout << contract::to_string(env.error().code) << ": " << env.error().detail << "\n";
        return 1;
      }
      if (!validate_role.empty()) {
        auto role = role_from_token(validate_role);
        if (!role) {
          std::cerr << "error: unknown role '" << validate_role << "'\n";
          return 1;
        }
        auto validated = contract::validate_action(*env, *role);
        if (!validated) {
          std::cout << contract::to_string(validated.error().code) << ": "
                    << validated.error().detail << "\n";
          return 1;
        }
        for (const auto& w : validated->warnings) std::cout << "warning: " << w << "\n";
      }
      std::cout << "valid envelope: action=" << to_token(env->action) << "\n";
      return 0;
    }
    auto doc = contract::parse_plan(raw);
    if (!doc) {
      std::cout << contract::to_string(doc.error().code) << ": " << doc.error().detail << "\n";
      return 1;
    }
    auto validation = contract::validate_plan(*doc, modification_requested);
    if (!validation.accepted) {
      for (const auto& v : validation.violations) {
        std::cout << contract::to_string(v.code);
        if (v.step_id) std::cout << " (step " << v.step_id << ")";
        std::cout << ": " << v.detail << "\n";
      }
      return 1;
    }
    std::cout << "valid plan: " << doc->steps.size() << " steps\n";
    return 0;
  }

  if (*inspect) {
    fs::path dir = inspect_dir;
    if (!fs::exists(dir / "artifacts.jsonl")) {
      std::cerr << "error: " << dir.string() << " does not look like a run directory\n";
      return 1;
    }
    VirtualClock clock;
    auto store = store::ArtifactStore::open(dir, &clock);
    if (!store) {
      std::cerr << "error: " << store.error().detail << "\n";
      return 1;
    }
    std::cout << "artifacts (" << store->artifacts().size() << "):\n";
    for (const auto& a : store->artifacts()) {
      std::cout << "  " << a.artifact_id << " " << store::to_token(a.kind) << " iter=" << a.iteration
                << " step=" << a.step_id << " " << a.path << " sha256=" << a.content_hash.substr(0, 12)
                << " parents=[";
      for (std::size_t i = 0; i < a.parents.size(); ++i) {
        if (i) std::cout << ",";
        std::cout << a.parents[i];
      }
      std::cout << "]\n";
    }
    auto events = orch::EventLog::read_all(dir / "events.jsonl");
    int plans = 0, steps = 0, failures = 0;
    std::string outcome = "unknown";
    for (const auto& e : events) {
      const std::string kind = e.value("event", "");
      if (kind == "plan_accepted") ++plans;
      if (kind == "step_succeeded") ++steps;
      if (kind == "step_failed") ++failures;
      if (kind == "outcome") outcome = e.value("status", "unknown");
    }
    std::cout << "events: " << events.size() << " (plans=" << plans << " steps_ok=" << steps
              << " steps_failed=" << failures << ")\noutcome: " << outcome << "\n";
    return 0;
  }

  return 1;
}

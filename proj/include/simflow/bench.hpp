#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "simflow/orchestrator.hpp"
#include "simflow/result.hpp"

namespace simflow::bench {

struct TaskSpec {
  std::string task_id;
  std::string level;  // L1 | L2 | L3
  std::string objective_text;
  std::vector<kpi::KpiConstraint> constraints;
  std::string scenario_id;
  bool live = false;  // live LLM mode ignores scenario_id
  bool expected_modification = false;
  bool fault_injected = false;  // part of the repair-uplift sub-suite
};

struct SuiteError {
  std::string detail;
};

Result<std::vector<TaskSpec>, SuiteError> load_suite(const std::filesystem::path& path);

struct TaskRow {
  std::string task_id;
  std::string level;
  std::string mode;  // multiagent | monolithic
  int max_iterations = 1;
  std::string status;        // SUCCESS | FAILURE_MAX_ITER | FAILURE_FATAL
  std::string failure_code;  // empty on success
  long long tokens_in = 0;
  long long tokens_out = 0;
  std::optional<double> tti_seconds;
  int iterations_used = 0;
};

struct AggRow {
  std::string level;
  std::string mode;
  int max_iterations = 1;
  int n_tasks = 0;
  int successes = 0;
  double sr_percent = 0;
  double avg_tokens = 0;  // over all tasks, failures included
  std::optional<double> avg_tti_seconds;  // over successes only
};

struct BenchReport {
  std::string suite_name;
  std::vector<TaskRow> rows;
  std::vector<AggRow> aggregates;
};

struct BenchConfig {
  std::filesystem::path scenario_dir = "scenarios";
  std::filesystem::path out_dir = "bench_out";
  std::string backend_kind = "scripted";
  agent::HttpConfig http;
  std::string engine_mode = "mock";
  int max_react_steps = 12;
  int parallelism = 1;
};

// Executes every task in its own isolated run directory
// (<out_dir>/runs/<mode>_M<max_iterations>_<task_id>) and aggregates per level.
BenchReport run_suite(const std::vector<TaskSpec>& suite, const std::string& mode,
                      int max_iterations, const BenchConfig& cfg);

// Merges combo reports (same suite, different mode/M) for side-by-side tables.
BenchReport merge_reports(const std::vector<BenchReport>& reports);

void emit_markdown(const BenchReport& report, const std::filesystem::path& file);
void emit_csv(const BenchReport& report, const std::filesystem::path& file);
void emit_json(const BenchReport& report, const std::filesystem::path& file);

// Writes bench_report.{md,csv,json} into out_dir.
void emit_tables(const BenchReport& report, const std::filesystem::path& out_dir);

}  // namespace simflow::bench

#include "simflow/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <thread>

namespace simflow::bench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

Result<std::vector<TaskSpec>, SuiteError> load_suite(const fs::path& path) {
  std::ifstream in(path);
  if (!in) return SuiteError{"cannot open suite file: " + path.string()};
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("tasks") || !j["tasks"].is_array()) {
    return SuiteError{"suite file must be a JSON object with a 'tasks' array"};
  }
  std::vector<TaskSpec> out;
  for (const json& jt : j["tasks"]) {
    TaskSpec t;
    t.task_id = jt.value("task_id", "");
    t.level = jt.value("level", "");
    t.objective_text = jt.value("objective", "");
    t.scenario_id = jt.value("scenario_id", "");
    t.live = jt.value("live", false);
    t.expected_modification = jt.value("expected_modification", false);
    t.fault_injected = jt.value("fault_injected", false);
    if (t.task_id.empty() || t.objective_text.empty()) {
      return SuiteError{"task entries need task_id and objective"};
    }
    if (t.level != "L1" && t.level != "L2" && t.level != "L3") {
      return SuiteError{"task '" + t.task_id + "' has unknown level '" + t.level + "'"};
    }
    for (const json& jc : jt.value("constraints", json::array())) {
      auto c = kpi::parse_constraint(jc.get<std::string>());
      if (!c) return SuiteError{"task '" + t.task_id + "' has a malformed constraint"};
      t.constraints.push_back(*c);
    }
    out.push_back(std::move(t));
  }
  return out;
}

BenchReport run_suite(const std::vector<TaskSpec>& suite, const std::string& mode,
                      int max_iterations, const BenchConfig& cfg) {
  BenchReport report;
  report.rows.resize(suite.size());

  auto run_task = [&](std::size_t index) {
    const TaskSpec& task = suite[index];
    orch::EngineConfig ecfg;
    ecfg.backend_kind = task.live ? "http" : cfg.backend_kind;
    ecfg.scenario_id = task.scenario_id;
    ecfg.scenario_dir = cfg.scenario_dir;
    ecfg.http = cfg.http;
    ecfg.engine_mode = cfg.engine_mode;
    ecfg.max_react_steps = cfg.max_react_steps;
    ecfg.run_dir = cfg.out_dir / "runs" /
                   (mode + "_M" + std::to_string(max_iterations) + "_" + task.task_id);

    orch::Objective objective;
    objective.text = task.objective_text;
    objective.constraints = task.constraints;
    objective.modification_requested = task.expected_modification;
    objective.max_iterations = max_iterations;

    orch::RunOutcome outcome = mode == "monolithic" ? orch::run_monolithic(objective, ecfg)
                                                    : orch::run_pipeline(objective, ecfg);

    TaskRow row;
    row.task_id = task.task_id;
    row.level = task.level;
    row.mode = mode;
    row.max_iterations = max_iterations;
    row.status = std::string(orch::to_token(outcome.status));
    if (outcome.status != orch::RunStatus::Success) {
      row.failure_code = outcome.last_error ? outcome.last_error->code : "kpi_unsatisfied";
    }
    row.tokens_in = outcome.tokens_in;
    row.tokens_out = outcome.tokens_out;
    row.tti_seconds = outcome.status == orch::RunStatus::Success ? outcome.tti_seconds : std::nullopt;
    row.iterations_used = outcome.iterations_used;
    report.rows[index] = std::move(row);
  };

  const int jobs = std::max(cfg.parallelism, 1);
  if (jobs == 1) {
    for (std::size_t i = 0; i < suite.size(); ++i) run_task(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (int w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < suite.size(); i = next.fetch_add(1)) run_task(i);
      });
    }
    for (auto& t : workers) t.join();
  }

  // Single-threaded aggregation keyed by level.
  std::map<std::string, AggRow> agg;
  for (const auto& row : report.rows) {
    AggRow& a = agg[row.level];
    a.level = row.level;
    a.mode = mode;
    a.max_iterations = max_iterations;
    ++a.n_tasks;
    a.avg_tokens += static_cast<double>(row.tokens_in + row.tokens_out);
    if (row.status == "SUCCESS") {
      ++a.successes;
      if (row.tti_seconds) {
        a.avg_tti_seconds = a.avg_tti_seconds.value_or(0.0) + *row.tti_seconds;
      }
    }
  }
  for (auto& [level, a] : agg) {
    a.sr_percent = a.n_tasks ? 100.0 * a.successes / a.n_tasks : 0.0;
    a.avg_tokens = a.n_tasks ? a.avg_tokens / a.n_tasks : 0.0;
    if (a.avg_tti_seconds && a.successes > 0) {
      a.avg_tti_seconds = *a.avg_tti_seconds / a.successes;
    }
    report.aggregates.push_back(a);
  }
  return report;
}

BenchReport merge_reports(const std::vector<BenchReport>& reports) {
  BenchReport merged;
  for (const auto& r : reports) {
    if (merged.suite_name.empty()) merged.suite_name = r.suite_name;
    merged.rows.insert(merged.rows.end(), r.rows.begin(), r.rows.end());
    merged.aggregates.insert(merged.aggregates.end(), r.aggregates.begin(), r.aggregates.end());
  }
  return merged;
}

namespace {

struct Combo {
  std::string mode;
  int max_iterations;
  bool operator<(const Combo& other) const {
    return std::tie(mode, max_iterations) < std::tie(other.mode, other.max_iterations);
  }
};

}  // namespace

void emit_markdown(const BenchReport& report, const fs::path& file) {
  std::vector<Combo> combos;
  for (const auto& a : report.aggregates) {
    Combo c{a.mode, a.max_iterations};
    if (std::find_if(combos.begin(), combos.end(), [&](const Combo& x) {
          return x.mode == c.mode && x.max_iterations == c.max_iterations;
        }) == combos.end()) {
      combos.push_back(c);
    }
  }
  std::sort(combos.begin(), combos.end());

  auto find_agg = [&](const std::string& level, const Combo& c) -> const AggRow* {
    for (const auto& a : report.aggregates) {
      if (a.level == level && a.mode == c.mode && a.max_iterations == c.max_iterations) return &a;
    }
    return nullptr;
  };

  std::ofstream out(file, std::ios::trunc);
  out << "# Benchmark report";
  if (!report.suite_name.empty()) out << ": " << report.suite_name;
  out << "\n\n| Complexity | Metric |";
  for (const auto& c : combos) out << " " << c.mode << " M=" << c.max_iterations << " |";
  out << "\n|---|---|";
  for (std::size_t i = 0; i < combos.size(); ++i) out << "---|";
  out << "\n";
  for (const std::string level : {"L1", "L2", "L3"}) {
    const char* metrics[3] = {"SR (%)", "Avg Tokens", "TTI (s)"};
    for (int m = 0; m < 3; ++m) {
      out << "| " << level << " | " << metrics[m] << " |";
      for (const auto& c : combos) {
        const AggRow* a = find_agg(level, c);
        if (!a) {
          out << " - |";
        } else if (m == 0) {
          out << " " << fmt(a->sr_percent, 1) << " |";
        } else if (m == 1) {
          out << " " << fmt(a->avg_tokens, 1) << " |";
        } else {
          out << " " << (a->avg_tti_seconds ? fmt(*a->avg_tti_seconds, 3) : "-") << " |";
        }
      }
      out << "\n";
    }
  }
  out << "\n## Per-task outcomes\n\n| task | level | mode | M | status | failure | tokens | TTI (s) |\n";
  out << "|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : report.rows) {
    out << "| " << r.task_id << " | " << r.level << " | " << r.mode << " | " << r.max_iterations
        << " | " << r.status << " | " << (r.failure_code.empty() ? "-" : r.failure_code) << " | "
        << (r.tokens_in + r.tokens_out) << " | "
        << (r.tti_seconds ? fmt(*r.tti_seconds, 3) : "-") << " |\n";
  }
}

void emit_csv(const BenchReport& report, const fs::path& file) {
  std::ofstream out(file, std::ios::trunc);
  out << "level,mode,max_iterations,n_tasks,successes,sr_percent,avg_tokens,avg_tti_s\n";
  std::vector<AggRow> rows = report.aggregates;
  std::sort(rows.begin(), rows.end(), [](const AggRow& a, const AggRow& b) {
    return std::tie(a.mode, a.max_iterations, a.level) < std::tie(b.mode, b.max_iterations, b.level);
  });
  for (const auto& a : rows) {
    out << a.level << ',' << a.mode << ',' << a.max_iterations << ',' << a.n_tasks << ','
        << a.successes << ',' << fmt(a.sr_percent, 1) << ',' << fmt(a.avg_tokens, 1) << ','
        << (a.avg_tti_seconds ? fmt(*a.avg_tti_seconds, 3) : "") << "\n";
  }
}

void emit_json(const BenchReport& report, const fs::path& file) {
  json j;
  j["suite"] = report.suite_name;
  json aggs = json::array();
  for (const auto& a : report.aggregates) {
    json ja{{"level", a.level},          {"mode", a.mode},       {"max_iterations", a.max_iterations},
            {"n_tasks", a.n_tasks},      {"successes", a.successes}, {"sr_percent", a.sr_percent},
            {"avg_tokens", a.avg_tokens}};
    if (a.avg_tti_seconds) ja["avg_tti_s"] = *a.avg_tti_seconds;
    aggs.push_back(ja);
  }
  j["aggregates"] = aggs;
  json rows = json::array();
  for (const auto& r : report.rows) {
    json jr{{"task_id", r.task_id},
            {"level", r.level},
            {"mode", r.mode},
            {"max_iterations", r.max_iterations},
            {"status", r.status},
            {"failure_code", r.failure_code},
            {"tokens_in", r.tokens_in},
            {"tokens_out", r.tokens_out},
            {"iterations_used", r.iterations_used}};
    if (r.tti_seconds) jr["tti_s"] = *r.tti_seconds;
    rows.push_back(jr);
  }
  j["tasks"] = rows;
  std::ofstream out(file, std::ios::trunc);
  out << j.dump(2) << "\n";
}

void emit_tables(const BenchReport& report, const fs::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  emit_markdown(report, out_dir / "bench_report.md");
  emit_csv(report, out_dir / "bench_report.csv");
  emit_json(report, out_dir / "bench_report.json");
}

}  // namespace simflow::bench

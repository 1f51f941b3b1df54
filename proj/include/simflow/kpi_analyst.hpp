#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "simflow/result.hpp"

namespace simflow::kpi {

struct TripRecord {
  std::string vehicle_id;
  double depart = 0;
  double arrival = 0;
  double duration = 0;
  double route_length = 0;
  double waiting_time = 0;
  std::optional<double> co2_mg;
};

enum class Metric { MeanSpeed, Co2, TravelTime, WaitingTime, All };

std::string_view to_token(Metric m);
std::optional<Metric> metric_from_token(std::string_view token);

struct Error {
  enum class Code { MissingFile, MalformedXml } code;
  std::string detail;
};

Result<std::vector<TripRecord>, Error> parse_tripinfo(const std::filesystem::path& path);

// Per-window counts from summary.xml.
struct SummaryStep {
  double time = 0;
  long long inserted = 0;
  long long arrived = 0;
  long long running = 0;
};

Result<std::vector<SummaryStep>, Error> parse_summary(const std::filesystem::path& path);

// Aggregated KPIs. Means are present only when vehicle_count > 0 and the
// metric was requested; mean_speed is the per-vehicle mean of
// route_length/duration.
struct KpiReport {
  std::optional<double> mean_speed;        // m/s
  std::optional<double> mean_travel_time;  // s
  std::optional<double> mean_waiting_time; // s
  std::optional<double> total_co2;         // mg
  long long vehicle_count = 0;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
};

KpiReport aggregate(std::span<const TripRecord> records, Metric metric);

enum class Cmp { Le, Ge };

struct KpiConstraint {
  std::string metric;  // mean_speed | co2 | travel_time | waiting_time
  Cmp cmp = Cmp::Le;
  double threshold = 0;

  std::string to_text() const;
};

std::optional<KpiConstraint> parse_constraint(std::string_view text);  // "waiting_time<=30"

struct Violation {
  KpiConstraint constraint;
  std::optional<double> observed;
  std::string code;  // "" plain violation, "no_data", "metric_missing"
};

struct Evaluation {
  bool satisfied = false;
  std::vector<Violation> violations;
};

// Zero vehicles with non-empty constraints is never vacuously satisfied; it
// yields a no_data violation per constraint. Empty constraints always pass.
Evaluation evaluate(const KpiReport& report, const std::vector<KpiConstraint>& constraints);

// Deterministic natural-language feedback: one sentence per populated metric,
// one per violation naming observed value, threshold and required direction.
std::string verbalize(const KpiReport& report, const std::vector<Violation>& violations);

}  // namespace simflow::kpi

#include "simflow/kpi_analyst.hpp"

#include <charconv>
#include <cstdio>

#include "simflow/xml.hpp"

namespace simflow::kpi {

namespace {

std::string fmt2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

Result<double, Error> attr_number(const xml::Element& el, std::string_view key) {
  const std::string* raw = el.attr(key);
  if (!raw) {
    return Error{Error::Code::MalformedXml,
                 "<" + el.name + "> missing attribute '" + std::string(key) + "'"};
  }
  double out = 0;
  auto [ptr, ec] = std::from_chars(raw->data(), raw->data() + raw->size(), out);
  if (ec != std::errc() || ptr != raw->data() + raw->size()) {
    return Error{Error::Code::MalformedXml, "bad numeric attribute '" + std::string(key) + "'"};
  }
  return out;
}

}  // namespace

std::string_view to_token(Metric m) {
  switch (m) {
    case Metric::MeanSpeed: return "mean_speed";
    case Metric::Co2: return "co2";
    case Metric::TravelTime: return "travel_time";
    case Metric::WaitingTime: return "waiting_time";
    case Metric::All: return "all";
  }
  return "?";
}

std::optional<Metric> metric_from_token(std::string_view token) {
  if (token == "mean_speed") return Metric::MeanSpeed;
  if (token == "co2") return Metric::Co2;
  if (token == "travel_time") return Metric::TravelTime;
  if (token == "waiting_time") return Metric::WaitingTime;
  if (token == "all") return Metric::All;
  return std::nullopt;
}

Result<std::vector<TripRecord>, Error> parse_tripinfo(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    return Error{Error::Code::MissingFile, path.string()};
  }
  auto doc = xml::parse_file(path);
  if (!doc) return Error{Error::Code::MalformedXml, doc.error().message};
  if (doc->name != "tripinfos") {
    return Error{Error::Code::MalformedXml, "root element must be <tripinfos>, got <" + doc->name + ">"};
  }
  std::vector<TripRecord> records;
  for (const xml::Element* el : doc->children_named("tripinfo")) {
    TripRecord r;
    const std::string* id = el->attr("id");
    if (!id) return Error{Error::Code::MalformedXml, "tripinfo missing 'id'"};
    r.vehicle_id = *id;
    auto depart = attr_number(*el, "depart");
    if (!depart) return depart.error();
    r.depart = *depart;
    auto arrival = attr_number(*el, "arrival");
    if (!arrival) return arrival.error();
    r.arrival = *arrival;
    auto duration = attr_number(*el, "duration");
    if (!duration) return duration.error();
    r.duration = *duration;
    auto length = attr_number(*el, "routeLength");
    if (!length) return length.error();
    r.route_length = *length;
    auto waiting = attr_number(*el, "waitingTime");
    if (!waiting) return waiting.error();
    r.waiting_time = *waiting;
    if (const xml::Element* em = el->child("emissions")) {
      auto co2 = attr_number(*em, "CO2_abs");
      if (!co2) return co2.error();
      r.co2_mg = *co2;
    }
    records.push_back(std::move(r));
  }
  return records;
}

Result<std::vector<SummaryStep>, Error> parse_summary(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    return Error{Error::Code::MissingFile, path.string()};
  }
  auto doc = xml::parse_file(path);
  if (!doc) return Error{Error::Code::MalformedXml, doc.error().message};
  if (doc->name != "summary") {
    return Error{Error::Code::MalformedXml, "root element must be <summary>, got <" + doc->name + ">"};
  }
  std::vector<SummaryStep> steps;
  for (const xml::Element* el : doc->children_named("step")) {
    SummaryStep s;
    auto time = attr_number(*el, "time");
    if (!time) return time.error();
    s.time = *time;
    auto inserted = attr_number(*el, "inserted");
    if (!inserted) return inserted.error();
    s.inserted = static_cast<long long>(*inserted);
    auto arrived = attr_number(*el, "arrived");
    if (!arrived) return arrived.error();
    s.arrived = static_cast<long long>(*arrived);
    auto running = attr_number(*el, "running");
    if (!running) return running.error();
    s.running = static_cast<long long>(*running);
    steps.push_back(s);
  }
  return steps;
}

nlohmann::json KpiReport::to_json() const {
  nlohmann::json j;
  j["vehicle_count"] = vehicle_count;
  j["warnings"] = warnings;
  auto set = [&](const char* key, const std::optional<double>& v) {
    if (v) j[key] = *v;
  };
  set("mean_speed", mean_speed);
  set("mean_travel_time", mean_travel_time);
  set("mean_waiting_time", mean_waiting_time);
  set("total_co2", total_co2);
  return j;
}

KpiReport aggregate(std::span<const TripRecord> records, Metric metric) {
  KpiReport report;
  report.vehicle_count = static_cast<long long>(records.size());
  if (records.empty()) {
    report.warnings.push_back("zero_vehicles");
    return report;
  }
  const bool all = metric == Metric::All;
  if (all || metric == Metric::MeanSpeed) {
    double sum = 0;
    long long n = 0;
    for (const auto& r : records) {
      if (r.duration > 0) {
        sum += r.route_length / r.duration;
        ++n;
      }
    }
    if (n > 0) report.mean_speed = sum / static_cast<double>(n);
  }
  if (all || metric == Metric::TravelTime) {
    double sum = 0;
    for (const auto& r : records) sum += r.duration;
    report.mean_travel_time = sum / static_cast<double>(records.size());
  }
  if (all || metric == Metric::WaitingTime) {
    double sum = 0;
    for (const auto& r : records) sum += r.waiting_time;
    report.mean_waiting_time = sum / static_cast<double>(records.size());
  }
  if (all || metric == Metric::Co2) {
    double sum = 0;
    for (const auto& r : records) {
      if (r.co2_mg) sum += *r.co2_mg;
    }
    report.total_co2 = sum;
  }
  return report;
}

std::string KpiConstraint::to_text() const {
  return metric + (cmp == Cmp::Le ? "<=" : ">=") + fmt2(threshold);
}

std::optional<KpiConstraint> parse_constraint(std::string_view text) {
  std::size_t pos = text.find("<=");
  Cmp cmp = Cmp::Le;
  if (pos == std::string_view::npos) {
    pos = text.find(">=");
    cmp = Cmp::Ge;
  }
  if (pos == std::string_view::npos) return std::nullopt;
  std::string metric(text.substr(0, pos));
  if (metric != "mean_speed" && metric != "co2" && metric != "travel_time" && metric != "waiting_time") {
    return std::nullopt;
  }
  std::string_view num = text.substr(pos + 2);
  double threshold = 0;
  auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), threshold);
  if (ec != std::errc() || ptr != num.data() + num.size()) return std::nullopt;
  return KpiConstraint{metric, cmp, threshold};
}

namespace {
std::optional<double> observed_for(const KpiReport& report, const std::string& metric) {
  if (metric == "mean_speed") return report.mean_speed;
  if (metric == "co2") return report.total_co2;
  if (metric == "travel_time") return report.mean_travel_time;
  if (metric == "waiting_time") return report.mean_waiting_time;
  return std::nullopt;
}
}  // namespace

Evaluation evaluate(const KpiReport& report, const std::vector<KpiConstraint>& constraints) {
  Evaluation out;
  if (constraints.empty()) {
    out.satisfied = true;
    return out;
  }
  if (report.vehicle_count == 0) {
    for (const auto& c : constraints) out.violations.push_back(Violation{c, std::nullopt, "no_data"});
    out.satisfied = false;
    return out;
  }
  for (const auto& c : constraints) {
    auto observed = observed_for(report, c.metric);
    if (!observed) {
      out.violations.push_back(Violation{c, std::nullopt, "metric_missing"});
      continue;
    }
    bool holds = c.cmp == Cmp::Le ? (*observed <= c.threshold) : (*observed >= c.threshold);
    if (!holds) out.violations.push_back(Violation{c, observed, ""});
  }
  out.satisfied = out.violations.empty();
  return out;
}

std::string verbalize(const KpiReport& report, const std::vector<Violation>& violations) {
  std::vector<std::string> sentences;
  if (report.vehicle_count == 0) {
    sentences.push_back("Warning: no vehicles completed the simulation.");
  }
  if (report.mean_speed) sentences.push_back("Mean speed is " + fmt2(*report.mean_speed) + " m/s.");
  if (report.mean_travel_time) {
    sentences.push_back("Mean travel time is " + fmt2(*report.mean_travel_time) + " s.");
  }
  if (report.mean_waiting_time) {
    sentences.push_back("Mean waiting time is " + fmt2(*report.mean_waiting_time) + " s.");
  }
  if (report.total_co2) sentences.push_back("Total CO2 is " + fmt2(*report.total_co2) + " mg.");
  if (violations.empty()) {
    sentences.push_back("All constraints satisfied.");
  } else {
    for (const auto& v : violations) {
      const KpiConstraint& c = v.constraint;
      if (v.code == "no_data") {
        sentences.push_back("Constraint " + c.to_text() + " cannot be evaluated: no trip data.");
      } else if (v.code == "metric_missing") {
        sentences.push_back("Constraint " + c.to_text() + " cannot be evaluated: " + c.metric +
                            " was not reported; analyze " + c.metric + " next.");
      } else {
        const char* direction = c.cmp == Cmp::Le ? "reduce" : "increase";
        sentences.push_back("Constraint violated: " + c.metric + " observed " + fmt2(*v.observed) +
                            " vs threshold " + (c.cmp == Cmp::Le ? "<=" : ">=") + fmt2(c.threshold) +
                            "; " + direction + " " + c.metric + ".");
      }
    }
  }
  std::string out;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (i) out += " ";
    out += sentences[i];
  }
  return out;
}

}  // namespace simflow::kpi

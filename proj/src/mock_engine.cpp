#include "simflow/mock_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace simflow::simbridge {

namespace {

std::string fmt2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

struct SimVehicle {
  std::string id;
  double depart = 0;
  std::vector<const NetEdge*> route;
};

}  // namespace

Result<SimResult, ErrorPayload> run_mock(const Network& net, const RouteDoc& routes,
                                         double end_time, const EngineConstants& constants) {
  std::vector<SimVehicle> vehicles;

  auto resolve_route = [&](const std::vector<std::string>& ids,
                           std::vector<const NetEdge*>& out) -> std::optional<std::string> {
    out.clear();
    for (const auto& id : ids) {
      const NetEdge* e = net.edge_by_id(id);
      if (!e) return id;
      out.push_back(e);
    }
    return std::nullopt;
  };

  for (const auto& v : routes.vehicles) {
    SimVehicle sv;
    sv.id = v.id;
    sv.depart = v.depart;
    if (auto bad = resolve_route(v.edges, sv.route)) {
      return ErrorPayload{"unknown_edge_in_route",
                          "route of '" + v.id + "' references edge '" + *bad + "' absent from the network",
                          {}};
    }
    vehicles.push_back(std::move(sv));
  }

  for (const auto& f : routes.flows) {
    auto route = net.route_between(f.from_edge, f.to_edge);
    if (!route) {
      return ErrorPayload{"unroutable", "flow '" + f.id + "' is not routable in the current network", {}};
    }
    std::vector<const NetEdge*> resolved;
    if (auto bad = resolve_route(*route, resolved)) {
      return ErrorPayload{"unknown_edge_in_route", "flow route references '" + *bad + "'", {}};
    }
    if (f.vph <= 0) continue;
    const double headway = 3600.0 / static_cast<double>(f.vph);
    const auto count = static_cast<long long>(std::floor((f.end - f.begin) / headway));
    for (long long i = 0; i < count; ++i) {
      SimVehicle sv;
      sv.id = f.id + "." + std::to_string(i);
      sv.depart = f.begin + headway * static_cast<double>(i);
      sv.route = resolved;
      vehicles.push_back(std::move(sv));
    }
  }

  std::sort(vehicles.begin(), vehicles.end(), [](const SimVehicle& a, const SimVehicle& b) {
    return std::tie(a.depart, a.id) < std::tie(b.depart, b.id);
  });

  SimResult sim;
  std::vector<SimVehicle> inserted;
  for (auto& v : vehicles) {
    if (v.depart < end_time) inserted.push_back(std::move(v));
  }
  sim.departures = static_cast<int>(inserted.size());
  sim.zero_vehicles = inserted.empty();

  // Pass 1: per-(edge, window) entry counts over the free-flow schedule.
  std::map<std::pair<const NetEdge*, long long>, long long> entries;
  for (const auto& v : inserted) {
    double t = v.depart;
    for (const NetEdge* e : v.route) {
      auto window = static_cast<long long>(std::floor(t / constants.window_s));
      ++entries[{e, window}];
      t += e->length / e->vmax;
    }
  }

  // Pass 2: durations with congestion delay.
  struct Trip {
    std::string id;
    double depart, arrival, duration, length, waiting, co2;
  };
  std::vector<Trip> trips;
  std::vector<std::pair<double, double>> spans;  // (depart, arrival) of all inserted
  for (const auto& v : inserted) {
    double t = v.depart;
    double waiting = 0;
    double length = 0;
    for (const NetEdge* e : v.route) {
      auto window = static_cast<long long>(std::floor(t / constants.window_s));
      const double fftime = e->length / e->vmax;
      const double capacity = static_cast<double>(e->lanes) * constants.beta;
      const auto load = static_cast<double>(entries[{e, window}]);
      if (load > capacity) {
        waiting += constants.alpha * (load - capacity) / capacity * fftime;
      }
      t += fftime;
      length += e->length;
    }
    const double arrival = t + waiting;
    spans.emplace_back(v.depart, arrival);
    if (arrival > end_time) continue;  // still running when the simulation ends
    Trip trip;
    trip.id = v.id;
    trip.depart = v.depart;
    trip.arrival = arrival;
    trip.duration = arrival - v.depart;
    trip.length = length;
    trip.waiting = waiting;
    trip.co2 = constants.gamma_mg_per_s * trip.duration;
    trips.push_back(std::move(trip));
  }
  sim.arrivals = static_cast<int>(trips.size());

  std::sort(trips.begin(), trips.end(),
            [](const Trip& a, const Trip& b) { return std::tie(a.arrival, a.id) < std::tie(b.arrival, b.id); });

  xml::Element tripinfos;
  tripinfos.name = "tripinfos";
  for (const auto& t : trips) {
    xml::Element el;
    el.name = "tripinfo";
    el.attrs = {{"id", t.id},           {"depart", fmt2(t.depart)},
                {"arrival", fmt2(t.arrival)}, {"duration", fmt2(t.duration)},
                {"routeLength", fmt2(t.length)}, {"waitingTime", fmt2(t.waiting)}};
    xml::Element em;
    em.name = "emissions";
    em.attrs = {{"CO2_abs", fmt2(t.co2)}};
    el.children.push_back(em);
    tripinfos.children.push_back(el);
  }
  const std::string model_header =
      "mock engine: alpha=" + fmt2(constants.alpha) + " beta=" + fmt2(constants.beta) +
      " gamma=" + fmt2(constants.gamma_mg_per_s) + "mg/s window=" + fmt2(constants.window_s) + "s";
  sim.tripinfo_xml = xml::serialize(tripinfos, model_header);

  xml::Element summary;
  summary.name = "summary";
  const auto horizon = static_cast<long long>(std::ceil(end_time / constants.window_s));
  for (long long w = 0; w < std::max<long long>(horizon, 1); ++w) {
    const double t0 = static_cast<double>(w) * constants.window_s;
    const double t1 = t0 + constants.window_s;
    long long ins = 0, arr = 0, running = 0;
    for (const auto& [dep, arrv] : spans) {
      if (dep >= t0 && dep < t1) ++ins;
      if (arrv >= t0 && arrv < t1 && arrv <= end_time) ++arr;
      if (dep <= t0 && arrv > t0) ++running;
    }
    xml::Element step;
    step.name = "step";
    step.attrs = {{"time", fmt2(t0)},
                  {"inserted", std::to_string(ins)},
                  {"arrived", std::to_string(arr)},
                  {"running", std::to_string(running)}};
    summary.children.push_back(step);
  }
  sim.summary_xml = xml::serialize(summary, model_header);
  return sim;
}

}  // namespace simflow::simbridge

#include "simflow/demand.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "simflow/contract.hpp"
#include "simflow/similarity.hpp"

namespace simflow::simbridge {

namespace {

std::string fmt2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

double parse_double(const std::string& s, double fallback = 0) {
  double out = fallback;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  (void)ptr;
  if (ec != std::errc()) return fallback;
  return out;
}

}  // namespace

std::vector<const NetEdge*> resolve_edge_ref(const Network& net, const std::string& reference) {
  if (const NetEdge* e = net.edge_by_id(reference)) return {e};
  std::string normalized = contract::normalize_road_name(reference);
  auto edges = net.edges_by_street(normalized);
  std::sort(edges.begin(), edges.end(),
            [](const NetEdge* a, const NetEdge* b) { return a->id < b->id; });
  return edges;
}

std::vector<std::string> nearest_references(const Network& net, const std::string& reference) {
  std::vector<std::string> names = net.street_names();
  for (const auto& id : net.edge_ids()) names.push_back(id);
  return similarity::rank_candidates(contract::normalize_road_name(reference), names, 3);
}

Result<std::string, ErrorPayload> generate_demand(const Network& net, const DemandSpec& spec) {
  RouteDoc doc;
  if (spec.kind == DemandSpec::Kind::OdFlow) {
    auto from_edges = resolve_edge_ref(net, spec.from_edge);
    if (from_edges.empty()) {
      return ErrorPayload{"unroutable",
                          "no edge or street named '" + spec.from_edge + "' in the current network",
                          nearest_references(net, spec.from_edge)};
    }
    auto to_edges = resolve_edge_ref(net, spec.to_edge);
    if (to_edges.empty()) {
      return ErrorPayload{"unroutable",
                          "no edge or street named '" + spec.to_edge + "' in the current network",
                          nearest_references(net, spec.to_edge)};
    }
    // First routable pair in id order keeps the choice deterministic.
    const NetEdge* chosen_from = nullptr;
    const NetEdge* chosen_to = nullptr;
    for (const NetEdge* f : from_edges) {
      for (const NetEdge* t : to_edges) {
        if (f->id == t->id) continue;
        if (net.route_between(f->id, t->id)) {
          chosen_from = f;
          chosen_to = t;
          break;
        }
      }
      if (chosen_from) break;
    }
    if (!chosen_from) {
      return ErrorPayload{"unroutable",
                          "no route from '" + spec.from_edge + "' to '" + spec.to_edge + "'",
                          nearest_references(net, spec.to_edge)};
    }
    doc.flows.push_back(RouteFlow{"flow0", chosen_from->id, chosen_to->id, spec.begin, spec.end, spec.vph});
    return serialize_routes(doc);
  }

  // Random O-D sampling with explicit shortest-path routes.
  if (net.edges.empty()) {
    return ErrorPayload{"no_connected_pairs", "network has no edges", {}};
  }
  SplitMix64 rng(static_cast<std::uint64_t>(spec.seed));
  const auto edge_count = static_cast<std::uint64_t>(net.edges.size());
  for (long long i = 0; i < spec.flows; ++i) {
    std::optional<std::vector<std::string>> route;
    for (int attempt = 0; attempt < 64 && !route; ++attempt) {
      const NetEdge& from = net.edges[rng.below(edge_count)];
      const NetEdge& to = net.edges[rng.below(edge_count)];
      if (from.id == to.id) continue;
      route = net.route_between(from.id, to.id);
    }
    if (!route) {
      return ErrorPayload{"no_connected_pairs",
                          "could not sample a routable origin-destination pair", {}};
    }
    RouteVehicle v;
    v.id = "veh" + std::to_string(i);
    v.depart = spec.begin + (spec.end - spec.begin) * static_cast<double>(i) /
                                static_cast<double>(spec.flows);
    v.edges = std::move(*route);
    doc.vehicles.push_back(std::move(v));
  }
  return serialize_routes(doc);
}

std::string serialize_routes(const RouteDoc& doc) {
  xml::Element root;
  root.name = "routes";
  {
    xml::Element vtype;
    vtype.name = "vType";
    vtype.attrs = {{"id", "car"}, {"accel", "2.60"}, {"decel", "4.50"}, {"length", "5.00"}};
    root.children.push_back(vtype);
  }
  for (const auto& v : doc.vehicles) {
    xml::Element el;
    el.name = "vehicle";
    el.attrs = {{"id", v.id}, {"type", "car"}, {"depart", fmt2(v.depart)}};
    xml::Element route;
    route.name = "route";
    std::string edges;
    for (std::size_t i = 0; i < v.edges.size(); ++i) {
      if (i) edges += " ";
      edges += v.edges[i];
    }
    route.attrs = {{"edges", edges}};
    el.children.push_back(route);
    root.children.push_back(el);
  }
  for (const auto& f : doc.flows) {
    xml::Element el;
    el.name = "flow";
    el.attrs = {{"id", f.id},
                {"type", "car"},
                {"begin", fmt2(f.begin)},
                {"end", fmt2(f.end)},
                {"vehsPerHour", std::to_string(f.vph)},
                {"from", f.from_edge},
                {"to", f.to_edge}};
    root.children.push_back(el);
  }
  return xml::serialize(root);
}

Result<RouteDoc, std::string> parse_routes(const std::string& xml_text) {
  auto parsed = xml::parse(xml_text);
  if (!parsed) return std::string("routes xml: " + parsed.error().message);
  if (parsed->name != "routes") return std::string("routes root must be <routes>");
  RouteDoc doc;
  for (const auto& el : parsed->children) {
    if (el.name == "vehicle") {
      RouteVehicle v;
      const std::string* id = el.attr("id");
      if (!id) return std::string("vehicle without id");
      v.id = *id;
      if (const std::string* depart = el.attr("depart")) v.depart = parse_double(*depart);
      const xml::Element* route = el.child("route");
      if (!route) return std::string("vehicle '" + v.id + "' has no route");
      const std::string* edges = route->attr("edges");
      if (!edges) return std::string("route without edges attribute");
      std::istringstream split(*edges);
      std::string token;
      while (split >> token) v.edges.push_back(token);
      if (v.edges.empty()) return std::string("vehicle '" + v.id + "' has an empty route");
      doc.vehicles.push_back(std::move(v));
    } else if (el.name == "flow") {
      RouteFlow f;
      const std::string* id = el.attr("id");
      const std::string* from = el.attr("from");
      const std::string* to = el.attr("to");
      if (!id || !from || !to) return std::string("flow missing id/from/to");
      f.id = *id;
      f.from_edge = *from;
      f.to_edge = *to;
      if (const std::string* begin = el.attr("begin")) f.begin = parse_double(*begin);
      if (const std::string* end = el.attr("end")) f.end = parse_double(*end);
      if (const std::string* vph = el.attr("vehsPerHour")) f.vph = std::llround(parse_double(*vph));
      doc.flows.push_back(std::move(f));
    }
  }
  return doc;
}

Result<RouteDoc, std::string> read_routes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::string("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_routes(buf.str());
}

}  // namespace simflow::simbridge

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "simflow/result.hpp"
#include "simflow/xml.hpp"

namespace simflow::simbridge {

struct NetNode {
  std::string id;
  double x = 0;
  double y = 0;

  bool operator==(const NetNode&) const = default;
};

struct NetEdge {
  std::string id;
  std::string from_node;
  std::string to_node;
  double length = 100.0;   // m
  int lanes = 1;
  double vmax = 13.89;     // m/s
  std::string street_name; // spaces, never underscores

  bool operator==(const NetEdge&) const = default;
};

struct TlsPhase {
  double duration = 0;  // s
  std::string state;

  bool operator==(const TlsPhase&) const = default;
};

struct TlsProgram {
  std::string id;
  double cycle = 0;  // s; phase durations sum to this
  std::vector<TlsPhase> phases;

  bool operator==(const TlsProgram&) const = default;
};

struct Network {
  std::vector<NetNode> nodes;
  std::vector<NetEdge> edges;
  std::vector<TlsProgram> tls;
  std::string city_name;
  long long volume = 0;  // total trips requested at build time

  const NetEdge* edge_by_id(std::string_view id) const;
  NetEdge* edge_by_id_mut(std::string_view id);
  std::vector<const NetEdge*> edges_by_street(std::string_view street_name) const;
  TlsProgram* tls_by_id(std::string_view id);

  std::vector<std::string> street_names() const;  // unique, sorted
  std::vector<std::string> edge_ids() const;

  // Every node that has at least one incident edge can reach every other
  // such node and be reached back.
  bool strongly_connected() const;

  // Edge sequence starting at from_edge and ending at to_edge, following
  // shortest node paths by length with deterministic tie-breaks. nullopt
  // when no path exists.
  std::optional<std::vector<std::string>> route_between(std::string_view from_edge,
                                                        std::string_view to_edge) const;

  bool operator==(const Network&) const = default;
};

// Deterministic synthetic grid standing in for geodata extraction. The side
// count is clamp(round(distance_miles * 10), 2, 12); every adjacency carries
// one directed edge per direction, 100 m long. Street names come from a fixed
// list rotated by a hash of the city name; "Main Street" (row 0) and
// "Congress Street" (column 0) are always present so cross-town objectives
// resolve on any build. Interior junctions get a two-phase traffic light.
Network build_grid(const std::string& city_name, double distance_miles, long long volume);

int grid_side_count(double distance_miles);

// Ring of eight segments; used for the generic roundabout request.
Network build_roundabout(double radius, int lanes, long long volume);

std::string serialize_network(const Network& net);
Result<Network, std::string> parse_network(const std::string& xml_text);
Result<Network, std::string> read_network(const std::filesystem::path& path);

}  // namespace simflow::simbridge

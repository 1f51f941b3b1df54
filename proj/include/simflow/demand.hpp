#pragma once

#include <optional>
#include <string>
#include <vector>

#include "simflow/network.hpp"
#include "simflow/result.hpp"
#include "simflow/types.hpp"

namespace simflow::simbridge {

struct DemandSpec {
  enum class Kind { Random, OdFlow };
  Kind kind = Kind::Random;
  long long flows = 0;        // Random: number of vehicles
  std::string from_edge;      // OdFlow: edge id or street name
  std::string to_edge;
  long long vph = 0;          // OdFlow: vehicles per hour
  long long seed = 42;
  double begin = 0;
  double end = 3600;
};

struct RouteVehicle {
  std::string id;
  double depart = 0;
  std::vector<std::string> edges;
};

struct RouteFlow {
  std::string id;
  std::string from_edge;
  std::string to_edge;
  double begin = 0;
  double end = 3600;
  long long vph = 0;
};

struct RouteDoc {
  std::vector<RouteVehicle> vehicles;
  std::vector<RouteFlow> flows;
};

// Resolves an agent-provided reference against the edge table: an exact edge
// id wins; otherwise underscores are normalized to spaces and the string is
// matched as a street name (case-insensitive). Returns the matching edges
// sorted by id, or empty when nothing matches.
std::vector<const NetEdge*> resolve_edge_ref(const Network& net, const std::string& reference);

// Ranked repair suggestions (streets and edge ids) for a failed reference.
std::vector<std::string> nearest_references(const Network& net, const std::string& reference);

// Builds the .rou.xml content. Random demand samples seeded O-D pairs over
// edges and writes explicit shortest-path routes; OD demand writes one flow
// element after proving the pair routable.
Result<std::string, ErrorPayload> generate_demand(const Network& net, const DemandSpec& spec);

std::string serialize_routes(const RouteDoc& doc);
Result<RouteDoc, std::string> parse_routes(const std::string& xml_text);
Result<RouteDoc, std::string> read_routes(const std::filesystem::path& path);

}  // namespace simflow::simbridge

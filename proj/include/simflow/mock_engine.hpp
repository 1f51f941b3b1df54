#pragma once

#include <string>
#include <vector>

#include "simflow/demand.hpp"
#include "simflow/network.hpp"
#include "simflow/result.hpp"
#include "simflow/types.hpp"

namespace simflow::simbridge {

// Deterministic queueing-style vehicle model:
//   free-flow edge time  = length / vmax
//   congestion delay     = alpha * max(0, load - capacity) / capacity * free-flow time
//   load                 = vehicles entering the edge in the same 60 s window
//                          (windows taken over the free-flow schedule)
//   capacity             = lanes * beta vehicles per window
//   waiting time         = sum of congestion delays
//   co2                  = gamma * duration
// The constants are emitted in the tripinfo header so any output file names
// the model that produced it.
struct EngineConstants {
  double alpha = 1.0;
  double beta = 30.0;         // vehicles per window per lane
  double gamma_mg_per_s = 2500.0;
  double window_s = 60.0;
};

struct SimResult {
  std::string tripinfo_xml;
  std::string summary_xml;
  int departures = 0;   // vehicles inserted before the time limit
  int arrivals = 0;     // vehicles that completed within the time limit
  bool zero_vehicles = false;
};

// Runs the model over explicit vehicles plus expanded flows, up to end_time
// seconds. Vehicles that have not arrived by end_time produce no tripinfo
// record.
Result<SimResult, ErrorPayload> run_mock(const Network& net, const RouteDoc& routes,
                                         double end_time,
                                         const EngineConstants& constants = EngineConstants{});

}  // namespace simflow::simbridge

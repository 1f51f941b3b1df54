#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "simflow/demand.hpp"
#include "simflow/mock_engine.hpp"
#include "simflow/network.hpp"
#include "simflow/toolbox.hpp"
#include "testutil.hpp"

using namespace simflow;
using namespace simflow::simbridge;

// ---------------------------------------------------------------------------
// grid builder
// ---------------------------------------------------------------------------

TEST_CASE("grid side count follows the clamp rule") {
  CHECK(grid_side_count(0.5) == 5);
  CHECK(grid_side_count(0.05) == 2);   // clamp low
  CHECK(grid_side_count(0.2) == 2);
  CHECK(grid_side_count(3.0) == 12);   // clamp high
  CHECK(grid_side_count(0.31) == 3);
}

TEST_CASE("grid shape: n=5 has 40 directed edge pairs") {
  Network net = build_grid("Troy", 0.5, 1000);
  CHECK(net.nodes.size() == 25);
  CHECK(net.edges.size() == 80);  // 2 * (2 * n * (n-1)) directed edges
  // Count undirected adjacency pairs.
  std::set<std::string> pairs;
  for (const auto& e : net.edges) {
    pairs.insert(e.from_node < e.to_node ? e.from_node + "|" + e.to_node
                                         : e.to_node + "|" + e.from_node);
  }
  CHECK(pairs.size() == 40);  // 2 * n * (n-1) with n=5
  CHECK(net.volume == 1000);
  CHECK(net.city_name == "Troy");
}

TEST_CASE("every grid carries the marquee streets and is strongly connected") {
  for (const char* city : {"Troy", "Albany", "Utica", "Nowhere Special"}) {
    for (double miles : {0.2, 0.5, 0.9}) {
      Network net = build_grid(city, miles, 100);
      CHECK(!net.edges_by_street("Main Street").empty());
      CHECK(!net.edges_by_street("Congress Street").empty());
      CHECK(net.strongly_connected());
      for (const auto& e : net.edges) {
        CHECK(e.street_name.find('_') == std::string::npos);
        CHECK(e.length > 0);
        CHECK(e.vmax > 0);
      }
    }
  }
}

TEST_CASE("grid build is deterministic, street naming varies by city") {
  CHECK(serialize_network(build_grid("Troy", 0.5, 1000)) ==
        serialize_network(build_grid("Troy", 0.5, 1000)));
  Network a = build_grid("Troy", 0.5, 1000);
  Network b = build_grid("Albany", 0.5, 1000);
  auto streets = [](const Network& n) { return n.street_names(); };
  CHECK(streets(a) != streets(b));  // hash-rotated assignment
}

TEST_CASE("interior junctions get two-phase traffic lights") {
  Network net = build_grid("Troy", 0.5, 1000);  // n=5 -> 9 interior nodes
  CHECK(net.tls.size() == 9);
  for (const auto& t : net.tls) {
    double sum = 0;
    for (const auto& p : t.phases) sum += p.duration;
    CHECK(sum == doctest::Approx(t.cycle));
  }
  Network tiny = build_grid("Troy", 0.2, 10);  // n=2 -> no interior nodes
  CHECK(tiny.tls.empty());
}

TEST_CASE("network xml round trip") {
  Network net = build_grid("Troy", 0.31, 500);
  auto parsed = parse_network(serialize_network(net));
  REQUIRE(parsed.ok());
  CHECK(*parsed == net);

  Network ring = build_roundabout(30.0, 2, 200);
  CHECK(ring.strongly_connected());
  auto parsed_ring = parse_network(serialize_network(ring));
  REQUIRE(parsed_ring.ok());
  CHECK(parsed_ring->edges[0].lanes == 2);
}

TEST_CASE("route_between produces connected shortest routes") {
  Network net = build_grid("Troy", 0.5, 1000);
  const std::string from = "e_n0_0_n0_1";
  const std::string to = "e_n4_3_n4_4";
  auto route = net.route_between(from, to);
  REQUIRE(route.has_value());
  CHECK(route->front() == from);
  CHECK(route->back() == to);
  // Consecutive edges connect head to tail.
  for (std::size_t i = 0; i + 1 < route->size(); ++i) {
    const NetEdge* cur = net.edge_by_id((*route)[i]);
    const NetEdge* next = net.edge_by_id((*route)[i + 1]);
    CHECK(cur->to_node == next->from_node);
  }
  // Shortest in hops on the uniform grid: |route| = manhattan distance + 1.
  CHECK(route->size() == 8);
  CHECK(net.route_between(from, from)->size() == 1);
  CHECK(!net.route_between("e_missing", to).has_value());
}

// ---------------------------------------------------------------------------
// demand
// ---------------------------------------------------------------------------

TEST_CASE("od flow demand writes one flow element") {
  Network net = build_grid("Troy", 0.5, 1000);
  DemandSpec spec;
  spec.kind = DemandSpec::Kind::OdFlow;
  spec.from_edge = "Main Street";
  spec.to_edge = "Congress Street";
  spec.vph = 800;
  auto xml_text = generate_demand(net, spec);
  REQUIRE(xml_text.ok());
  auto doc = parse_routes(*xml_text);
  REQUIRE(doc.ok());
  REQUIRE(doc->flows.size() == 1);
  CHECK(doc->flows[0].vph == 800);
  CHECK(net.edge_by_id(doc->flows[0].from_edge) != nullptr);
  CHECK(net.edge_by_id(doc->flows[0].to_edge) != nullptr);
}

TEST_CASE("underscored street names resolve after normalization") {
  Network net = build_grid("Troy", 0.5, 1000);
  DemandSpec spec;
  spec.kind = DemandSpec::Kind::OdFlow;
  spec.from_edge = "Main_Street";
  spec.to_edge = "Congress_Street";
  spec.vph = 100;
  CHECK(generate_demand(net, spec).ok());
}

TEST_CASE("random demand is deterministic per seed") {
  Network net = build_grid("Troy", 0.5, 1000);
  DemandSpec spec;
  spec.kind = DemandSpec::Kind::Random;
  spec.flows = 200;
  spec.seed = 42;
  auto a = generate_demand(net, spec);
  auto b = generate_demand(net, spec);
  REQUIRE(a.ok());
  REQUIRE(b.ok());
  CHECK(*a == *b);  // byte identical
  spec.seed = 43;
  auto c = generate_demand(net, spec);
  REQUIRE(c.ok());
  CHECK(*a != *c);

  auto doc = parse_routes(*a);
  REQUIRE(doc.ok());
  CHECK(doc->vehicles.size() == 200);
  for (const auto& v : doc->vehicles) {
    for (std::size_t i = 0; i + 1 < v.edges.size(); ++i) {
      CHECK(net.edge_by_id(v.edges[i])->to_node == net.edge_by_id(v.edges[i + 1])->from_node);
    }
  }
}

TEST_CASE("unresolvable references yield unroutable with candidates") {
  Network net = build_grid("Troy", 0.5, 1000);
  DemandSpec spec;
  spec.kind = DemandSpec::Kind::OdFlow;
  spec.from_edge = "Main Street";
  spec.to_edge = "Nowhere Road";
  spec.vph = 800;
  auto result = generate_demand(net, spec);
  REQUIRE(!result.ok());
  CHECK(result.error().code == "unroutable");
  CHECK(result.error().candidates.size() <= 3);
  CHECK(!result.error().candidates.empty());

  // A close misspelling ranks the real street first.
  spec.to_edge = "Congress Stret";
  auto typo = generate_demand(net, spec);
  REQUIRE(!typo.ok());
  REQUIRE(!typo.error().candidates.empty());
  CHECK(typo.error().candidates[0] == "Congress Street");
}

TEST_CASE("single-edge network has no connected pairs") {
  Network net;
  net.nodes = {{"a", 0, 0}, {"b", 100, 0}};
  net.edges = {{"e_a_b", "a", "b", 100, 1, 10, "Only Street"}};
  DemandSpec spec;
  spec.kind = DemandSpec::Kind::Random;
  spec.flows = 5;
  auto result = generate_demand(net, spec);
  REQUIRE(!result.ok());
  CHECK(result.error().code == "no_connected_pairs");
}

// ---------------------------------------------------------------------------
// mock engine
// ---------------------------------------------------------------------------

TEST_CASE("hand case: one vehicle over two 100 m edges at 10 m/s") {
  Network net;
  net.nodes = {{"a", 0, 0}, {"b", 100, 0}, {"c", 200, 0}};
  net.edges = {{"e1", "a", "b", 100, 1, 10, "S"}, {"e2", "b", "c", 100, 1, 10, "S"}};
  RouteDoc routes;
  routes.vehicles = {{"v0", 0.0, {"e1", "e2"}}};
  auto sim = run_mock(net, routes, 3600);
  REQUIRE(sim.ok());
  CHECK(sim->departures == 1);
  CHECK(sim->arrivals == 1);

  testutil::TempDir dir("engine_hand");
  testutil::write_file(dir.path() / "tripinfo.xml", sim->tripinfo_xml);
  auto records = kpi::parse_tripinfo(dir.path() / "tripinfo.xml");
  REQUIRE(records.ok());
  REQUIRE(records->size() == 1);
  CHECK((*records)[0].duration == doctest::Approx(20.0));  // 2 * 100/10, no congestion
  CHECK((*records)[0].waiting_time == doctest::Approx(0.0));
  CHECK((*records)[0].route_length == doctest::Approx(200.0));
  CHECK((*records)[0].co2_mg == doctest::Approx(2500.0 * 20.0));
}

namespace {

// Independent re-implementation of the congestion model for the oracle:
// entries are bucketed on the free-flow schedule; each vehicle pays
// alpha * max(0, load-cap)/cap * fftime per edge.
std::map<std::string, double> oracle_durations(const Network& net,
                                               const std::vector<RouteVehicle>& vehicles) {
  EngineConstants k;
  std::map<std::pair<std::string, long long>, long long> counts;
  for (const auto& v : vehicles) {
    double t = v.depart;
    for (const auto& id : v.edges) {
      const NetEdge* e = net.edge_by_id(id);
      ++counts[{id, static_cast<long long>(std::floor(t / k.window_s))}];
      t += e->length / e->vmax;
    }
  }
  std::map<std::string, double> durations;
  for (const auto& v : vehicles) {
    double t = v.depart, delay = 0;
    for (const auto& id : v.edges) {
      const NetEdge* e = net.edge_by_id(id);
      double fftime = e->length / e->vmax;
      double cap = e->lanes * k.beta;
      auto load = static_cast<double>(counts[{id, static_cast<long long>(std::floor(t / k.window_s))}]);
      if (load > cap) delay += k.alpha * (load - cap) / cap * fftime;
      t += fftime;
    }
    durations[v.id] = (t + delay) - v.depart;
  }
  return durations;
}

}  // namespace

TEST_CASE("congested batch matches the independent oracle") {
  Network net;
  net.nodes = {{"a", 0, 0}, {"b", 100, 0}, {"c", 200, 0}};
  net.edges = {{"e1", "a", "b", 100, 1, 10, "S"}, {"e2", "b", "c", 100, 1, 10, "S"}};
  // 45 vehicles entering e1 within one window: load 45 > cap 30.
  RouteDoc routes;
  for (int i = 0; i < 45; ++i) {
    routes.vehicles.push_back({"v" + std::to_string(i), i * 1.0, {"e1", "e2"}});
  }
  auto sim = run_mock(net, routes, 36000);
  REQUIRE(sim.ok());
  CHECK(sim->arrivals == 45);

  testutil::TempDir dir("engine_oracle");
  testutil::write_file(dir.path() / "tripinfo.xml", sim->tripinfo_xml);
  auto records = kpi::parse_tripinfo(dir.path() / "tripinfo.xml");
  REQUIRE(records.ok());
  auto expected = oracle_durations(net, routes.vehicles);
  for (const auto& r : *records) {
    CHECK(r.duration == doctest::Approx(expected.at(r.vehicle_id)).epsilon(1e-6));
    CHECK(r.waiting_time > 0);  // the batch exceeds capacity
  }
}

TEST_CASE("zero-vehicle run warns instead of failing") {
  Network net = build_grid("Troy", 0.3, 100);
  RouteDoc routes;  // nothing scheduled
  auto sim = run_mock(net, routes, 3600);
  REQUIRE(sim.ok());
  CHECK(sim->zero_vehicles);
  CHECK(sim->departures == 0);
  testutil::TempDir dir("engine_zero");
  testutil::write_file(dir.path() / "tripinfo.xml", sim->tripinfo_xml);
  auto records = kpi::parse_tripinfo(dir.path() / "tripinfo.xml");
  REQUIRE(records.ok());
  CHECK(records->empty());
}

TEST_CASE("summary output round-trips through the reader") {
  Network net = build_grid("Troy", 0.4, 200);
  DemandSpec spec;
  spec.kind = DemandSpec::Kind::Random;
  spec.flows = 60;
  spec.end = 600;
  auto routes = parse_routes(*generate_demand(net, spec));
  REQUIRE(routes.ok());
  auto sim = run_mock(net, *routes, 3600);
  REQUIRE(sim.ok());
  testutil::TempDir dir("engine_summary");
  testutil::write_file(dir.path() / "summary.xml", sim->summary_xml);
  auto steps = kpi::parse_summary(dir.path() / "summary.xml");
  REQUIRE(steps.ok());
  REQUIRE(!steps->empty());
  long long inserted = 0, arrived = 0;
  for (const auto& s : *steps) {
    inserted += s.inserted;
    arrived += s.arrived;
    CHECK(s.running >= 0);
  }
  CHECK(inserted == sim->departures);
  CHECK(arrived == sim->arrivals);

  testutil::write_file(dir.path() / "bad.xml", "<summary><step time=\"x\"/></summary>");
  CHECK(!kpi::parse_summary(dir.path() / "bad.xml").ok());
}

TEST_CASE("identical inputs produce byte-identical outputs") {
  Network net = build_grid("Troy", 0.5, 1000);
  DemandSpec spec;
  spec.kind = DemandSpec::Kind::Random;
  spec.flows = 300;
  auto xml_text = generate_demand(net, spec);
  REQUIRE(xml_text.ok());
  auto routes = parse_routes(*xml_text);
  REQUIRE(routes.ok());
  auto a = run_mock(net, *routes, 3600);
  auto b = run_mock(net, *routes, 3600);
  REQUIRE(a.ok());
  REQUIRE(b.ok());
  CHECK(a->tripinfo_xml == b->tripinfo_xml);
  CHECK(a->summary_xml == b->summary_xml);
}

TEST_CASE("conservation: arrivals never exceed departures; equal with budget") {
  Network net = build_grid("Troy", 0.4, 400);
  DemandSpec spec;
  spec.kind = DemandSpec::Kind::Random;
  spec.flows = 150;
  spec.end = 600;
  auto routes = parse_routes(*generate_demand(net, spec));
  REQUIRE(routes.ok());

  auto tight = run_mock(net, *routes, 610);  // some vehicles still en route
  REQUIRE(tight.ok());
  CHECK(tight->arrivals <= tight->departures);

  auto ample = run_mock(net, *routes, 100000);
  REQUIRE(ample.ok());
  CHECK(ample->arrivals == ample->departures);
  CHECK(ample->departures == 150);
}

TEST_CASE("mean travel time is weakly monotone in vph") {
  Network net = build_grid("Troy", 0.5, 1000);
  double previous = 0;
  for (long long vph : {120, 600, 1200, 2400, 4800}) {
    DemandSpec spec;
    spec.kind = DemandSpec::Kind::OdFlow;
    spec.from_edge = "Main Street";
    spec.to_edge = "Congress Street";
    spec.vph = vph;
    auto routes = parse_routes(*generate_demand(net, spec));
    REQUIRE(routes.ok());
    auto sim = run_mock(net, *routes, 100000);
    REQUIRE(sim.ok());
    testutil::TempDir dir("engine_mono_" + std::to_string(vph));
    testutil::write_file(dir.path() / "tripinfo.xml", sim->tripinfo_xml);
    auto records = kpi::parse_tripinfo(dir.path() / "tripinfo.xml");
    REQUIRE(records.ok());
    auto report = kpi::aggregate(*records, kpi::Metric::TravelTime);
    REQUIRE(report.mean_travel_time.has_value());
    CHECK(*report.mean_travel_time >= previous - 1e-9);
    previous = *report.mean_travel_time;
  }
}

TEST_CASE("routes referencing unknown edges are a physical error") {
  Network net = build_grid("Troy", 0.3, 100);
  RouteDoc routes;
  routes.vehicles = {{"v0", 0.0, {"e_ghost"}}};
  auto sim = run_mock(net, routes, 3600);
  REQUIRE(!sim.ok());
  CHECK(sim.error().code == "unknown_edge_in_route");
}

// ---------------------------------------------------------------------------
// modify ops (through the toolbox where artifact state matters)
// ---------------------------------------------------------------------------

namespace {

struct Bridge {
  testutil::TempDir dir;
  VirtualClock clock;
  store::ArtifactStore store;
  Toolbox toolbox;

  explicit Bridge(const std::string& name)
      : dir(name),
        clock(),
        store(open_store(dir, clock)),
        toolbox(&store, EngineMode::Mock, &clock) {}

  static store::ArtifactStore open_store(testutil::TempDir& dir, VirtualClock& clock) {
    auto opened = store::ArtifactStore::open(dir.path(), &clock);
    REQUIRE(opened.ok());
    return *opened;
  }

  ToolOutcome act(Action action, nlohmann::json params, int step_id) {
    contract::ActionEnvelope env;
    env.action = action;
    env.params = std::move(params);
    auto role = role_for_action(action);
    auto va = contract::validate_action(env, *role);
    REQUIRE(va.ok());
    if (!va->params.contains("seed")) va->params["seed"] = 42;
    return toolbox.dispatch(*va, step_id);
  }

  ToolOutcome build(const std::string& city = "Troy", double miles = 0.5) {
    return act(Action::BuildNet,
               {{"type", "build_from_realworld"}, {"city_name", city},
                {"distance_miles", miles}, {"volume", 400}},
               1);
  }

  Network latest_network() {
    auto artifact = store.latest(store::Kind::Network);
    REQUIRE(artifact.has_value());
    auto net = read_network(dir.path() / artifact->path);
    REQUIRE(net.ok());
    return *net;
  }
};

}  // namespace

TEST_CASE("build then modify supersedes the network artifact") {
  Bridge b("modify_supersede");
  auto built = b.build();
  REQUIRE(built.ok);
  auto first = b.store.latest(store::Kind::Network);

  auto removed = b.act(Action::Modify, {{"op", "remove_edge"}, {"edge_id", "e_n0_0_n0_1"}}, 2);
  REQUIRE(removed.ok);
  auto second = b.store.latest(store::Kind::Network);
  CHECK(second->artifact_id != first->artifact_id);
  CHECK(second->parents == std::vector<std::string>{first->artifact_id});
  CHECK(second->producer_role == "modifier");

  Network net = b.latest_network();
  CHECK(net.edge_by_id("e_n0_0_n0_1") == nullptr);
  CHECK(net.strongly_connected());
}

TEST_CASE("remove by street name works only when unambiguous") {
  Bridge b("remove_by_name");
  REQUIRE(b.build("Troy", 0.2).ok);  // n=2: every street is a single pair
  auto removed = b.act(Action::Modify, {{"op", "remove_edge"}, {"edge_id", "Main Street"}}, 2);
  REQUIRE(removed.ok);
  Network net = b.latest_network();
  CHECK(net.edges_by_street("Main Street").empty());  // both directions gone

  Bridge big("remove_by_name_big");
  REQUIRE(big.build("Troy", 0.5).ok);  // n=5: four segments per street
  auto ambiguous = big.act(Action::Modify, {{"op", "remove_edge"}, {"edge_id", "Main Street"}}, 2);
  REQUIRE(!ambiguous.ok);
  CHECK(ambiguous.error->code == "ambiguous_street_name");
  CHECK(!ambiguous.error->candidates.empty());
}

TEST_CASE("unknown edge carries candidates") {
  Bridge b("unknown_edge");
  REQUIRE(b.build().ok);
  auto result = b.act(Action::Modify, {{"op", "remove_edge"}, {"edge_id", "Maim Street"}}, 2);
  REQUIRE(!result.ok);
  CHECK(result.error->code == "unknown_edge");
  REQUIRE(!result.error->candidates.empty());
  CHECK(result.error->candidates[0] == "Main Street");
}

TEST_CASE("edge_set_speed writes through to the serialized network") {
  Bridge b("set_speed");
  REQUIRE(b.build().ok);
  auto result = b.act(Action::Modify,
                      {{"op", "edge_set_speed"}, {"edge_id", "e_n0_0_n0_1"}, {"vmax", 5.0}}, 2);
  REQUIRE(result.ok);
  Network net = b.latest_network();
  CHECK(net.edge_by_id("e_n0_0_n0_1")->vmax == doctest::Approx(5.0));
  std::string xml_text = testutil::read_file(b.dir.path() / b.store.latest(store::Kind::Network)->path);
  CHECK(xml_text.find("speed=\"5.00\"") != std::string::npos);
}

TEST_CASE("tls_optimize_and_apply splits the cycle evenly") {
  Bridge b("tls_opt");
  REQUIRE(b.build().ok);
  Network before = b.latest_network();
  REQUIRE(!before.tls.empty());
  const std::string tls_id = before.tls[0].id;
  // Give the program four phases first so the split is visible.
  std::string program = "<tlLogic id=\"" + tls_id + "\">"
                        "<phase duration=\"10\" state=\"GGrr\"/><phase duration=\"20\" state=\"yyrr\"/>"
                        "<phase duration=\"15\" state=\"rrGG\"/><phase duration=\"15\" state=\"rryy\"/>"
                        "</tlLogic>";
  REQUIRE(b.act(Action::Modify, {{"op", "tls_set_program"}, {"tls_id", tls_id}, {"program_xml", program}}, 2).ok);
  REQUIRE(b.act(Action::Modify, {{"op", "tls_optimize_and_apply"}, {"tls_id", tls_id}, {"cycle", 60.0}}, 3).ok);
  Network net = b.latest_network();
  TlsProgram* tls = net.tls_by_id(tls_id);
  REQUIRE(tls != nullptr);
  REQUIRE(tls->phases.size() == 4);
  double sum = 0;
  for (const auto& p : tls->phases) {
    CHECK(p.duration == doctest::Approx(15.0));
    sum += p.duration;
  }
  CHECK(sum == doctest::Approx(60.0));

  auto missing = b.act(Action::Modify, {{"op", "tls_optimize_and_apply"}, {"tls_id", "tls_ghost"}, {"cycle", 30.0}}, 4);
  REQUIRE(!missing.ok);
  CHECK(missing.error->code == "unknown_tls");
}

TEST_CASE("disconnecting removals are rejected") {
  Bridge b("disconnect");
  REQUIRE(b.build("Troy", 0.2).ok);  // n=2 square: corners have two pairs each
  REQUIRE(b.act(Action::Modify, {{"op", "remove_edge"}, {"edge_id", "Main Street"}}, 2).ok);
  // Main Street was n0_0<->n0_1; removing Congress Street (n0_0<->n1_0) would
  // strand node n0_0 entirely.
  auto strand = b.act(Action::Modify, {{"op", "remove_edge"}, {"edge_id", "Congress Street"}}, 3);
  REQUIRE(!strand.ok);
  CHECK(strand.error->code == "disconnected_network");
  // The failed modification must not have superseded the artifact.
  Network net = b.latest_network();
  CHECK(!net.edges_by_street("Congress Street").empty());
}

// ---------------------------------------------------------------------------
// config + full tool pipeline
// ---------------------------------------------------------------------------

TEST_CASE("runner writes a config linking both parents then simulates") {
  Bridge b("run_pipeline");
  REQUIRE(b.build().ok);
  REQUIRE(b.act(Action::GenDemand, {{"type", "build_routes_random"}, {"flows", 50}}, 2).ok);
  auto run = b.act(Action::Run, {{"steps", 3600}}, 3);
  REQUIRE(run.ok);
  REQUIRE(run.artifacts.size() == 3);  // config, tripinfo, summary

  auto config_artifact = b.store.latest(store::Kind::Config);
  REQUIRE(config_artifact.has_value());
  auto cfg = read_config(b.dir.path() / config_artifact->path);
  REQUIRE(cfg.ok());
  CHECK(cfg->net_path == b.store.latest(store::Kind::Network)->path);
  CHECK(cfg->routes_path == b.store.latest(store::Kind::Routes)->path);
  CHECK(cfg->steps == 3600);
  CHECK(cfg->seed == 42);

  std::string raw = testutil::read_file(b.dir.path() / config_artifact->path);
  CHECK(raw.find("<end value=\"3600\"/>") != std::string::npos);

  // Both output files are valid XML and registered.
  CHECK(b.store.latest(store::Kind::Tripinfo).has_value());
  CHECK(b.store.latest(store::Kind::Summary).has_value());
  auto lineage = b.store.lineage(b.store.latest(store::Kind::Tripinfo)->artifact_id);
  REQUIRE(lineage.ok());
  CHECK(lineage->size() == 4);  // network, routes, config, tripinfo
}

TEST_CASE("gui flag is recorded in the config and ignored by the mock engine") {
  Bridge b("gui_flag");
  REQUIRE(b.build().ok);
  REQUIRE(b.act(Action::GenDemand, {{"type", "build_routes_random"}, {"flows", 5}}, 2).ok);
  REQUIRE(b.act(Action::Run, {{"steps", 600}, {"gui", true}}, 3).ok);
  auto cfg = read_config(b.dir.path() / b.store.latest(store::Kind::Config)->path);
  REQUIRE(cfg.ok());
  CHECK(cfg->gui == true);
}

TEST_CASE("dispatch with unmet dependencies refuses and counts the violation") {
  Bridge b("gate_violation");
  const auto before = Toolbox::dependency_violation_count();
  contract::ActionEnvelope env;
  env.action = Action::GenDemand;
  env.params = {{"type", "build_routes_random"}, {"flows", 5}};
  auto va = contract::validate_action(env, Role::Demand);
  REQUIRE(va.ok());
  auto result = b.toolbox.dispatch(*va, 1);  // no network registered
  REQUIRE(!result.ok);
  CHECK(result.error->code == "dependency_missing");
  CHECK(Toolbox::dependency_violation_count() == before + 1);
}

TEST_CASE("external build hook produces the network artifact") {
  testutil::TempDir dir("external_build");
  VirtualClock clock;
  auto opened = store::ArtifactStore::open(dir.path(), &clock);
  REQUIRE(opened.ok());
  ExternalHooks hooks;
  hooks.build_command =
      "printf '<net version=\"1.9\"><meta city=\"{city}\" volume=\"{volume}\"/>"
      "<node id=\"a\" x=\"0\" y=\"0\"/><node id=\"b\" x=\"100\" y=\"0\"/>"
      "<edge id=\"e1\" from=\"a\" to=\"b\" name=\"Main Street\">"
      "<lane id=\"e1_0\" index=\"0\" speed=\"13.89\" length=\"100\"/></edge>"
      "<edge id=\"e2\" from=\"b\" to=\"a\" name=\"Main Street\">"
      "<lane id=\"e2_0\" index=\"0\" speed=\"13.89\" length=\"100\"/></edge></net>' > {out}";
  Toolbox toolbox(&*opened, EngineMode::External, &clock, hooks);
  contract::ActionEnvelope env;
  env.action = Action::BuildNet;
  env.params = {{"type", "build_from_realworld"}, {"city_name", "Troy"},
                {"distance_miles", 0.5}, {"volume", 10}};
  auto va = contract::validate_action(env, Role::Builder);
  REQUIRE(va.ok());
  auto result = toolbox.dispatch(*va, 1);
  REQUIRE(result.ok);
  auto net = read_network(dir.path() / opened->latest(store::Kind::Network)->path);
  REQUIRE(net.ok());
  CHECK(net->city_name == "Troy");
  CHECK(net->edges.size() == 2);

  ExternalHooks failing;
  failing.build_command = "false";
  Toolbox broken(&*opened, EngineMode::External, &clock, failing);
  auto failed = broken.dispatch(*va, 2);
  REQUIRE(!failed.ok);
  CHECK(failed.error->code == "external_tool_failed");
}

TEST_CASE("external engine hook runs a process and collects its outputs") {
  Bridge ext("external_ok");
  REQUIRE(ext.build().ok);
  REQUIRE(ext.act(Action::GenDemand, {{"type", "build_routes_random"}, {"flows", 3}}, 2).ok);

  ExternalHooks hooks;
  hooks.run_command =
      "printf '<tripinfos><tripinfo id=\"x\" depart=\"0\" arrival=\"1\" duration=\"1\" "
      "routeLength=\"10\" waitingTime=\"0\"/></tripinfos>' > {tripinfo} && "
      "printf '<summary><step time=\"0\" inserted=\"1\" arrived=\"1\" running=\"0\"/></summary>' > {summary}";
  Toolbox external(&ext.store, EngineMode::External, &ext.clock, hooks);
  contract::ActionEnvelope env;
  env.action = Action::Run;
  env.params = {{"steps", 100}};
  auto va = contract::validate_action(env, Role::Runner);
  REQUIRE(va.ok());
  auto result = external.dispatch(*va, 3);
  REQUIRE(result.ok);
  CHECK(ext.store.latest(store::Kind::Tripinfo).has_value());

  ExternalHooks failing;
  failing.run_command = "false";
  Toolbox broken(&ext.store, EngineMode::External, &ext.clock, failing);
  auto failed = broken.dispatch(*va, 4);
  REQUIRE(!failed.ok);
  CHECK(failed.error->code == "process_failed");
}

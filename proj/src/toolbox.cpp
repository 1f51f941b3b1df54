#include "simflow/toolbox.hpp"

#include <atomic>
#include <charconv>
#include <cstdlib>
#include <fstream>

#include "simflow/demand.hpp"
#include "simflow/mock_engine.hpp"
#include "simflow/similarity.hpp"

namespace simflow::simbridge {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::atomic<std::uint64_t> g_dependency_violations{0};

bool write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << content;
  return out.good();
}

std::string substitute(std::string tmpl, const std::vector<std::pair<std::string, std::string>>& vars) {
  for (const auto& [key, value] : vars) {
    const std::string token = "{" + key + "}";
    std::size_t pos;
    while ((pos = tmpl.find(token)) != std::string::npos) tmpl.replace(pos, token.size(), value);
  }
  return tmpl;
}

ErrorPayload store_error(const store::Error& e) {
  return ErrorPayload{"store_" + std::string(store::to_string(e.code)), e.detail, {}};
}

double parse_double_str(const std::string& s, double fallback) {
  double out = fallback;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  (void)ptr;
  return ec == std::errc() ? out : fallback;
}

}  // namespace

Toolbox::Toolbox(store::ArtifactStore* store, EngineMode mode, Clock* clock, ExternalHooks hooks)
    : store_(store), mode_(mode), clock_(clock), hooks_(std::move(hooks)) {}

std::uint64_t Toolbox::dependency_violation_count() { return g_dependency_violations.load(); }

Result<Network, ErrorPayload> Toolbox::load_latest_network() const {
  auto latest = store_->latest(store::Kind::Network);
  if (!latest) return ErrorPayload{"dependency_missing", "no network artifact registered", {}};
  auto net = read_network(store_->run_dir() / latest->path);
  if (!net) return ErrorPayload{"malformed_network", net.error(), {}};
  return *net;
}

ToolOutcome Toolbox::dispatch(const contract::ValidatedAction& action, int step_id) {
  auto deps = store_->check_dependencies(action.action);
  if (!deps.satisfied) {
    // Reaching a tool with unmet prerequisites means the caller's gate failed.
    g_dependency_violations.fetch_add(1);
    std::string missing;
    for (store::Kind k : deps.missing) {
      if (!missing.empty()) missing += ", ";
      missing += to_token(k);
    }
    return ToolOutcome::failure(
        ErrorPayload{"dependency_missing", "missing prerequisite artifacts: " + missing, {}});
  }
  if (clock_) clock_->advance_us(10000);  // nominal tool cost
  switch (action.action) {
    case Action::BuildNet: return build_net(action.params, step_id);
    case Action::Modify: return modify(action.params, step_id);
    case Action::GenDemand: return gen_demand(action.params, step_id);
    case Action::Run: return run(action.params, step_id);
    case Action::Analyze: return analyze(action.params, step_id);
    case Action::Stop: return ToolOutcome::success();
  }
  return ToolOutcome::failure(ErrorPayload{"internal", "unhandled action", {}});
}

ToolOutcome Toolbox::build_net(const json& params, int step_id) {
  const std::string type = params.value("type", "build_from_realworld");
  std::string rel = store_->allocate_path(store::Kind::Network);
  fs::path out_path = store_->run_dir() / rel;

  if (mode_ == EngineMode::External && !hooks_.build_command.empty()) {
    std::string cmd = substitute(hooks_.build_command,
                                 {{"out", out_path.string()},
                                  {"city", params.value("city_name", "")},
                                  {"distance_miles", std::to_string(params.value("distance_miles", 0.0))},
                                  {"volume", std::to_string(params.value("volume", 0LL))}});
    if (std::system(cmd.c_str()) != 0) {
      return ToolOutcome::failure(ErrorPayload{"external_tool_failed", "build command failed: " + cmd, {}});
    }
  } else {
    Network net;
    if (type == "roundabout") {
      net = build_roundabout(params.value("radius", 30.0), static_cast<int>(params.value("lanes", 1LL)),
                             params.value("volume", 0LL));
    } else {
      net = build_grid(params.value("city_name", "Unnamed"), params.value("distance_miles", 0.5),
                       params.value("volume", 0LL));
    }
    if (!write_file(out_path, serialize_network(net))) {
      return ToolOutcome::failure(ErrorPayload{"write_failed", "cannot write " + rel, {}});
    }
  }

  auto artifact = store_->put(store::Kind::Network, rel, "builder", step_id, {});
  if (!artifact) return ToolOutcome::failure(store_error(artifact.error()));
  ToolOutcome out = ToolOutcome::success();
  out.artifacts.push_back(*artifact);
  return out;
}

ToolOutcome Toolbox::modify(const json& params, int step_id) {
  auto net = load_latest_network();
  if (!net) return ToolOutcome::failure(net.error());
  Network& network = *net;
  const std::string op = params.value("op", "");

  if (op == "remove_edge" || op == "edge_set_speed") {
    const std::string ref = params.value("edge_id", "");
    auto matches = resolve_edge_ref(network, ref);
    if (matches.empty()) {
      return ToolOutcome::failure(ErrorPayload{
          "unknown_edge", "no edge or street named '" + ref + "'", nearest_references(network, ref)});
    }
    std::vector<std::string> target_ids;
    if (matches.size() == 1) {
      target_ids.push_back(matches[0]->id);
    } else {
      // A street name must denote exactly one segment pair (the two
      // directions between one node pair) to be an unambiguous target.
      auto key = [](const NetEdge* e) {
        return e->from_node < e->to_node ? e->from_node + "|" + e->to_node
                                         : e->to_node + "|" + e->from_node;
      };
      for (const NetEdge* e : matches) {
        if (key(e) != key(matches[0])) {
          std::vector<std::string> ids;
          for (const NetEdge* m : matches) ids.push_back(m->id);
          return ToolOutcome::failure(ErrorPayload{
              "ambiguous_street_name",
              "'" + ref + "' matches " + std::to_string(matches.size()) + " segments",
              similarity::rank_candidates(ref, ids, 3)});
        }
      }
      for (const NetEdge* e : matches) target_ids.push_back(e->id);
    }

    if (op == "remove_edge") {
      Network modified = network;
      std::erase_if(modified.edges, [&](const NetEdge& e) {
        return std::find(target_ids.begin(), target_ids.end(), e.id) != target_ids.end();
      });
      if (modified.edges.empty() || !modified.strongly_connected()) {
        return ToolOutcome::failure(ErrorPayload{
            "disconnected_network", "removing '" + ref + "' would disconnect the network", {}});
      }
      network = std::move(modified);
    } else {
      const double vmax = params.value("vmax", 13.89);
      for (const auto& id : target_ids) network.edge_by_id_mut(id)->vmax = vmax;
    }
  } else if (op == "tls_optimize_and_apply") {
    const std::string tls_id = params.value("tls_id", "");
    TlsProgram* tls = network.tls_by_id(tls_id);
    if (!tls) {
      std::vector<std::string> ids;
      for (const auto& t : network.tls) ids.push_back(t.id);
      return ToolOutcome::failure(ErrorPayload{"unknown_tls", "no traffic light '" + tls_id + "'",
                                               similarity::rank_candidates(tls_id, ids, 3)});
    }
    const double cycle = params.value("cycle", 60.0);
    // Even green split across the existing phases.
    tls->cycle = cycle;
    const double share = cycle / static_cast<double>(tls->phases.size());
    for (auto& phase : tls->phases) phase.duration = share;
  } else if (op == "tls_set_program") {
    const std::string tls_id = params.value("tls_id", "");
    TlsProgram* tls = network.tls_by_id(tls_id);
    if (!tls) {
      std::vector<std::string> ids;
      for (const auto& t : network.tls) ids.push_back(t.id);
      return ToolOutcome::failure(ErrorPayload{"unknown_tls", "no traffic light '" + tls_id + "'",
                                               similarity::rank_candidates(tls_id, ids, 3)});
    }
    auto program = xml::parse(params.value("program_xml", ""));
    if (!program || program->name != "tlLogic") {
      return ToolOutcome::failure(
          ErrorPayload{"malformed_program", "program_xml must be a <tlLogic> document", {}});
    }
    std::vector<TlsPhase> phases;
    double cycle = 0;
    for (const auto* ph : program->children_named("phase")) {
      TlsPhase phase;
      if (const std::string* d = ph->attr("duration")) phase.duration = parse_double_str(*d, 0);
      if (const std::string* s = ph->attr("state")) phase.state = *s;
      cycle += phase.duration;
      phases.push_back(std::move(phase));
    }
    if (phases.empty()) {
      return ToolOutcome::failure(ErrorPayload{"malformed_program", "program has no phases", {}});
    }
    tls->phases = std::move(phases);
    tls->cycle = cycle;
  } else {
    return ToolOutcome::failure(ErrorPayload{"unknown_op", "unsupported modify op '" + op + "'", {}});
  }

  std::string rel = store_->allocate_path(store::Kind::Network);
  if (!write_file(store_->run_dir() / rel, serialize_network(network))) {
    return ToolOutcome::failure(ErrorPayload{"write_failed", "cannot write " + rel, {}});
  }
  auto parent = store_->latest(store::Kind::Network);
  auto artifact = store_->put(store::Kind::Network, rel, "modifier", step_id,
                              parent ? std::vector<std::string>{parent->artifact_id}
                                     : std::vector<std::string>{});
  if (!artifact) return ToolOutcome::failure(store_error(artifact.error()));
  ToolOutcome out = ToolOutcome::success();
  out.artifacts.push_back(*artifact);
  return out;
}

ToolOutcome Toolbox::gen_demand(const json& params, int step_id) {
  auto net = load_latest_network();
  if (!net) return ToolOutcome::failure(net.error());
  auto net_artifact = store_->latest(store::Kind::Network);

  DemandSpec spec;
  spec.seed = params.value("seed", 42LL);
  spec.begin = static_cast<double>(params.value("begin", 0LL));
  spec.end = static_cast<double>(params.value("end", 3600LL));
  if (params.value("type", "") == "generate_flow_route") {
    spec.kind = DemandSpec::Kind::OdFlow;
    spec.from_edge = params.value("from_edge", "");
    spec.to_edge = params.value("to_edge", "");
    spec.vph = params.value("vph", 0LL);
  } else {
    spec.kind = DemandSpec::Kind::Random;
    // Builder-declared volume is the fallback when the step omits flows.
    spec.flows = params.value("flows", net->volume > 0 ? net->volume : 1000LL);
  }

  auto xml_text = generate_demand(*net, spec);
  if (!xml_text) return ToolOutcome::failure(xml_text.error());

  // Independent consistency pass: every edge referenced by the route file
  // must exist in the parent network.
  auto doc = parse_routes(*xml_text);
  if (!doc) return ToolOutcome::failure(ErrorPayload{"internal", doc.error(), {}});
  for (const auto& v : doc->vehicles) {
    for (const auto& id : v.edges) {
      if (!net->edge_by_id(id)) {
        return ToolOutcome::failure(
            ErrorPayload{"internal", "generated route references unknown edge " + id, {}});
      }
    }
  }

  std::string rel = store_->allocate_path(store::Kind::Routes);
  if (!write_file(store_->run_dir() / rel, *xml_text)) {
    return ToolOutcome::failure(ErrorPayload{"write_failed", "cannot write " + rel, {}});
  }
  auto artifact = store_->put(store::Kind::Routes, rel, "demand", step_id,
                              net_artifact ? std::vector<std::string>{net_artifact->artifact_id}
                                           : std::vector<std::string>{});
  if (!artifact) return ToolOutcome::failure(store_error(artifact.error()));
  ToolOutcome out = ToolOutcome::success();
  out.artifacts.push_back(*artifact);
  return out;
}

ToolOutcome Toolbox::run(const json& params, int step_id) {
  auto net_artifact = store_->latest(store::Kind::Network);
  auto routes_artifact = store_->latest(store::Kind::Routes);
  if (!net_artifact || !routes_artifact) {
    return ToolOutcome::failure(ErrorPayload{"dependency_missing", "network and routes required", {}});
  }
  const long long steps = params.value("steps", 3600LL);
  const bool gui = params.value("gui", false);
  const long long seed = params.value("seed", 42LL);

  std::string tripinfo_rel = store_->allocate_path(store::Kind::Tripinfo);
  std::string summary_rel = store_->allocate_path(store::Kind::Summary);
  std::string config_rel = store_->allocate_path(store::Kind::Config);

  std::string config_xml = write_config_xml(net_artifact->path, routes_artifact->path, steps, gui,
                                            seed, tripinfo_rel, summary_rel);
  if (!write_file(store_->run_dir() / config_rel, config_xml)) {
    return ToolOutcome::failure(ErrorPayload{"write_failed", "cannot write " + config_rel, {}});
  }
  auto config_artifact =
      store_->put(store::Kind::Config, config_rel, "runner", step_id,
                  {net_artifact->artifact_id, routes_artifact->artifact_id});
  if (!config_artifact) return ToolOutcome::failure(store_error(config_artifact.error()));

  ToolOutcome out = ToolOutcome::success();
  out.artifacts.push_back(*config_artifact);

  bool zero_vehicles = false;
  if (mode_ == EngineMode::External && !hooks_.run_command.empty()) {
    std::string cmd = substitute(hooks_.run_command,
                                 {{"config", (store_->run_dir() / config_rel).string()},
                                  {"net", (store_->run_dir() / net_artifact->path).string()},
                                  {"routes", (store_->run_dir() / routes_artifact->path).string()},
                                  {"tripinfo", (store_->run_dir() / tripinfo_rel).string()},
                                  {"summary", (store_->run_dir() / summary_rel).string()},
                                  {"steps", std::to_string(steps)}});
    if (std::system(cmd.c_str()) != 0) {
      return ToolOutcome::failure(ErrorPayload{"process_failed", "simulator exited non-zero: " + cmd, {}});
    }
  } else {
    auto net = read_network(store_->run_dir() / net_artifact->path);
    if (!net) return ToolOutcome::failure(ErrorPayload{"malformed_config", net.error(), {}});
    auto routes = read_routes(store_->run_dir() / routes_artifact->path);
    if (!routes) return ToolOutcome::failure(ErrorPayload{"malformed_config", routes.error(), {}});
    auto sim = run_mock(*net, *routes, static_cast<double>(steps));
    if (!sim) return ToolOutcome::failure(sim.error());
    if (!write_file(store_->run_dir() / tripinfo_rel, sim->tripinfo_xml) ||
        !write_file(store_->run_dir() / summary_rel, sim->summary_xml)) {
      return ToolOutcome::failure(ErrorPayload{"write_failed", "cannot write simulation outputs", {}});
    }
    zero_vehicles = sim->zero_vehicles;
  }

  auto tripinfo_artifact = store_->put(store::Kind::Tripinfo, tripinfo_rel, "runner", step_id,
                                       {config_artifact->artifact_id});
  if (!tripinfo_artifact) return ToolOutcome::failure(store_error(tripinfo_artifact.error()));
  out.artifacts.push_back(*tripinfo_artifact);
  auto summary_artifact = store_->put(store::Kind::Summary, summary_rel, "runner", step_id,
                                      {config_artifact->artifact_id});
  if (!summary_artifact) return ToolOutcome::failure(store_error(summary_artifact.error()));
  out.artifacts.push_back(*summary_artifact);
  if (zero_vehicles) out.warnings.push_back("no_vehicles_loaded");
  return out;
}

ToolOutcome Toolbox::analyze(const json& params, int step_id) {
  (void)step_id;
  auto tripinfo_artifact = store_->latest(store::Kind::Tripinfo);
  if (!tripinfo_artifact) {
    return ToolOutcome::failure(ErrorPayload{"dependency_missing", "tripinfo required", {}});
  }
  auto records = kpi::parse_tripinfo(store_->run_dir() / tripinfo_artifact->path);
  if (!records) {
    return ToolOutcome::failure(ErrorPayload{"malformed_tripinfo", records.error().detail, {}});
  }
  auto metric = kpi::metric_from_token(params.value("metric", "all"));
  kpi::KpiReport report = kpi::aggregate(*records, metric.value_or(kpi::Metric::All));
  std::ofstream out(store_->run_dir() / "kpi_report.json");
  if (out) out << report.to_json().dump(2) << "\n";
  ToolOutcome result = ToolOutcome::success();
  result.kpi = std::move(report);
  for (const auto& w : result.kpi->warnings) result.warnings.push_back(w);
  return result;
}

std::string write_config_xml(const std::string& net_path, const std::string& routes_path,
                             long long steps, bool gui, long long seed,
                             const std::string& tripinfo_path, const std::string& summary_path) {
  xml::Element root;
  root.name = "configuration";
  xml::Element input;
  input.name = "input";
  xml::Element net;
  net.name = "net-file";
  net.attrs = {{"value", net_path}};
  xml::Element routes;
  routes.name = "route-files";
  routes.attrs = {{"value", routes_path}};
  input.children = {net, routes};
  xml::Element time;
  time.name = "time";
  xml::Element begin;
  begin.name = "begin";
  begin.attrs = {{"value", "0"}};
  xml::Element end;
  end.name = "end";
  end.attrs = {{"value", std::to_string(steps)}};
  time.children = {begin, end};
  xml::Element output;
  output.name = "output";
  xml::Element trip;
  trip.name = "tripinfo-output";
  trip.attrs = {{"value", tripinfo_path}};
  xml::Element summary;
  summary.name = "summary-output";
  summary.attrs = {{"value", summary_path}};
  output.children = {trip, summary};
  xml::Element random;
  random.name = "random_number";
  xml::Element seed_el;
  seed_el.name = "seed";
  seed_el.attrs = {{"value", std::to_string(seed)}};
  random.children = {seed_el};
  xml::Element meta;
  meta.name = "meta";
  meta.attrs = {{"gui", gui ? "true" : "false"}};
  root.children = {input, time, output, random, meta};
  return xml::serialize(root);
}

Result<ConfigDoc, std::string> parse_config(const std::string& xml_text) {
  auto doc = xml::parse(xml_text);
  if (!doc) return std::string("config xml: " + doc.error().message);
  if (doc->name != "configuration") return std::string("config root must be <configuration>");
  ConfigDoc out;
  if (const xml::Element* input = doc->child("input")) {
    if (const xml::Element* net = input->child("net-file")) {
      if (const std::string* v = net->attr("value")) out.net_path = *v;
    }
    if (const xml::Element* routes = input->child("route-files")) {
      if (const std::string* v = routes->attr("value")) out.routes_path = *v;
    }
  }
  if (out.net_path.empty() || out.routes_path.empty()) {
    return std::string("config missing net-file or route-files");
  }
  if (const xml::Element* time = doc->child("time")) {
    if (const xml::Element* end = time->child("end")) {
      if (const std::string* v = end->attr("value")) out.steps = std::llround(parse_double_str(*v, 3600));
    }
  }
  if (const xml::Element* output = doc->child("output")) {
    if (const xml::Element* trip = output->child("tripinfo-output")) {
      if (const std::string* v = trip->attr("value")) out.tripinfo_path = *v;
    }
    if (const xml::Element* summary = output->child("summary-output")) {
      if (const std::string* v = summary->attr("value")) out.summary_path = *v;
    }
  }
  if (const xml::Element* random = doc->child("random_number")) {
    if (const xml::Element* seed = random->child("seed")) {
      if (const std::string* v = seed->attr("value")) out.seed = std::llround(parse_double_str(*v, 42));
    }
  }
  if (const xml::Element* meta = doc->child("meta")) {
    if (const std::string* v = meta->attr("gui")) out.gui = (*v == "true");
  }
  return out;
}

Result<ConfigDoc, std::string> read_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::string("cannot open " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config(content);
}

}  // namespace simflow::simbridge

#include "simflow/network.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>

#include "simflow/types.hpp"

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

// Street pool for synthetic builds. The first two entries are pinned to
// row 0 / column 0; the rest rotate by city hash. 22 rotating names cover
// the largest grid (2 * (12 - 1) streets beyond the pinned pair).
const std::vector<std::string>& street_pool() {
  static const std::vector<std::string> kPool = {
      "Main Street",      "Congress Street",  "River Street",    "Hoosick Street",
      "Federal Street",   "Ferry Street",     "Oak Avenue",      "Maple Avenue",
      "Pine Street",      "Elm Street",       "State Street",    "Union Street",
      "Liberty Street",   "Franklin Street",  "Washington Avenue", "Jefferson Street",
      "Madison Avenue",   "Monroe Street",    "Grand Street",    "Division Street",
      "Spring Avenue",    "Hill Street",      "Park Avenue",     "Canal Street"};
  return kPool;
}

}  // namespace

const NetEdge* Network::edge_by_id(std::string_view id) const {
  for (const auto& e : edges) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

NetEdge* Network::edge_by_id_mut(std::string_view id) {
  for (auto& e : edges) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

std::vector<const NetEdge*> Network::edges_by_street(std::string_view street_name) const {
  auto lower = [](std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
  };
  std::string want = lower(street_name);
  std::vector<const NetEdge*> out;
  for (const auto& e : edges) {
    if (lower(e.street_name) == want) out.push_back(&e);
  }
  return out;
}

TlsProgram* Network::tls_by_id(std::string_view id) {
  for (auto& t : tls) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

std::vector<std::string> Network::street_names() const {
  std::set<std::string> names;
  for (const auto& e : edges) {
    if (!e.street_name.empty()) names.insert(e.street_name);
  }
  return {names.begin(), names.end()};
}

std::vector<std::string> Network::edge_ids() const {
  std::vector<std::string> out;
  out.reserve(edges.size());
  for (const auto& e : edges) out.push_back(e.id);
  return out;
}

bool Network::strongly_connected() const {
  // Every declared node must reach every other and be reached back; a node
  // stripped of all its edges counts as isolated.
  if (nodes.empty() || edges.empty()) return false;
  std::map<std::string, std::vector<std::string>> fwd, rev;
  for (const auto& e : edges) {
    fwd[e.from_node].push_back(e.to_node);
    rev[e.to_node].push_back(e.from_node);
  }
  auto reach = [&](const std::map<std::string, std::vector<std::string>>& adj) {
    std::set<std::string> seen;
    std::vector<std::string> stack = {nodes.front().id};
    while (!stack.empty()) {
      std::string n = stack.back();
      stack.pop_back();
      if (!seen.insert(n).second) continue;
      auto it = adj.find(n);
      if (it == adj.end()) continue;
      for (const auto& m : it->second) stack.push_back(m);
    }
    return seen;
  };
  return reach(fwd).size() == nodes.size() && reach(rev).size() == nodes.size();
}

std::optional<std::vector<std::string>> Network::route_between(std::string_view from_edge,
                                                               std::string_view to_edge) const {
  const NetEdge* from = edge_by_id(from_edge);
  const NetEdge* to = edge_by_id(to_edge);
  if (!from || !to) return std::nullopt;
  if (from->id == to->id) return std::vector<std::string>{from->id};

  // Dijkstra over nodes from from->to_node to to->from_node; arcs sorted by
  // (length, edge id) so the chosen predecessor is deterministic.
  struct Arc {
    std::string to;
    double length;
    std::string edge_id;
  };
  std::map<std::string, std::vector<Arc>> adj;
  for (const auto& e : edges) adj[e.from_node].push_back({e.to_node, e.length, e.id});
  for (auto& [_, arcs] : adj) {
    std::sort(arcs.begin(), arcs.end(),
              [](const Arc& a, const Arc& b) { return std::tie(a.length, a.edge_id) < std::tie(b.length, b.edge_id); });
  }

  const std::string start = from->to_node;
  const std::string goal = to->from_node;
  if (start == goal) return std::vector<std::string>{from->id, to->id};

  std::map<std::string, double> dist;
  std::map<std::string, std::string> via_edge;
  std::map<std::string, std::string> prev_node;
  using QItem = std::pair<double, std::string>;
  std::priority_queue<QItem, std::vector<QItem>, std::greater<>> q;
  dist[start] = 0;
  q.push({0, start});
  while (!q.empty()) {
    auto [d, n] = q.top();
    q.pop();
    if (d > dist[n]) continue;
    if (n == goal) break;
    auto it = adj.find(n);
    if (it == adj.end()) continue;
    for (const Arc& a : it->second) {
      double nd = d + a.length;
      auto dit = dist.find(a.to);
      if (dit == dist.end() || nd < dit->second) {
        dist[a.to] = nd;
        via_edge[a.to] = a.edge_id;
        prev_node[a.to] = n;
        q.push({nd, a.to});
      }
    }
  }
  if (!dist.count(goal)) return std::nullopt;

  std::vector<std::string> middle;
  for (std::string n = goal; n != start; n = prev_node[n]) middle.push_back(via_edge[n]);
  std::reverse(middle.begin(), middle.end());

  std::vector<std::string> route;
  route.push_back(from->id);
  for (auto& e : middle) route.push_back(std::move(e));
  route.push_back(to->id);
  return route;
}

int grid_side_count(double distance_miles) {
  int n = static_cast<int>(std::llround(distance_miles * 10.0));
  return std::clamp(n, 2, 12);
}

Network build_grid(const std::string& city_name, double distance_miles, long long volume) {
  Network net;
  net.city_name = city_name;
  net.volume = volume;
  const int n = grid_side_count(distance_miles);
  const double spacing = 100.0;

  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      net.nodes.push_back(NetNode{"n" + std::to_string(r) + "_" + std::to_string(c),
                                  c * spacing, r * spacing});
    }
  }

  // Street naming: row r is an east-west street, column c a north-south one.
  const auto& pool = street_pool();
  std::vector<std::string> rotating(pool.begin() + 2, pool.end());
  std::size_t offset = static_cast<std::size_t>(fnv1a64(city_name) % rotating.size());
  std::vector<std::string> row_names(n), col_names(n);
  std::size_t cursor = 0;
  auto next_name = [&]() {
    std::string name = rotating[(offset + cursor) % rotating.size()];
    ++cursor;
    return name;
  };
  row_names[0] = pool[0];  // Main Street
  col_names[0] = pool[1];  // Congress Street
  for (int r = 1; r < n; ++r) row_names[r] = next_name();
  for (int c = 1; c < n; ++c) col_names[c] = next_name();

  auto add_pair = [&](const std::string& a, const std::string& b, const std::string& street) {
    NetEdge e;
    e.length = spacing;
    e.lanes = 1;
    e.vmax = 13.89;
    e.street_name = street;
    e.id = "e_" + a + "_" + b;
    e.from_node = a;
    e.to_node = b;
    net.edges.push_back(e);
    e.id = "e_" + b + "_" + a;
    e.from_node = b;
    e.to_node = a;
    net.edges.push_back(e);
  };

  auto node_id = [](int r, int c) { return "n" + std::to_string(r) + "_" + std::to_string(c); };
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c + 1 < n; ++c) add_pair(node_id(r, c), node_id(r, c + 1), row_names[r]);
  }
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r + 1 < n; ++r) add_pair(node_id(r, c), node_id(r + 1, c), col_names[c]);
  }

  for (int r = 1; r + 1 < n; ++r) {
    for (int c = 1; c + 1 < n; ++c) {
      TlsProgram t;
      t.id = "tls_" + node_id(r, c);
      t.cycle = 60.0;
      t.phases = {TlsPhase{30.0, "GGrr"}, TlsPhase{30.0, "rrGG"}};
      net.tls.push_back(std::move(t));
    }
  }
  return net;
}

Network build_roundabout(double radius, int lanes, long long volume) {
  Network net;
  net.city_name = "roundabout";
  net.volume = volume;
  const int segments = 8;
  const double circumference = 2.0 * 3.14159265358979 * radius;
  const double seg_len = std::max(circumference / segments, 1.0);
  for (int i = 0; i < segments; ++i) {
    double angle = 2.0 * 3.14159265358979 * i / segments;
    net.nodes.push_back(NetNode{"r" + std::to_string(i), radius * std::cos(angle), radius * std::sin(angle)});
  }
  for (int i = 0; i < segments; ++i) {
    NetEdge e;
    e.from_node = "r" + std::to_string(i);
    e.to_node = "r" + std::to_string((i + 1) % segments);
    e.id = "e_" + e.from_node + "_" + e.to_node;
    e.length = seg_len;
    e.lanes = lanes;
    e.vmax = 13.89;
    e.street_name = "Roundabout Loop";
    net.edges.push_back(e);
  }
  return net;
}

std::string serialize_network(const Network& net) {
  xml::Element root;
  root.name = "net";
  root.attrs = {{"version", "1.9"}};

  xml::Element meta;
  meta.name = "meta";
  meta.attrs = {{"city", net.city_name}, {"volume", std::to_string(net.volume)}};
  root.children.push_back(meta);

  for (const auto& node : net.nodes) {
    xml::Element el;
    el.name = "node";
    el.attrs = {{"id", node.id}, {"x", fmt2(node.x)}, {"y", fmt2(node.y)}};
    root.children.push_back(el);
  }
  for (const auto& e : net.edges) {
    xml::Element el;
    el.name = "edge";
    el.attrs = {{"id", e.id}, {"from", e.from_node}, {"to", e.to_node}, {"name", e.street_name}};
    for (int lane = 0; lane < e.lanes; ++lane) {
      xml::Element l;
      l.name = "lane";
      l.attrs = {{"id", e.id + "_" + std::to_string(lane)},
                 {"index", std::to_string(lane)},
                 {"speed", fmt2(e.vmax)},
                 {"length", fmt2(e.length)}};
      el.children.push_back(l);
    }
    root.children.push_back(el);
  }
  for (const auto& t : net.tls) {
    xml::Element el;
    el.name = "tlLogic";
    el.attrs = {{"id", t.id}, {"type", "static"}, {"programID", "0"}, {"offset", "0"}};
    for (const auto& p : t.phases) {
      xml::Element ph;
      ph.name = "phase";
      ph.attrs = {{"duration", fmt2(p.duration)}, {"state", p.state}};
      el.children.push_back(ph);
    }
    root.children.push_back(el);
  }
  return xml::serialize(root);
}

Result<Network, std::string> parse_network(const std::string& xml_text) {
  auto doc = xml::parse(xml_text);
  if (!doc) return std::string("network xml: " + doc.error().message);
  if (doc->name != "net") return std::string("network root must be <net>");
  Network net;
  for (const auto& el : doc->children) {
    if (el.name == "meta") {
      if (const std::string* city = el.attr("city")) net.city_name = *city;
      if (const std::string* vol = el.attr("volume")) net.volume = std::llround(parse_double(*vol));
    } else if (el.name == "node") {
      NetNode node;
      const std::string* id = el.attr("id");
      if (!id) return std::string("node without id");
      node.id = *id;
      if (const std::string* x = el.attr("x")) node.x = parse_double(*x);
      if (const std::string* y = el.attr("y")) node.y = parse_double(*y);
      net.nodes.push_back(std::move(node));
    } else if (el.name == "edge") {
      NetEdge e;
      const std::string* id = el.attr("id");
      const std::string* from = el.attr("from");
      const std::string* to = el.attr("to");
      if (!id || !from || !to) return std::string("edge missing id/from/to");
      e.id = *id;
      e.from_node = *from;
      e.to_node = *to;
      if (const std::string* name = el.attr("name")) e.street_name = *name;
      auto lanes = el.children_named("lane");
      if (lanes.empty()) return std::string("edge '" + e.id + "' has no lanes");
      e.lanes = static_cast<int>(lanes.size());
      if (const std::string* speed = lanes[0]->attr("speed")) e.vmax = parse_double(*speed, 13.89);
      if (const std::string* length = lanes[0]->attr("length")) e.length = parse_double(*length, 100.0);
      net.edges.push_back(std::move(e));
    } else if (el.name == "tlLogic") {
      TlsProgram t;
      const std::string* id = el.attr("id");
      if (!id) return std::string("tlLogic without id");
      t.id = *id;
      for (const auto* ph : el.children_named("phase")) {
        TlsPhase phase;
        if (const std::string* d = ph->attr("duration")) phase.duration = parse_double(*d);
        if (const std::string* s = ph->attr("state")) phase.state = *s;
        t.cycle += phase.duration;
        t.phases.push_back(std::move(phase));
      }
      net.tls.push_back(std::move(t));
    }
  }
  for (const auto& e : net.edges) {
    bool from_ok = false, to_ok = false;
    for (const auto& node : net.nodes) {
      if (node.id == e.from_node) from_ok = true;
      if (node.id == e.to_node) to_ok = true;
    }
    if (!from_ok || !to_ok) return std::string("edge '" + e.id + "' references unknown node");
  }
  return net;
}

Result<Network, std::string> read_network(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::string("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_network(buf.str());
}

}  // namespace simflow::simbridge

#include "dhpp/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <sstream>

#include "dhpp/errors.hpp"
#include "topology_io.hpp"

namespace dhpp {

double haversine_km(double lat1_deg, double lon1_deg, double lat2_deg, double lon2_deg) {
  constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
  const double lat1 = lat1_deg * kDegToRad;
  const double lat2 = lat2_deg * kDegToRad;
  const double dlat = (lat2_deg - lat1_deg) * kDegToRad;
  const double dlon = (lon2_deg - lon1_deg) * kDegToRad;
  const double sin_dlat = std::sin(dlat / 2.0);
  const double sin_dlon = std::sin(dlon / 2.0);
  double h = sin_dlat * sin_dlat + std::cos(lat1) * std::cos(lat2) * sin_dlon * sin_dlon;
  h = std::min(1.0, std::max(0.0, h));
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

double link_latency_ms(const Node& a, const Node& b) {
  const double km = haversine_km(a.latitude, a.longitude, b.latitude, b.longitude);
  return km / kPropagationKmPerSec * 1000.0;
}

std::vector<double> all_pairs_latency(int n_nodes, const std::vector<Link>& links) {
  const auto n = static_cast<std::size_t>(n_nodes);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n * n, inf);
  for (std::size_t i = 0; i < n; ++i) dist[i * n + i] = 0.0;
  for (const Link& l : links) {
    const std::size_t a = static_cast<std::size_t>(l.a);
    const std::size_t b = static_cast<std::size_t>(l.b);
    dist[a * n + b] = std::min(dist[a * n + b], l.latency_ms);
    dist[b * n + a] = dist[a * n + b];
  }
  // Floyd-Warshall. The update is symmetric, so the result stays symmetric
  // bit-for-bit.
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const double dik = dist[i * n + k];
      if (dik == inf) continue;
      for (std::size_t j = 0; j < n; ++j) {
        const double cand = dik + dist[k * n + j];
        if (cand < dist[i * n + j]) dist[i * n + j] = cand;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (dist[i * n + j] == inf) {
        throw DisconnectedGraph("graph is disconnected: no path between node " +
                                std::to_string(i) + " and node " + std::to_string(j));
      }
    }
  }
  return dist;
}

Topology Topology::build(std::vector<Node> nodes, std::vector<Link> links, std::string name) {
  for (const Node& node : nodes) {
    if (!node.has_coords) continue;
    if (node.latitude < -90.0 || node.latitude > 90.0 || node.longitude < -180.0 ||
        node.longitude > 180.0) {
      throw ParseError("node '" + node.label + "' has out-of-range coordinates");
    }
  }
  // Self-loops are meaningless for shortest paths; parallel links collapse to
  // the fastest one. Both occur in real topology files.
  std::map<std::pair<int, int>, double> best;
  for (const Link& l : links) {
    if (l.a == l.b) continue;
    if (l.latency_ms < 0.0 || !std::isfinite(l.latency_ms)) {
      throw ParseError("link latency must be finite and non-negative");
    }
    const auto key = std::minmax(l.a, l.b);
    auto [it, inserted] = best.emplace(key, l.latency_ms);
    if (!inserted) it->second = std::min(it->second, l.latency_ms);
  }
  std::vector<Link> clean;
  clean.reserve(best.size());
  for (const auto& [key, latency] : best) clean.push_back(Link{key.first, key.second, latency});

  Topology t;
  t.name_ = std::move(name);
  t.nodes_ = std::move(nodes);
  t.links_ = std::move(clean);
  t.dist_ = all_pairs_latency(t.n_nodes(), t.links_);
  return t;
}

Topology Topology::from_links(int n_nodes, std::vector<Link> links, std::string name) {
  if (n_nodes <= 0) throw ParseError("topology needs at least one node");
  std::vector<Node> nodes(static_cast<std::size_t>(n_nodes));
  for (int i = 0; i < n_nodes; ++i) {
    nodes[i].id = i;
    nodes[i].label = "n" + std::to_string(i);
  }
  for (const Link& l : links) {
    if (l.a < 0 || l.a >= n_nodes || l.b < 0 || l.b >= n_nodes) {
      throw ParseError("link endpoint out of range");
    }
  }
  return build(std::move(nodes), std::move(links), std::move(name));
}

Topology Topology::from_nodes(std::vector<Node> nodes,
                              const std::vector<std::pair<int, int>>& edges, std::string name) {
  const int n = static_cast<int>(nodes.size());
  for (int i = 0; i < n; ++i) nodes[i].id = i;
  std::vector<Link> links;
  links.reserve(edges.size());
  for (const auto& [a, b] : edges) {
    if (a < 0 || a >= n || b < 0 || b >= n) throw ParseError("edge endpoint out of range");
    if (!nodes[a].has_coords || !nodes[b].has_coords) {
      throw MissingCoordinates("edge endpoints must both carry coordinates");
    }
    links.push_back(Link{a, b, link_latency_ms(nodes[a], nodes[b])});
  }
  return build(std::move(nodes), std::move(links), std::move(name));
}

Topology Topology::parse(std::istream& in, const std::string& name) {
  // GraphML is XML; GML starts with bare keys. Peek at the first
  // non-whitespace byte.
  char c = 0;
  while (in.get(c)) {
    if (!std::isspace(static_cast<unsigned char>(c))) break;
  }
  if (!in) throw ParseError("empty topology document");
  in.unget();
  if (c == '<') return parse_graphml(in, name);
  return parse_gml(in, name);
}

Topology Topology::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open topology file: " + path);
  std::string stem = path;
  if (const auto slash = stem.find_last_of("/\\"); slash != std::string::npos) {
    stem = stem.substr(slash + 1);
  }
  if (const auto dot = stem.find_last_of('.'); dot != std::string::npos) {
    stem = stem.substr(0, dot);
  }
  return parse(in, stem);
}

double Topology::diameter_ms() const {
  double d = 0.0;
  for (const double v : dist_) d = std::max(d, v);
  return d;
}

namespace detail {

Topology assemble_topology(std::vector<RawNode> raw_nodes, std::vector<RawEdge> raw_edges,
                           const std::string& name) {
  std::map<std::string, int> index_of;
  std::vector<Node> nodes;
  nodes.reserve(raw_nodes.size());
  for (auto& rn : raw_nodes) {
    if (index_of.count(rn.source_id)) {
      throw ParseError("duplicate node id '" + rn.source_id + "'");
    }
    Node node;
    node.id = static_cast<int>(nodes.size());
    node.label = rn.label.empty() ? rn.source_id : rn.label;
    node.latitude = rn.latitude;
    node.longitude = rn.longitude;
    node.has_coords = rn.has_lat && rn.has_lon;
    index_of.emplace(rn.source_id, node.id);
    nodes.push_back(std::move(node));
  }
  if (nodes.empty()) throw ParseError("document contains no nodes");

  std::vector<Link> links;
  links.reserve(raw_edges.size());
  for (const auto& re : raw_edges) {
    const auto sa = index_of.find(re.source);
    const auto sb = index_of.find(re.target);
    if (sa == index_of.end() || sb == index_of.end()) {
      throw ParseError("edge references unknown node id '" +
                       (sa == index_of.end() ? re.source : re.target) + "'");
    }
    const Node& a = nodes[sa->second];
    const Node& b = nodes[sb->second];
    double latency;
    if (a.has_coords && b.has_coords) {
      latency = link_latency_ms(a, b);
    } else if (re.has_latency) {
      latency = re.latency_ms;
    } else {
      const Node& missing = a.has_coords ? b : a;
      throw MissingCoordinates("node '" + missing.label +
                               "' has no coordinates and edge carries no latency attribute");
    }
    links.push_back(Link{a.id, b.id, latency});
  }
  return TopologyBuilderAccess::build(std::move(nodes), std::move(links), name);
}

}  // namespace detail

}  // namespace dhpp

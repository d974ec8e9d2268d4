#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dhpp {

struct Node {
  int id = 0;  // dense index 0..N-1
  std::string label;
  double latitude = 0.0;
  double longitude = 0.0;
  bool has_coords = false;
};

struct Link {
  int a = 0;
  int b = 0;
  double latency_ms = 0.0;
};

// Earth radius and propagation speed used to turn geography into delay.
// 200,000 km/s is the usual ~2/3 c signal speed in fiber.
inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kPropagationKmPerSec = 200000.0;

double haversine_km(double lat1_deg, double lon1_deg, double lat2_deg, double lon2_deg);

// Great-circle propagation delay between two placed nodes, in milliseconds.
// Symmetric and zero for co-located nodes. Both nodes must carry coordinates.
double link_latency_ms(const Node& a, const Node& b);

// Exact all-pairs shortest-path latencies over an undirected graph.
// Returns a row-major N*N matrix; throws DisconnectedGraph if any pair is
// unreachable. The result is symmetric with a zero diagonal.
std::vector<double> all_pairs_latency(int n_nodes, const std::vector<Link>& links);

// An immutable physical network: placed nodes, undirected latency-weighted
// links, and the full shortest-path latency matrix. Instances are safe to
// share across threads once constructed.
class Topology {
 public:
  // Parses Topology Zoo style input, auto-detecting GML vs GraphML.
  static Topology parse(std::istream& in, const std::string& name = "topology");
  static Topology parse_gml(std::istream& in, const std::string& name = "topology");
  static Topology parse_graphml(std::istream& in, const std::string& name = "topology");
  static Topology from_file(const std::string& path);

  // Builds from explicit links with given latencies (no geography involved).
  static Topology from_links(int n_nodes, std::vector<Link> links, std::string name = "custom");

  // Builds from placed nodes; link latencies are derived from geography.
  static Topology from_nodes(std::vector<Node> nodes, const std::vector<std::pair<int, int>>& edges,
                             std::string name = "custom");

  int n_nodes() const { return static_cast<int>(nodes_.size()); }
  int n_links() const { return static_cast<int>(links_.size()); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }

  double dist(int i, int j) const { return dist_[static_cast<std::size_t>(i) * nodes_.size() + j]; }
  const std::vector<double>& dist_matrix() const { return dist_; }
  double diameter_ms() const;

  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

 private:
  // Normalizes raw parse output: drops self-loops, collapses parallel links
  // to the minimum latency, checks coordinate ranges, computes dist_.
  static Topology build(std::vector<Node> nodes, std::vector<Link> links, std::string name);

  std::string name_;
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::vector<double> dist_;

  friend struct TopologyBuilderAccess;
};

}  // namespace dhpp

#pragma once

// Internal glue between the format-specific parsers and Topology.

#include <string>
#include <utility>
#include <vector>

#include "dhpp/topology.hpp"

namespace dhpp {

struct TopologyBuilderAccess {
  static Topology build(std::vector<Node> nodes, std::vector<Link> links, std::string name) {
    return Topology::build(std::move(nodes), std::move(links), std::move(name));
  }
};

namespace detail {

struct RawNode {
  std::string source_id;  // id as written in the document
  std::string label;
  double latitude = 0.0;
  double longitude = 0.0;
  bool has_lat = false;
  bool has_lon = false;
};

struct RawEdge {
  std::string source;
  std::string target;
  double latency_ms = 0.0;
  bool has_latency = false;
};

// Re-indexes node ids densely (document order), resolves link latencies
// (geodesic when both endpoints are placed, else the edge's latency
// attribute), and builds the final Topology.
Topology assemble_topology(std::vector<RawNode> raw_nodes, std::vector<RawEdge> raw_edges,
                           const std::string& name);

bool iequals(const std::string& a, const char* b);

}  // namespace detail
}  // namespace dhpp

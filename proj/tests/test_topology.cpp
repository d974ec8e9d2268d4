#include <cmath>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "dhpp/errors.hpp"
#include "dhpp/topology.hpp"
#include "support/helpers.hpp"

using namespace dhpp;

namespace {

Topology parse_gml_string(const std::string& text) {
  std::istringstream in(text);
  return Topology::parse(in, "inline");
}

const char* kTwoNodeSamePlace = R"(
graph [
  node [ id 0 label "a" Latitude 10.0 Longitude 20.0 ]
  node [ id 1 label "b" Latitude 10.0 Longitude 20.0 ]
  edge [ source 0 target 1 ]
]
)";

}  // namespace

TEST_SUITE("topology") {

TEST_CASE("two co-located nodes yield an all-zero latency matrix") {
  const Topology t = parse_gml_string(kTwoNodeSamePlace);
  REQUIRE(t.n_nodes() == 2);
  REQUIRE(t.n_links() == 1);
  CHECK(t.dist(0, 0) == 0.0);
  CHECK(t.dist(0, 1) == 0.0);
  CHECK(t.dist(1, 0) == 0.0);
  CHECK(t.dist(1, 1) == 0.0);
}

TEST_CASE("bundled ATT MPLS file parses to the recorded golden shape") {
  const Topology t = Topology::from_file(std::string(DHPP_SOURCE_DIR) + "/data/att_mpls.gml");
  // Golden values recorded from the file and cross-checked with an
  // independent haversine + Floyd-Warshall computation.
  CHECK(t.n_nodes() == 25);
  CHECK(t.n_links() == 56);
  CHECK(t.name() == "att_mpls");
  CHECK(t.diameter_ms() == doctest::Approx(22.002192).epsilon(1e-6));
  double mn = 1e300;
  double mx = 0.0;
  for (const Link& l : t.links()) {
    mn = std::min(mn, l.latency_ms);
    mx = std::max(mx, l.latency_ms);
  }
  CHECK(mn == doctest::Approx(0.603786).epsilon(1e-6));
  CHECK(mx == doctest::Approx(14.916960).epsilon(1e-6));
}

TEST_CASE("edge referencing an unknown node is a parse error") {
  CHECK_THROWS_AS(parse_gml_string(R"(
graph [
  node [ id 0 label "a" Latitude 1.0 Longitude 1.0 ]
  node [ id 1 label "b" Latitude 2.0 Longitude 2.0 ]
  edge [ source 0 target 7 ]
]
)"),
                  ParseError);
}

TEST_CASE("malformed documents are parse errors") {
  CHECK_THROWS_AS(parse_gml_string("graph [ node [ id"), ParseError);
  CHECK_THROWS_AS(parse_gml_string("graph [ node [ id 0 ] edge [ source 0 ] ]"), ParseError);
  std::istringstream empty("   ");
  CHECK_THROWS_AS(Topology::parse(empty), ParseError);
}

TEST_CASE("node without coordinates errors unless its links carry latencies") {
  CHECK_THROWS_AS(parse_gml_string(R"(
graph [
  node [ id 0 label "a" Latitude 1.0 Longitude 1.0 ]
  node [ id 1 label "b" ]
  edge [ source 0 target 1 ]
]
)"),
                  MissingCoordinates);
  const Topology t = parse_gml_string(R"(
graph [
  node [ id 0 label "a" ]
  node [ id 1 label "b" ]
  edge [ source 0 target 1 latency 2.5 ]
]
)");
  CHECK(t.dist(0, 1) == 2.5);
}

TEST_CASE("disconnected input is rejected") {
  CHECK_THROWS_AS(parse_gml_string(R"(
graph [
  node [ id 0 label "a" Latitude 1.0 Longitude 1.0 ]
  node [ id 1 label "b" Latitude 2.0 Longitude 2.0 ]
]
)"),
                  DisconnectedGraph);
}

TEST_CASE("parallel links collapse to the minimum and self-loops vanish") {
  const Topology t = Topology::from_links(2, {{0, 1, 5.0}, {1, 0, 2.0}, {0, 0, 9.0}});
  CHECK(t.n_links() == 1);
  CHECK(t.dist(0, 1) == 2.0);
}

TEST_CASE("GraphML documents parse with attribute keys") {
  std::istringstream in(R"(<?xml version="1.0" encoding="utf-8"?>
<graphml xmlns="http://graphml.graphdrawing.org/xmlns">
  <key id="d0" for="node" attr.name="Latitude" attr.type="double"/>
  <key id="d1" for="node" attr.name="Longitude" attr.type="double"/>
  <key id="d2" for="edge" attr.name="latency" attr.type="double"/>
  <graph edgedefault="undirected">
    <node id="n0"><data key="d0">10.0</data><data key="d1">20.0</data></node>
    <node id="n1"><data key="d0">10.0</data><data key="d1">21.0</data></node>
    <node id="n2"/>
    <edge source="n0" target="n1"/>
    <edge source="n1" target="n2"><data key="d2">3.25</data></edge>
  </graph>
</graphml>
)");
  const Topology t = Topology::parse(in);
  REQUIRE(t.n_nodes() == 3);
  REQUIRE(t.n_links() == 2);
  CHECK(t.dist(1, 2) == 3.25);
  CHECK(t.dist(0, 1) > 0.0);
}

TEST_CASE("link latency follows the great-circle convention") {
  Node a{0, "a", 0.0, 0.0, true};
  SUBCASE("identical coordinates") {
    Node b{1, "b", 0.0, 0.0, true};
    CHECK(link_latency_ms(a, b) == 0.0);
  }
  SUBCASE("antipodal points on the equator") {
    // Half the Earth circumference: pi * 6371 km at 200,000 km/s.
    Node b{1, "b", 0.0, 180.0, true};
    CHECK(std::abs(link_latency_ms(a, b) - 100.075434) < 1e-3);
  }
  SUBCASE("New York to Los Angeles") {
    Node ny{0, "ny", 40.7128, -74.0060, true};
    Node la{1, "la", 34.0522, -118.2437, true};
    CHECK(std::abs(link_latency_ms(ny, la) - 19.6786) < 0.05);
    CHECK(link_latency_ms(ny, la) == link_latency_ms(la, ny));
  }
}

TEST_CASE("path and triangle distances") {
  const Topology path = Topology::from_links(4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}});
  CHECK(path.dist(0, 3) == 3.0);
  CHECK(path.dist(1, 3) == 2.0);

  const Topology tri = Topology::from_links(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 3.0}});
  CHECK(tri.dist(0, 2) == 2.0);  // through the middle, not the direct link
}

TEST_CASE("all-pairs latencies match exhaustive path enumeration") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Topology t = test::random_small_topology(seed, 4, 8);
    const auto oracle = test::brute_force_all_pairs(t.n_nodes(), t.links());
    for (int i = 0; i < t.n_nodes(); ++i) {
      for (int j = 0; j < t.n_nodes(); ++j) {
        CHECK(t.dist(i, j) ==
              doctest::Approx(oracle[static_cast<std::size_t>(i) * t.n_nodes() + j])
                  .epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("matrix invariants: symmetry, zero diagonal, triangle inequality") {
  for (std::uint64_t seed = 30; seed < 45; ++seed) {
    const Topology t = test::random_small_topology(seed, 3, 8);
    const int n = t.n_nodes();
    for (int i = 0; i < n; ++i) {
      CHECK(t.dist(i, i) == 0.0);
      for (int j = 0; j < n; ++j) {
        CHECK(t.dist(i, j) == t.dist(j, i));
        for (int k = 0; k < n; ++k) {
          CHECK(t.dist(i, j) <= t.dist(i, k) + t.dist(k, j));
        }
      }
    }
  }
}

TEST_CASE("re-parsing yields an identical matrix") {
  std::ifstream f1(std::string(DHPP_SOURCE_DIR) + "/data/att_mpls.gml");
  std::ifstream f2(std::string(DHPP_SOURCE_DIR) + "/data/att_mpls.gml");
  const Topology a = Topology::parse(f1);
  const Topology b = Topology::parse(f2);
  CHECK(a.dist_matrix() == b.dist_matrix());
}

TEST_CASE("scaling all link latencies scales the matrix exactly") {
  for (const double c : {2.0, 0.25}) {
    for (std::uint64_t seed = 50; seed < 56; ++seed) {
      const Topology t = test::random_weight_topology(seed, 3, 8);
      std::vector<Link> scaled = t.links();
      for (Link& l : scaled) l.latency_ms *= c;
      const Topology ts = Topology::from_links(t.n_nodes(), scaled);
      for (int i = 0; i < t.n_nodes(); ++i) {
        for (int j = 0; j < t.n_nodes(); ++j) {
          CHECK(ts.dist(i, j) == t.dist(i, j) * c);
        }
      }
    }
  }
}

}  // TEST_SUITE

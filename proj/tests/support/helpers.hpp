#pragma once

// Shared generators and reference oracles for the test suites. Everything is
// seeded; no test depends on global randomness.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "dhpp/placement.hpp"
#include "dhpp/rng.hpp"
#include "dhpp/scenario.hpp"
#include "dhpp/topology.hpp"

namespace dhpp::test {

// Exhaustive shortest-path oracle: enumerates every simple path. Only viable
// for tiny graphs; used to cross-check the production all-pairs routine.
inline std::vector<double> brute_force_all_pairs(int n, const std::vector<Link>& links) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<std::pair<int, double>>> adj(n);
  for (const Link& l : links) {
    adj[l.a].emplace_back(l.b, l.latency_ms);
    adj[l.b].emplace_back(l.a, l.latency_ms);
  }
  std::vector<double> dist(static_cast<std::size_t>(n) * n, inf);
  for (int s = 0; s < n; ++s) {
    std::vector<char> visited(static_cast<std::size_t>(n), 0);
    const auto dfs = [&](auto&& self, int u, double acc) -> void {
      if (acc < dist[static_cast<std::size_t>(s) * n + u]) {
        dist[static_cast<std::size_t>(s) * n + u] = acc;
      }
      visited[u] = 1;
      for (const auto& [v, w] : adj[u]) {
        if (!visited[v]) self(self, v, acc + w);
      }
      visited[u] = 0;
    };
    dfs(dfs, s, 0.0);
  }
  return dist;
}

// Connected topology with geographic coordinates: random spanning tree plus
// extra edges. Some nodes may share coordinates (zero-latency links).
inline Topology random_geo_topology(std::uint64_t seed, int min_nodes = 2, int max_nodes = 6) {
  Xoshiro256StarStar rng(seed);
  const int n = min_nodes +
                static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_nodes - min_nodes + 1)));
  std::vector<Node> nodes(static_cast<std::size_t>(n));
  const auto coord = [&](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng.next() >> 11) * 0x1.0p-53);
  };
  for (int i = 0; i < n; ++i) {
    nodes[i].id = i;
    nodes[i].label = "n" + std::to_string(i);
    if (i > 0 && rng.next_below(10) == 0) {
      nodes[i].latitude = nodes[i - 1].latitude;  // co-located pair
      nodes[i].longitude = nodes[i - 1].longitude;
    } else {
      nodes[i].latitude = coord(-60.0, 60.0);
      nodes[i].longitude = coord(-170.0, 170.0);
    }
    nodes[i].has_coords = true;
  }
  std::vector<std::pair<int, int>> edges;
  for (int i = 1; i < n; ++i) {
    edges.emplace_back(static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i))), i);
  }
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (rng.next_below(10) < 3) edges.emplace_back(a, b);
    }
  }
  return Topology::from_nodes(std::move(nodes), edges, "geo" + std::to_string(seed));
}

// Connected topology with small integer link latencies: exact arithmetic and
// plenty of exact ties, which stresses the deterministic tie-breaking.
inline Topology random_weight_topology(std::uint64_t seed, int min_nodes = 2, int max_nodes = 6) {
  Xoshiro256StarStar rng(seed);
  const int n = min_nodes +
                static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_nodes - min_nodes + 1)));
  std::vector<Link> links;
  for (int i = 1; i < n; ++i) {
    const int parent = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i)));
    links.push_back(Link{parent, i, static_cast<double>(1 + rng.next_below(3))});
  }
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (rng.next_below(10) < 3) {
        links.push_back(Link{a, b, static_cast<double>(rng.next_below(4))});  // may be 0
      }
    }
  }
  return Topology::from_links(n, std::move(links), "w" + std::to_string(seed));
}

inline Topology random_small_topology(std::uint64_t seed, int min_nodes = 2, int max_nodes = 6) {
  return seed % 2 == 0 ? random_geo_topology(seed, min_nodes, max_nodes)
                       : random_weight_topology(seed, min_nodes, max_nodes);
}

// Scenario with at most 4 control paths and k <= 2, matching the oracle's
// comfortable range.
inline Scenario random_small_scenario(const Topology& t, std::uint64_t seed) {
  Xoshiro256StarStar rng(seed);
  const int k = 1 + static_cast<int>(rng.next_below(std::min(2, t.n_nodes())));
  const int n_vsdns = 1 + static_cast<int>(rng.next_below(2));
  const SizeRange range{1, std::min(2, t.n_nodes())};
  return generate_scenario(t, n_vsdns, k, rng.next(), range);
}

// Valid but otherwise arbitrary placement: random distinct locations, random
// serving entities.
inline Placement random_placement(const Topology& t, const Scenario& s, std::uint64_t seed) {
  Xoshiro256StarStar rng(seed);
  Placement pl;
  pl.locations = sample_without_replacement(rng, t.n_nodes(), s.k);
  // Shuffle entity order so labels are not tied to sorted node order.
  for (int e = s.k - 1; e > 0; --e) {
    const int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(e + 1)));
    std::swap(pl.locations[e], pl.locations[j]);
  }
  for (const Vcp& p : s.vcps()) {
    pl.assignment[key_of(p)] = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(s.k)));
  }
  return pl;
}

}  // namespace dhpp::test

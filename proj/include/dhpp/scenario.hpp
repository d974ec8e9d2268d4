#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dhpp/topology.hpp"

namespace dhpp {

// One tenant network: its controller node plus the substrate nodes hosting
// its virtual switches.
struct Vsdn {
  int id = 0;
  int controller = 0;
  std::vector<int> switches;  // sorted ascending, no duplicates
};

// One (tenant controller, virtual switch) pair. Every Vcp is served by
// exactly one hypervisor entity once a placement is chosen.
struct Vcp {
  int vsdn_id = 0;
  int controller = 0;
  int switch_node = 0;
};

struct SizeRange {
  int min = 2;
  int max = 10;
};

// Default vSDN size range on a topology with n nodes.
SizeRange default_size_range(int n_nodes);

struct Scenario {
  std::string topology_ref;
  int k = 1;  // number of hypervisor entities to place
  std::uint64_t seed = 0;
  SizeRange size_range;
  std::vector<Vsdn> vsdns;

  // All control paths, ordered by (vsdn id, switch node). This order is the
  // canonical Vcp indexing used throughout the solver.
  std::vector<Vcp> vcps() const;
};

// Deterministically embeds `n_vsdns` tenant networks: for each, a size drawn
// uniformly from size_range, a controller node drawn uniformly, and that many
// switch nodes drawn uniformly without replacement. Identical inputs yield an
// identical Scenario on every platform (see rng.hpp).
Scenario generate_scenario(const Topology& t, int n_vsdns, int k, std::uint64_t seed,
                           SizeRange size_range, std::string topology_ref = {});

// Returns a copy of `s` with one more vSDN drawn from the same distribution
// under `event_seed`, plus the new vSDN itself. `s` is not modified.
std::pair<Scenario, Vsdn> add_vsdn(const Scenario& s, const Topology& t,
                                   std::uint64_t event_seed);

// XOR-mask applied to a scenario seed to derive the seed of its first
// growth event, keeping the event draw independent of the initial embedding.
inline constexpr std::uint64_t kAddEventSeedXor = 0x9E3779B97F4A7C15ull;

}  // namespace dhpp

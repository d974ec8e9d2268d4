#pragma once

#include <compare>
#include <map>
#include <string>
#include <vector>

#include "dhpp/scenario.hpp"
#include "dhpp/topology.hpp"

namespace dhpp {

// Identifies a control path across scenarios (a vSDN's controller node is
// fixed, so the pair below is unique).
struct VcpKey {
  int vsdn_id = 0;
  int switch_node = 0;
  auto operator<=>(const VcpKey&) const = default;
};

inline VcpKey key_of(const Vcp& v) { return VcpKey{v.vsdn_id, v.switch_node}; }

// A full decision: where each hypervisor entity sits and which entity serves
// each control path. Entity locations are pairwise distinct substrate nodes.
struct Placement {
  std::vector<int> locations;        // entity id -> node id
  std::map<VcpKey, int> assignment;  // control path -> entity id

  int k() const { return static_cast<int>(locations.size()); }
  bool covers(const VcpKey& key) const { return assignment.count(key) != 0; }
  int entity_of(const VcpKey& key) const;   // throws UncoveredVcp
  int serving_node(const VcpKey& key) const;

  bool operator==(const Placement&) const = default;
};

struct ObjectiveValues {
  double l_avg_ms = 0.0;
  long r_loc = 0;
  long r_hv = 0;

  bool operator==(const ObjectiveValues&) const = default;
};

struct VcpReconfig {
  bool loc_changed = false;
  bool hv_changed = false;
};

struct ReconfigReport {
  std::vector<VcpReconfig> per_vcp;  // aligned with the vcp list passed in
  long r_loc = 0;
  long r_hv = 0;
};

// Control-plane latency of one path through a hypervisor at `hv_node`:
// controller -> hypervisor -> switch over shortest paths.
double vcp_latency_ms(const Topology& t, const Vcp& p, int hv_node);

// Mean control-plane latency over all paths of the scenario. Summation runs
// in canonical vcp order; every budget comparison in the solver uses this
// exact routine, so equality checks against it are bit-exact.
double eval_avg_latency_ms(const Topology& t, const Scenario& s, const Placement& pl);

// Counts, per control path, whether its serving node moved (loc) and whether
// its serving entity identity changed (hv) between two placements. Paths not
// covered by `old_p` are new arrivals: they have nothing to change and
// contribute zero to both totals.
ReconfigReport count_reconfigurations(const Placement& old_p, const Placement& new_p,
                                      const std::vector<Vcp>& vcps);

// Returns all invariant violations of `pl` as a placement for `s` (empty
// means valid): distinct in-range locations, exactly one entity per path,
// no dangling assignment entries.
std::vector<std::string> validate_placement(const Topology& t, const Scenario& s,
                                            const Placement& pl);

}  // namespace dhpp

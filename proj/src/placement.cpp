#include "dhpp/placement.hpp"

#include <set>
#include <string>

#include "dhpp/errors.hpp"

namespace dhpp {

int Placement::entity_of(const VcpKey& key) const {
  const auto it = assignment.find(key);
  if (it == assignment.end()) {
    throw UncoveredVcp("placement does not cover VCP (vsdn " + std::to_string(key.vsdn_id) +
                       ", switch " + std::to_string(key.switch_node) + ")");
  }
  return it->second;
}

int Placement::serving_node(const VcpKey& key) const { return locations.at(entity_of(key)); }

double vcp_latency_ms(const Topology& t, const Vcp& p, int hv_node) {
  return t.dist(p.controller, hv_node) + t.dist(hv_node, p.switch_node);
}

double eval_avg_latency_ms(const Topology& t, const Scenario& s, const Placement& pl) {
  const std::vector<Vcp> vcps = s.vcps();
  if (vcps.empty()) throw EmptyScenario("scenario has no control paths");
  double sum = 0.0;
  for (const Vcp& p : vcps) {
    sum += vcp_latency_ms(t, p, pl.locations.at(pl.entity_of(key_of(p))));
  }
  return sum / static_cast<double>(vcps.size());
}

ReconfigReport count_reconfigurations(const Placement& old_p, const Placement& new_p,
                                      const std::vector<Vcp>& vcps) {
  if (old_p.k() != new_p.k()) {
    throw EntityUniverseMismatch("placements have different entity counts: " +
                                 std::to_string(old_p.k()) + " vs " + std::to_string(new_p.k()));
  }
  ReconfigReport report;
  report.per_vcp.reserve(vcps.size());
  for (const Vcp& p : vcps) {
    const VcpKey key = key_of(p);
    const int new_entity = new_p.entity_of(key);  // throws UncoveredVcp if absent
    VcpReconfig flags;
    if (old_p.covers(key)) {
      const int old_entity = old_p.entity_of(key);
      flags.loc_changed = new_p.locations.at(new_entity) != old_p.locations.at(old_entity);
      flags.hv_changed = new_entity != old_entity;
    }
    report.r_loc += flags.loc_changed ? 1 : 0;
    report.r_hv += flags.hv_changed ? 1 : 0;
    report.per_vcp.push_back(flags);
  }
  return report;
}

std::vector<std::string> validate_placement(const Topology& t, const Scenario& s,
                                            const Placement& pl) {
  std::vector<std::string> violations;
  const int n = t.n_nodes();
  if (pl.k() != s.k) {
    violations.push_back("placement has " + std::to_string(pl.k()) + " entities, scenario needs " +
                         std::to_string(s.k));
  }
  std::set<int> seen;
  for (int e = 0; e < pl.k(); ++e) {
    const int node = pl.locations[e];
    if (node < 0 || node >= n) {
      violations.push_back("entity " + std::to_string(e) + " placed on unknown node " +
                           std::to_string(node));
      continue;
    }
    if (!seen.insert(node).second) {
      violations.push_back("duplicate location: node " + std::to_string(node) +
                           " hosts more than one entity");
    }
  }
  std::set<VcpKey> scenario_keys;
  for (const Vcp& p : s.vcps()) {
    const VcpKey key = key_of(p);
    scenario_keys.insert(key);
    const auto it = pl.assignment.find(key);
    if (it == pl.assignment.end()) {
      violations.push_back("uncovered VCP (vsdn " + std::to_string(key.vsdn_id) + ", switch " +
                           std::to_string(key.switch_node) + ")");
    } else if (it->second < 0 || it->second >= pl.k()) {
      violations.push_back("VCP (vsdn " + std::to_string(key.vsdn_id) + ", switch " +
                           std::to_string(key.switch_node) + ") assigned to unknown entity " +
                           std::to_string(it->second));
    }
  }
  for (const auto& [key, entity] : pl.assignment) {
    if (!scenario_keys.count(key)) {
      violations.push_back("assignment references VCP (vsdn " + std::to_string(key.vsdn_id) +
                           ", switch " + std::to_string(key.switch_node) +
                           ") that is not part of the scenario");
    }
  }
  return violations;
}

}  // namespace dhpp

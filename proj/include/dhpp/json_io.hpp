#pragma once

#include <string>

#include <json.hpp>

#include "dhpp/harness.hpp"
#include "dhpp/placement.hpp"
#include "dhpp/scenario.hpp"
#include "dhpp/solver.hpp"

namespace dhpp {

using json = nlohmann::json;

// Scenario file:
// {"rng": "...", "topology_ref": "...", "k": 3, "seed": 7,
//  "size_range": [2, 10],
//  "vsdns": [{"id": 0, "controller": 4, "switches": [1, 9]}, ...]}
json scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const json& j);

// Placement file:
// {"locations": {"0": 4, "1": 17},
//  "assignment": [{"vsdn": 0, "controller": 4, "switch": 9, "entity": 1}, ...]}
// The controller field is informational; identity is (vsdn, switch).
json placement_to_json(const Placement& pl, const Scenario& s);
Placement placement_from_json(const json& j);

// Solve outcome. Reconfiguration fields appear only when the solve ran
// against a prior placement.
json outcome_to_json(const SolveOutcome& out, const Scenario& s, bool with_reconfig,
                     const std::string& solver_name);

json sweep_config_to_json(const SweepConfig& cfg);
// Missing fields fall back to default_sweep_config() (topology path excepted).
SweepConfig sweep_config_from_json(const json& j);

json aggregate_to_json(const AggregateTable& table);
json sweep_summary_to_json(const SweepResult& result);

json load_json_file(const std::string& path);
void save_json_file(const json& j, const std::string& path);

}  // namespace dhpp

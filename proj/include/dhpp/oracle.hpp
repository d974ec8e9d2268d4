#pragma once

#include "dhpp/placement.hpp"
#include "dhpp/scenario.hpp"
#include "dhpp/solver.hpp"
#include "dhpp/topology.hpp"

namespace dhpp {

// Which objective prefix the oracle optimizes. `full` mirrors the complete
// staged pipeline: filter by the relaxed latency budget, minimize node
// changes, then entity changes.
enum class OracleStage { latency = 1, node_changes = 2, full = 3 };

// Upper bound on the number of placements the oracle may enumerate.
inline constexpr double kOracleGuardLimit = 1e7;

// Number of placements (ordered injective location tuples times assignment
// vectors) a brute-force run would enumerate; +inf once it exceeds the guard.
double oracle_search_space(const Topology& t, const Scenario& s);

// Enumerates every placement outright and applies the same tie-breaking
// order as the staged solver. Structurally independent verification path:
// objective values come from raw enumeration, never from the staged search.
// Throws InstanceTooLarge when the search space exceeds kOracleGuardLimit.
SolveOutcome brute_force_oracle(const Topology& t, const Scenario& s, const Placement& prior,
                                double rho, OracleStage stage = OracleStage::full);

}  // namespace dhpp

#pragma once

#include <optional>

#include "dhpp/placement.hpp"
#include "dhpp/scenario.hpp"
#include "dhpp/topology.hpp"

namespace dhpp {

// How to run the location-set scan. `parallel` uses OpenMP across the
// first-level branches of the enumeration; `serial` is the straightforward
// reference loop kept for testing and benchmarking. Both produce identical
// outcomes; only wall time differs.
enum class Exec { serial, parallel };

struct StageBounds {
  double l_star_ms = 0.0;        // latency optimum of the first stage
  double rho = 0.0;              // relaxation factor applied to l_star
  double latency_budget_ms = 0.0;  // (1 + rho) * l_star, carried verbatim
  std::optional<long> r_loc_star;  // serving-node change optimum (after stage 2)
};

struct SolveOutcome {
  Placement placement;
  ObjectiveValues objectives;  // re-evaluated from placement, bit-exact
  StageBounds bounds;
  double solve_time_ms = 0.0;
  long long nodes_explored = 0;  // location sets evaluated (placements, for the oracle)
};

// Stage 1: minimize mean control-plane latency over all placements.
// Deterministic: ties between location sets break toward the
// lexicographically smallest sorted node tuple, each path serves its
// cheapest in-set node (smallest id on latency ties), and entity labels
// follow sorted location order.
SolveOutcome solve_stage1(const Topology& t, const Scenario& s, Exec exec = Exec::parallel);

// Stage 2: minimize the number of serving-node changes against `prior`,
// subject to mean latency <= bounds.latency_budget_ms. Paths the prior does
// not cover are new arrivals and never count as changed.
SolveOutcome solve_stage2(const Topology& t, const Scenario& s, const Placement& prior,
                          const StageBounds& bounds, Exec exec = Exec::parallel);

// Stage 3: minimize the number of serving-entity changes, subject to the
// latency budget and to r_loc <= bounds.r_loc_star. Entity labels matter
// here: the solver additionally chooses which entity sits on which chosen
// node.
SolveOutcome solve_stage3(const Topology& t, const Scenario& s, const Placement& prior,
                          const StageBounds& bounds, Exec exec = Exec::parallel);

// Runs stages 1 -> 2 -> 3, threading the bounds: the stage-1 optimum l*
// yields the budget (1 + rho) * l*, and the stage-2 optimum caps stage 3.
// With rho = 0 the result is the lexicographic optimum of
// (latency, node changes, entity changes).
SolveOutcome solve_multistage(const Topology& t, const Scenario& s, const Placement& prior,
                              double rho, Exec exec = Exec::parallel);

}  // namespace dhpp

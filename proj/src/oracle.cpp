#include "dhpp/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "dhpp/errors.hpp"

namespace dhpp {
namespace {

struct Candidate {
  double l_avg = 0.0;
  long r_loc = 0;
  long r_hv = 0;
  std::vector<int> locations;            // entity -> node (the labeling)
  std::vector<int> sorted_locations;
  std::vector<int> assignment;           // path -> entity
  std::vector<std::pair<double, int>> wsv;  // per path (latency, serving node)
};

// Total preference order among objective-tied candidates; see solver.cpp for
// the contract. Returns true when a is strictly preferred over b.
bool key_less(const Candidate& a, const Candidate& b, OracleStage stage) {
  if (a.sorted_locations != b.sorted_locations) return a.sorted_locations < b.sorted_locations;
  if (stage == OracleStage::full) {
    if (a.locations != b.locations) return a.locations < b.locations;
    return a.wsv < b.wsv;
  }
  if (a.wsv != b.wsv) return a.wsv < b.wsv;
  return a.locations < b.locations;
}

bool candidate_less(const Candidate& a, const Candidate& b, OracleStage stage) {
  switch (stage) {
    case OracleStage::latency:
      if (a.l_avg != b.l_avg) return a.l_avg < b.l_avg;
      break;
    case OracleStage::node_changes:
      if (a.r_loc != b.r_loc) return a.r_loc < b.r_loc;
      break;
    case OracleStage::full:
      if (a.r_loc != b.r_loc) return a.r_loc < b.r_loc;
      if (a.r_hv != b.r_hv) return a.r_hv < b.r_hv;
      break;
  }
  return key_less(a, b, stage);
}

template <class Fn>
void for_each_injective_tuple(int n, int k, Fn&& fn) {
  std::vector<int> loc(static_cast<std::size_t>(k), -1);
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  const auto recurse = [&](auto&& self, int depth) -> void {
    if (depth == k) {
      fn(loc);
      return;
    }
    for (int node = 0; node < n; ++node) {
      if (used[node]) continue;
      used[node] = 1;
      loc[depth] = node;
      self(self, depth + 1);
      used[node] = 0;
    }
  };
  recurse(recurse, 0);
}

}  // namespace

double oracle_search_space(const Topology& t, const Scenario& s) {
  const int n = t.n_nodes();
  const int k = s.k;
  const auto n_vcps = s.vcps().size();
  double total = 1.0;
  for (int i = 0; i < k; ++i) {
    total *= static_cast<double>(n - i);  // C(n,k) * k! in one product
    if (total > kOracleGuardLimit) return std::numeric_limits<double>::infinity();
  }
  for (std::size_t p = 0; p < n_vcps; ++p) {
    total *= static_cast<double>(k);
    if (total > kOracleGuardLimit) return std::numeric_limits<double>::infinity();
  }
  return total;
}

SolveOutcome brute_force_oracle(const Topology& t, const Scenario& s, const Placement& prior,
                                double rho, OracleStage stage) {
  const auto t0 = std::chrono::steady_clock::now();
  if (rho < 0.0 || !std::isfinite(rho)) {
    throw InvalidParameter("relaxation factor must be finite and non-negative");
  }
  const int n = t.n_nodes();
  const int k = s.k;
  if (k < 1 || k > n) {
    throw InfeasibleK("cannot place " + std::to_string(k) + " entities on " + std::to_string(n) +
                      " distinct nodes");
  }
  if (prior.k() != k) {
    throw EntityUniverseMismatch("prior placement has " + std::to_string(prior.k()) +
                                 " entities, scenario needs " + std::to_string(k));
  }
  const std::vector<Vcp> vcps = s.vcps();
  const int P = static_cast<int>(vcps.size());
  if (P == 0) throw EmptyScenario("scenario has no control paths");
  const double space = oracle_search_space(t, s);
  if (!(space <= kOracleGuardLimit)) {
    throw InstanceTooLarge("oracle search space exceeds the guard of " +
                           std::to_string(static_cast<long long>(kOracleGuardLimit)) +
                           " placements");
  }

  // Prior view per path; arrivals the prior does not cover never count as
  // reconfigured.
  std::vector<char> covered(static_cast<std::size_t>(P), 0);
  std::vector<int> prior_entity(static_cast<std::size_t>(P), -1);
  std::vector<int> prior_node(static_cast<std::size_t>(P), -1);
  for (int p = 0; p < P; ++p) {
    const auto it = prior.assignment.find(key_of(vcps[p]));
    if (it == prior.assignment.end()) continue;
    covered[p] = 1;
    prior_entity[p] = it->second;
    prior_node[p] = prior.locations.at(it->second);
  }

  const double pd = static_cast<double>(P);
  const auto mean_latency = [&](const std::vector<int>& loc, const std::vector<int>& assign) {
    double sum = 0.0;
    for (int p = 0; p < P; ++p) sum += vcp_latency_ms(t, vcps[p], loc[assign[p]]);
    return sum / pd;
  };

  const auto for_each_assignment = [&](auto&& fn) {
    std::vector<int> assign(static_cast<std::size_t>(P), 0);
    while (true) {
      fn(assign);
      int i = P - 1;
      while (i >= 0 && assign[i] == k - 1) {
        assign[i] = 0;
        --i;
      }
      if (i < 0) break;
      ++assign[i];
    }
  };

  // Pass 1: the unconstrained latency optimum.
  double l_star = std::numeric_limits<double>::infinity();
  for_each_injective_tuple(n, k, [&](const std::vector<int>& loc) {
    for_each_assignment([&](const std::vector<int>& assign) {
      l_star = std::min(l_star, mean_latency(loc, assign));
    });
  });

  const double budget = (1.0 + rho) * l_star;

  // Pass 2: optimize the requested objective prefix under the budget.
  Candidate best;
  bool found = false;
  long long enumerated = 0;
  Candidate cand;
  for_each_injective_tuple(n, k, [&](const std::vector<int>& loc) {
    for_each_assignment([&](const std::vector<int>& assign) {
      ++enumerated;
      const double l_avg = mean_latency(loc, assign);
      if (stage != OracleStage::latency && l_avg > budget) return;
      cand.l_avg = l_avg;
      cand.r_loc = 0;
      cand.r_hv = 0;
      for (int p = 0; p < P; ++p) {
        if (!covered[p]) continue;
        if (loc[assign[p]] != prior_node[p]) ++cand.r_loc;
        if (assign[p] != prior_entity[p]) ++cand.r_hv;
      }
      cand.locations = loc;
      cand.assignment = assign;
      cand.sorted_locations = loc;
      std::sort(cand.sorted_locations.begin(), cand.sorted_locations.end());
      cand.wsv.resize(static_cast<std::size_t>(P));
      for (int p = 0; p < P; ++p) {
        const int h = loc[assign[p]];
        cand.wsv[p] = {vcp_latency_ms(t, vcps[p], h), h};
      }
      if (!found || candidate_less(cand, best, stage)) {
        best = cand;
        found = true;
      }
    });
  });
  if (!found) throw InfeasibleBudget("oracle found no placement within the budget");

  SolveOutcome out;
  out.placement.locations = best.locations;
  for (int p = 0; p < P; ++p) {
    out.placement.assignment[key_of(vcps[p])] = best.assignment[p];
  }
  out.objectives.l_avg_ms = best.l_avg;
  out.objectives.r_loc = best.r_loc;
  out.objectives.r_hv = best.r_hv;
  out.bounds.l_star_ms = l_star;
  out.bounds.rho = rho;
  out.bounds.latency_budget_ms = budget;
  if (stage != OracleStage::latency) out.bounds.r_loc_star = best.r_loc;
  out.nodes_explored = enumerated;
  out.solve_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace dhpp

#include "dhpp/solver.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dhpp/errors.hpp"

// Exact staged search.
//
// Every stage shares one structural fact: once the set S of hypervisor
// locations is fixed, each control path chooses its serving node inside S
// independently (stage 3 additionally couples paths through the entity
// labeling of S). So each stage enumerates the C(N,k) location sets and
// solves a per-set subproblem exactly.
//
// Determinism contract (mirrored by the brute-force oracle in oracle.cpp):
// among placements optimal for a stage's objective and feasible for its
// constraints, the returned one minimizes, in order,
//   1. the sorted location tuple (lexicographically),
//   2. stage 3 only: the entity->node vector (lexicographically),
//   3. the per-path vector of (serving latency, serving node) pairs, compared
//      lexicographically over paths in canonical order,
//   4. stages 1-2: the entity->node vector, which sorted labeling minimizes.
//
// Latency feasibility is always decided by the same summation the public
// evaluator uses (per-path values added in canonical order, then divided),
// so reported objectives re-evaluate bit-exactly. Real-valued running sums
// appear only as search guides with a small slack; they never decide
// feasibility on their own.

namespace dhpp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSumSlack = 1e-12;

// ---------------------------------------------------------------------------
// Instance: the solver's working view of (topology, scenario, prior).

struct Instance {
  const Topology* topo = nullptr;
  const Scenario* scenario = nullptr;
  int n = 0;
  int k = 0;
  int n_vcps = 0;
  std::vector<Vcp> vcps;
  std::vector<double> w;   // path-major: w[p*n + h]
  std::vector<double> wt;  // node-major transpose: wt[h*P + p]

  bool has_prior = false;
  std::vector<char> covered;
  std::vector<int> prior_entity;
  std::vector<int> prior_node;
  std::vector<int> prior_locations;
  std::vector<long> entity_vcp_count;
  long covered_count = 0;

  double lat(int p, int h) const { return w[static_cast<std::size_t>(p) * n + h]; }
};

Instance build_instance(const Topology& t, const Scenario& s, const Placement* prior) {
  Instance inst;
  inst.topo = &t;
  inst.scenario = &s;
  inst.n = t.n_nodes();
  inst.k = s.k;
  if (s.k < 1 || s.k > inst.n) {
    throw InfeasibleK("cannot place " + std::to_string(s.k) + " entities on " +
                      std::to_string(inst.n) + " distinct nodes");
  }
  inst.vcps = s.vcps();
  inst.n_vcps = static_cast<int>(inst.vcps.size());
  if (inst.n_vcps == 0) throw EmptyScenario("scenario has no control paths");

  const int n = inst.n;
  const int P = inst.n_vcps;
  inst.w.resize(static_cast<std::size_t>(P) * n);
  inst.wt.resize(static_cast<std::size_t>(P) * n);
  for (int p = 0; p < P; ++p) {
    for (int h = 0; h < n; ++h) {
      const double v = vcp_latency_ms(t, inst.vcps[p], h);
      inst.w[static_cast<std::size_t>(p) * n + h] = v;
      inst.wt[static_cast<std::size_t>(h) * P + p] = v;
    }
  }

  inst.covered.assign(P, 0);
  inst.prior_entity.assign(P, -1);
  inst.prior_node.assign(P, -1);
  if (prior != nullptr) {
    if (prior->k() != s.k) {
      throw EntityUniverseMismatch("prior placement has " + std::to_string(prior->k()) +
                                   " entities, scenario needs " + std::to_string(s.k));
    }
    for (int e = 0; e < prior->k(); ++e) {
      const int node = prior->locations[e];
      if (node < 0 || node >= n) {
        throw InvalidParameter("prior placement puts entity " + std::to_string(e) +
                               " on unknown node " + std::to_string(node));
      }
    }
    inst.has_prior = true;
    inst.prior_locations = prior->locations;
    inst.entity_vcp_count.assign(static_cast<std::size_t>(s.k), 0);
    for (int p = 0; p < P; ++p) {
      const auto it = prior->assignment.find(key_of(inst.vcps[p]));
      if (it == prior->assignment.end()) continue;
      const int e = it->second;
      if (e < 0 || e >= s.k) {
        throw InvalidParameter("prior placement assigns a path to unknown entity " +
                               std::to_string(e));
      }
      inst.covered[p] = 1;
      inst.prior_entity[p] = e;
      inst.prior_node[p] = prior->locations[e];
      ++inst.entity_vcp_count[e];
      ++inst.covered_count;
    }
  }
  return inst;
}

// ---------------------------------------------------------------------------
// Location-set scan engines.

struct LeafView {
  const int* nodes;       // the k chosen nodes, ascending
  const double* min_lat;  // per path: cheapest latency over the chosen set
  const char* in_set;     // node membership flags
};

template <class Visitor>
struct ScanResult {
  bool found = false;
  typename Visitor::Value value{};
  std::vector<int> nodes;
  long long leaves = 0;
};

// Reference implementation: plain lexicographic combination loop, per-set
// minima recomputed from scratch. Kept simple on purpose; the parallel
// engine must agree with it exactly.
template <class Visitor>
ScanResult<Visitor> scan_serial(const Instance& inst, Visitor vis) {
  using Value = typename Visitor::Value;
  const int n = inst.n;
  const int k = inst.k;
  const int P = inst.n_vcps;

  ScanResult<Visitor> best;
  std::vector<int> c(static_cast<std::size_t>(k));
  std::iota(c.begin(), c.end(), 0);
  std::vector<double> mins(static_cast<std::size_t>(P));
  std::vector<char> in_set(static_cast<std::size_t>(n), 0);
  const Value sentinel = Visitor::sentinel();

  while (true) {
    for (int i = 0; i < k; ++i) in_set[c[i]] = 1;
    for (int p = 0; p < P; ++p) {
      double m = inst.lat(p, c[0]);
      for (int i = 1; i < k; ++i) m = std::min(m, inst.lat(p, c[i]));
      mins[p] = m;
    }
    ++best.leaves;
    const LeafView view{c.data(), mins.data(), in_set.data()};
    const Value bound = best.found ? best.value : sentinel;
    if (auto value = vis.evaluate(view, bound)) {
      if (!best.found || *value < best.value) {
        best.found = true;
        best.value = *value;
        best.nodes.assign(c.begin(), c.end());
      }
    }
    for (int i = 0; i < k; ++i) in_set[c[i]] = 0;

    int i = k - 1;
    while (i >= 0 && c[i] == n - k + i) --i;
    if (i < 0) break;
    ++c[i];
    for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  }
  return best;
}

// Parallel engine: branches on the smallest chosen node, walks each branch
// depth-first with incrementally maintained per-path minima, and merges the
// per-branch winners in branch order. Branch b only contains sets whose
// sorted tuple starts with b, so the merge order equals the serial visit
// order and the tie-breaking is unchanged. A shared bound is published for
// pruning; visitors may skip only candidates strictly above it, so ties stay
// exact.
template <class Visitor>
struct BranchWalker {
  const Instance& inst;
  Visitor& vis;
  ScanResult<Visitor>& out;
  std::atomic<typename Visitor::Value>& shared;
  std::vector<int>& chosen;
  std::vector<double>& mins;  // k rows of P entries
  std::vector<char>& in_set;

  void leaf() {
    using Value = typename Visitor::Value;
    const int k = inst.k;
    ++out.leaves;
    const LeafView view{chosen.data(), &mins[static_cast<std::size_t>(k - 1) * inst.n_vcps],
                        in_set.data()};
    Value bound = out.found ? out.value : Visitor::sentinel();
    const Value published = shared.load(std::memory_order_relaxed);
    bound = std::min(bound, published);
    if (auto value = vis.evaluate(view, bound)) {
      if (!out.found || *value < out.value) {
        out.found = true;
        out.value = *value;
        out.nodes.assign(chosen.begin(), chosen.end());
        Value seen = shared.load(std::memory_order_relaxed);
        while (*value < seen &&
               !shared.compare_exchange_weak(seen, *value, std::memory_order_relaxed)) {
        }
      }
    }
  }

  void descend(int level, int first) {
    const int P = inst.n_vcps;
    const double* prev = &mins[static_cast<std::size_t>(level - 1) * P];
    double* cur = &mins[static_cast<std::size_t>(level) * P];
    for (int node = first; node <= inst.n - (inst.k - level); ++node) {
      chosen[level] = node;
      const double* wcol = &inst.wt[static_cast<std::size_t>(node) * P];
      for (int p = 0; p < P; ++p) cur[p] = std::min(prev[p], wcol[p]);
      in_set[node] = 1;
      if (level + 1 == inst.k) {
        leaf();
      } else {
        descend(level + 1, node + 1);
      }
      in_set[node] = 0;
    }
  }
};

template <class Visitor>
ScanResult<Visitor> scan_parallel(const Instance& inst, const Visitor& proto) {
  using Value = typename Visitor::Value;
  const int n = inst.n;
  const int k = inst.k;
  const int P = inst.n_vcps;
  const int n_first = n - k + 1;

  std::vector<ScanResult<Visitor>> branch(static_cast<std::size_t>(n_first));
  std::atomic<Value> shared{Visitor::sentinel()};

#ifdef _OPENMP
#pragma omp parallel
#endif
  {
    Visitor vis = proto;
    std::vector<int> chosen(static_cast<std::size_t>(k));
    std::vector<double> mins(static_cast<std::size_t>(k) * P);
    std::vector<char> in_set(static_cast<std::size_t>(n), 0);

#ifdef _OPENMP
#pragma omp for schedule(dynamic)
#endif
    for (int f = 0; f < n_first; ++f) {
      BranchWalker<Visitor> walker{inst, vis, branch[f], shared, chosen, mins, in_set};
      chosen[0] = f;
      const double* wcol = &inst.wt[static_cast<std::size_t>(f) * P];
      std::copy(wcol, wcol + P, mins.begin());
      in_set[f] = 1;
      if (k == 1) {
        walker.leaf();
      } else {
        walker.descend(1, f + 1);
      }
      in_set[f] = 0;
    }
  }

  ScanResult<Visitor> best;
  for (auto& b : branch) {
    best.leaves += b.leaves;
    if (b.found && (!best.found || b.value < best.value)) {
      best.found = true;
      best.value = b.value;
      best.nodes = std::move(b.nodes);
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Stage-2 subproblem: fewest serving-node changes within the budget.
//
// For a fixed set S, a covered path either keeps its prior node (possible iff
// that node is in S, cost 0) or counts as changed, in which case the cheapest
// node of S is optimal. Paths whose prior node is outside S and new paths are
// forced; among keepable paths, changing the largest latency savers first is
// optimal for any change count.

struct Stage2Scratch {
  std::vector<std::pair<double, int>> deltas;
  std::vector<int> rank;
};

std::optional<long> min_loc_changes(const Instance& inst, const LeafView& v, double budget,
                                    long bail_above, Stage2Scratch& scratch) {
  const int P = inst.n_vcps;
  const double pd = static_cast<double>(P);

  double sum_min = 0.0;
  double sum_base = 0.0;
  long r_base = 0;
  for (int p = 0; p < P; ++p) {
    const double mn = v.min_lat[p];
    sum_min += mn;
    double base = mn;
    if (inst.covered[p]) {
      const int o = inst.prior_node[p];
      if (v.in_set[o]) {
        base = inst.lat(p, o);
      } else {
        ++r_base;
      }
    }
    sum_base += base;
  }
  if (sum_min / pd > budget) return std::nullopt;  // set infeasible outright
  if (r_base > bail_above) return std::nullopt;    // cannot beat the bound
  if (sum_base / pd <= budget) return r_base;

  auto& deltas = scratch.deltas;
  deltas.clear();
  for (int p = 0; p < P; ++p) {
    if (!inst.covered[p]) continue;
    const int o = inst.prior_node[p];
    if (!v.in_set[o]) continue;
    const double d = inst.lat(p, o) - v.min_lat[p];
    if (d > 0.0) deltas.emplace_back(d, p);
  }
  std::sort(deltas.begin(), deltas.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  auto& rank = scratch.rank;
  rank.assign(static_cast<std::size_t>(P), -1);
  for (std::size_t i = 0; i < deltas.size(); ++i) rank[deltas[i].second] = static_cast<int>(i);

  const auto canonical_mean_at = [&](std::size_t q) {
    double s = 0.0;
    for (int p = 0; p < P; ++p) {
      double val = v.min_lat[p];
      if (!(rank[p] >= 0 && rank[p] < static_cast<int>(q)) && inst.covered[p]) {
        const int o = inst.prior_node[p];
        if (v.in_set[o]) val = inst.lat(p, o);
      }
      s += val;
    }
    return s / pd;
  };

  // Real-arithmetic estimate first, canonical evaluation settles the edge.
  const double hi = budget * pd * (1.0 + kSumSlack) + 1e-300;
  double total = sum_base;
  std::size_t q_est = 0;
  while (q_est < deltas.size() && total > hi) {
    total -= deltas[q_est].first;
    ++q_est;
  }
  for (std::size_t q = q_est >= 2 ? q_est - 2 : 0; q <= deltas.size(); ++q) {
    if (canonical_mean_at(q) <= budget) return r_base + static_cast<long>(q);
  }
  // q == deltas.size() reproduces sum_min bit for bit, which was feasible.
  throw std::logic_error("internal: change-count search fell through");
}

struct Stage1Visitor {
  using Value = double;
  static Value sentinel() { return kInf; }
  const Instance* inst;

  std::optional<double> evaluate(const LeafView& v, double) {
    double sum = 0.0;
    const int P = inst->n_vcps;
    for (int p = 0; p < P; ++p) sum += v.min_lat[p];
    return sum / static_cast<double>(P);
  }
};

struct Stage2Visitor {
  using Value = long;
  static Value sentinel() { return std::numeric_limits<long>::max(); }
  const Instance* inst;
  double budget = 0.0;
  Stage2Scratch scratch;

  std::optional<long> evaluate(const LeafView& v, long bound) {
    return min_loc_changes(*inst, v, budget, bound, scratch);
  }
};

// ---------------------------------------------------------------------------
// Stage-3 subproblem: fewest serving-entity changes under both the latency
// budget and the node-change cap, for a fixed set S and labeling lambda.
//
// A path avoids an entity change exactly when it serves its prior entity's
// new location lambda(e). The remaining freedom per covered path is keep
// (prior node, if in S), follow (lambda(e)), or the cheapest other node, so
// an exact DP over (node changes, entity changes) with per-cell minimum
// latencies solves the subproblem.

struct Top3 {
  std::array<double, 3> lat{kInf, kInf, kInf};
  std::array<int, 3> node{-1, -1, -1};

  void offer(double l, int h) {
    for (int i = 0; i < 3; ++i) {
      if (l < lat[i] || (l == lat[i] && h < node[i])) {
        for (int j = 2; j > i; --j) {
          lat[j] = lat[j - 1];
          node[j] = node[j - 1];
        }
        lat[i] = l;
        node[i] = h;
        return;
      }
    }
  }

  // Cheapest entry whose node differs from both exclusions.
  std::pair<double, int> cheapest_excluding(int e1, int e2) const {
    for (int i = 0; i < 3; ++i) {
      if (node[i] < 0) break;
      if (node[i] != e1 && node[i] != e2) return {lat[i], node[i]};
    }
    return {kInf, -1};
  }
};

struct HvOption {
  int dl = 0;
  int dh = 0;
  double lat = 0.0;
};

struct HvScratch {
  std::vector<Top3> top3;
  std::vector<int> perm;
  std::vector<double> dp;
  std::vector<double> dp_next;
  std::vector<std::uint8_t> choice;
  std::vector<double> chosen_lat;
  Stage2Scratch s2;
};

int build_hv_options(const Instance& inst, const LeafView& v, const std::vector<Top3>& top3,
                     const std::vector<int>& lambda, int p, HvOption out[3]) {
  if (!inst.covered[p]) {
    out[0] = HvOption{0, 0, v.min_lat[p]};
    return 1;
  }
  const int o = inst.prior_node[p];
  const int s_node = lambda[inst.prior_entity[p]];
  int cnt = 0;
  if (s_node == o) {
    out[cnt++] = HvOption{0, 0, inst.lat(p, o)};  // keep == follow
  } else {
    if (v.in_set[o]) out[cnt++] = HvOption{0, 1, inst.lat(p, o)};  // keep node, new entity
    out[cnt++] = HvOption{1, 0, inst.lat(p, s_node)};              // follow the entity
  }
  const auto [other_lat, other_node] = top3[p].cheapest_excluding(o, s_node);
  if (other_node >= 0) out[cnt++] = HvOption{1, 1, other_lat};
  return cnt;
}

// Minimum entity-change count for (S, lambda) that fits both constraints and
// does not exceed t_cap, or nullopt. Latency feasibility is decided by the
// canonical evaluation of a traced optimal completion.
std::optional<long> hv_optimum_for_lambda(const Instance& inst, const LeafView& v,
                                          const std::vector<int>& lambda, double budget, long cap,
                                          long t_cap, HvScratch& scratch) {
  const int P = inst.n_vcps;
  const double pd = static_cast<double>(P);

  if (t_cap < 0) return std::nullopt;

  // All-follow shortcut: the only way to reach zero entity changes.
  long moved = 0;
  for (int e = 0; e < inst.k; ++e) {
    if (lambda[e] != inst.prior_locations[e]) moved += inst.entity_vcp_count[e];
  }
  double follow_sum = 0.0;
  double phi_max = 0.0;
  for (int p = 0; p < P; ++p) {
    const double l = inst.covered[p] ? inst.lat(p, lambda[inst.prior_entity[p]]) : v.min_lat[p];
    follow_sum += l;
    phi_max = std::max(phi_max, l - v.min_lat[p]);
  }
  if (moved <= cap && follow_sum / pd <= budget) return 0;

  long lower = std::max(0L, moved - cap);
  if (follow_sum / pd > budget) {
    // Zero entity changes means all-follow, which just failed canonically.
    lower = std::max(lower, 1L);
    if (phi_max <= 0.0) return std::nullopt;  // nothing can reduce latency
    // Each deviating path saves at most phi_max. The slack admitted by the
    // canonical rounding must be discounted here, or the bound can prune a
    // completion whose rounded sum lands exactly on the budget.
    const double excess = follow_sum - budget * pd * (1.0 + kSumSlack) - 1e-300;
    if (excess > 0.0) {
      lower = std::max(lower, static_cast<long>(std::ceil(excess / phi_max)));
    }
  }
  if (lower > t_cap) return std::nullopt;

  const long max_j = std::min<long>(cap, inst.covered_count);
  const long max_t = std::min<long>(t_cap, inst.covered_count);
  if (max_t < lower) return std::nullopt;
  const std::size_t jdim = static_cast<std::size_t>(max_j) + 1;
  const std::size_t tdim = static_cast<std::size_t>(max_t) + 1;
  const std::size_t states = jdim * tdim;

  auto& dp = scratch.dp;
  auto& dp_next = scratch.dp_next;
  auto& choice = scratch.choice;
  dp.assign(states, kInf);
  dp_next.assign(states, kInf);
  choice.assign(static_cast<std::size_t>(P) * states, 0);
  dp[0] = 0.0;

  HvOption opts[3];
  long reach_j = 0;
  long reach_t = 0;
  for (int p = 0; p < P; ++p) {
    const int cnt = build_hv_options(inst, v, scratch.top3, lambda, p, opts);
    const long rj = std::min<long>(reach_j, max_j);
    const long rt = std::min<long>(reach_t, max_t);
    std::uint8_t* pchoice = &choice[static_cast<std::size_t>(p) * states];
    std::fill(dp_next.begin(), dp_next.end(), kInf);
    for (long j = 0; j <= rj; ++j) {
      for (long t = 0; t <= rt; ++t) {
        const double cur = dp[static_cast<std::size_t>(j) * tdim + t];
        if (cur == kInf) continue;
        for (int c = 0; c < cnt; ++c) {
          const long j2 = j + opts[c].dl;
          const long t2 = t + opts[c].dh;
          if (j2 > max_j || t2 > max_t) continue;
          const std::size_t idx = static_cast<std::size_t>(j2) * tdim + t2;
          const double cand = cur + opts[c].lat;
          if (cand < dp_next[idx]) {
            dp_next[idx] = cand;
            pchoice[idx] = static_cast<std::uint8_t>(c);
          }
        }
      }
    }
    dp.swap(dp_next);
    ++reach_j;
    ++reach_t;
  }

  const double hi = budget * pd * (1.0 + kSumSlack) + 1e-300;
  auto& chosen = scratch.chosen_lat;
  for (long t = lower; t <= max_t; ++t) {
    long j_best = -1;
    double best = kInf;
    for (long j = 0; j <= max_j; ++j) {
      const double val = dp[static_cast<std::size_t>(j) * tdim + t];
      if (val < best) {
        best = val;
        j_best = j;
      }
    }
    if (j_best < 0 || best > hi) continue;
    // Trace the optimal completion and settle feasibility canonically.
    chosen.assign(static_cast<std::size_t>(P), 0.0);
    long j = j_best;
    long tt = t;
    for (int p = P - 1; p >= 0; --p) {
      const int cnt = build_hv_options(inst, v, scratch.top3, lambda, p, opts);
      const int c = choice[static_cast<std::size_t>(p) * states +
                           static_cast<std::size_t>(j) * tdim + tt];
      if (c >= cnt) throw std::logic_error("internal: bad DP trace");
      chosen[p] = opts[c].lat;
      j -= opts[c].dl;
      tt -= opts[c].dh;
    }
    double s = 0.0;
    for (int p = 0; p < P; ++p) s += chosen[p];
    if (s / pd <= budget) return t;
  }
  return std::nullopt;
}

struct Stage3Visitor {
  using Value = long;
  static Value sentinel() { return std::numeric_limits<long>::max(); }
  const Instance* inst;
  double budget = 0.0;
  long cap = 0;
  HvScratch scratch;

  void build_top3(const LeafView& v) {
    const int P = inst->n_vcps;
    scratch.top3.assign(static_cast<std::size_t>(P), Top3{});
    for (int p = 0; p < P; ++p) {
      for (int i = 0; i < inst->k; ++i) {
        const int h = v.nodes[i];
        scratch.top3[p].offer(inst->lat(p, h), h);
      }
    }
  }

  std::optional<long> evaluate(const LeafView& v, long bound) {
    // The set must admit some assignment inside both constraints.
    const auto loc_min = min_loc_changes(*inst, v, budget, cap, scratch.s2);
    if (!loc_min || *loc_min > cap) return std::nullopt;

    build_top3(v);
    auto& perm = scratch.perm;
    perm.assign(v.nodes, v.nodes + inst->k);

    const long sent = sentinel();
    long t_best = sent;
    do {
      long gate = bound;
      if (t_best != sent) gate = std::min(gate, t_best - 1);
      if (gate < 0) break;  // zero reached; no labeling can do better
      const long t_cap = gate == sent ? inst->covered_count : gate;
      if (auto t = hv_optimum_for_lambda(*inst, v, perm, budget, cap, t_cap, scratch)) {
        t_best = std::min(t_best, *t);
      }
    } while (std::next_permutation(perm.begin(), perm.end()));

    if (t_best == sent) return std::nullopt;
    return t_best;
  }
};

// ---------------------------------------------------------------------------
// Canonical assignment construction for the winning set.
//
// The per-path serving choices are fixed position by position: each path
// takes the smallest (latency, node) candidate from which the remaining
// paths can still complete with the exact objective count and a feasible
// total. Completion feasibility is decided by a DP over canonically rounded
// running sums. IEEE rounding is monotone, so propagating per-state minima
// through the rounded additions is exact, and the accepted vector evaluates
// within budget under the public evaluator by construction.

std::vector<int> sorted_candidates(const Instance& inst, const std::vector<int>& nodes, int p) {
  std::vector<int> order(nodes);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double la = inst.lat(p, a);
    const double lb = inst.lat(p, b);
    if (la != lb) return la < lb;
    return a < b;
  });
  return order;
}

// Aggregated per-path option minima by flag combination. Within a flag cell
// a pointwise cheaper latency is always at least as feasible, so cell minima
// are exact for completion checks.
struct FlagCells {
  // Index is (node changed)*2 + (entity changed); the loc construction only
  // populates the entity-unchanged cells.
  std::vector<std::array<double, 4>> cell;
};

FlagCells loc_cells(const Instance& inst, const std::vector<int>& nodes,
                    const std::vector<char>& in_set) {
  const int P = inst.n_vcps;
  FlagCells cells;
  cells.cell.assign(static_cast<std::size_t>(P), {kInf, kInf, kInf, kInf});
  for (int p = 0; p < P; ++p) {
    double mn = kInf;
    double mn_excl = kInf;
    const int o = inst.covered[p] ? inst.prior_node[p] : -1;
    for (const int h : nodes) {
      const double l = inst.lat(p, h);
      mn = std::min(mn, l);
      if (h != o) mn_excl = std::min(mn_excl, l);
    }
    if (!inst.covered[p]) {
      cells.cell[p][0] = mn;
    } else {
      if (in_set[o]) cells.cell[p][0] = inst.lat(p, o);
      cells.cell[p][2] = mn_excl;  // node change lives in the dl bit
    }
  }
  return cells;
}

FlagCells hv_cells(const Instance& inst, const std::vector<int>& nodes,
                   const std::vector<char>& in_set, const std::vector<int>& lambda) {
  const int P = inst.n_vcps;
  FlagCells cells;
  cells.cell.assign(static_cast<std::size_t>(P), {kInf, kInf, kInf, kInf});
  for (int p = 0; p < P; ++p) {
    if (!inst.covered[p]) {
      double mn = kInf;
      for (const int h : nodes) mn = std::min(mn, inst.lat(p, h));
      cells.cell[p][0] = mn;
      continue;
    }
    const int o = inst.prior_node[p];
    const int s_node = lambda[inst.prior_entity[p]];
    double mn_other = kInf;
    for (const int h : nodes) {
      if (h == o || h == s_node) continue;
      mn_other = std::min(mn_other, inst.lat(p, h));
    }
    if (in_set[o]) cells.cell[p][s_node == o ? 0 : 1] = inst.lat(p, o);
    if (s_node != o) cells.cell[p][2] = inst.lat(p, s_node);
    cells.cell[p][3] = mn_other;
  }
  return cells;
}

// Smallest canonically rounded mean reachable from the rounded prefix sum
// `start`, over paths p0.., spending at most j_cap further node changes and
// exactly t_need further entity changes. The loc construction passes
// exact_j = true to pin the node-change count instead.
double exact_min_mean(const FlagCells& cells, int p0, int P, double pd, double start, long j_cap,
                      bool exact_j, long t_need) {
  const std::size_t jdim = static_cast<std::size_t>(j_cap) + 1;
  const std::size_t tdim = static_cast<std::size_t>(t_need) + 1;
  std::vector<double> cur(jdim * tdim, kInf);
  std::vector<double> next(jdim * tdim, kInf);
  cur[0] = start;
  for (int p = p0; p < P; ++p) {
    std::fill(next.begin(), next.end(), kInf);
    for (std::size_t j = 0; j < jdim; ++j) {
      for (std::size_t t = 0; t < tdim; ++t) {
        const double s = cur[j * tdim + t];
        if (s == kInf) continue;
        for (int c = 0; c < 4; ++c) {
          const double lat = cells.cell[p][c];
          if (lat == kInf) continue;
          const std::size_t j2 = j + static_cast<std::size_t>(c >> 1);
          const std::size_t t2 = t + static_cast<std::size_t>(c & 1);
          if (j2 >= jdim || t2 >= tdim) continue;
          const double cand = s + lat;
          double& slot = next[j2 * tdim + t2];
          if (cand < slot) slot = cand;
        }
      }
    }
    cur.swap(next);
  }
  double best = kInf;
  for (std::size_t j = exact_j ? jdim - 1 : 0; j < jdim; ++j) {
    best = std::min(best, cur[j * tdim + (tdim - 1)]);
  }
  return best == kInf ? kInf : best / pd;
}

std::vector<int> canonical_serving_loc(const Instance& inst, const std::vector<int>& nodes,
                                       long r_star, double budget) {
  const int P = inst.n_vcps;
  const double pd = static_cast<double>(P);
  std::vector<char> in_set(static_cast<std::size_t>(inst.n), 0);
  for (const int h : nodes) in_set[h] = 1;
  const FlagCells cells = loc_cells(inst, nodes, in_set);

  std::vector<int> serving(static_cast<std::size_t>(P), -1);
  double prefix = 0.0;
  long moved = 0;
  for (int p = 0; p < P; ++p) {
    for (const int h : sorted_candidates(inst, nodes, p)) {
      const long dl = (inst.covered[p] && h != inst.prior_node[p]) ? 1 : 0;
      const long j_rest = r_star - moved - dl;
      if (j_rest < 0) continue;
      const double with_h = prefix + inst.lat(p, h);
      if (exact_min_mean(cells, p + 1, P, pd, with_h, j_rest, true, 0) <= budget) {
        serving[p] = h;
        prefix = with_h;
        moved += dl;
        break;
      }
    }
    // Unreachable: the change-count optimum was certified by a completion
    // living in the same cell universe.
    if (serving[p] < 0) throw std::logic_error("internal: no completable serving node");
  }
  return serving;
}

std::vector<int> canonical_serving_hv(const Instance& inst, const std::vector<int>& nodes,
                                      const std::vector<int>& lambda, long t_star, long cap,
                                      double budget) {
  const int P = inst.n_vcps;
  const double pd = static_cast<double>(P);
  std::vector<char> in_set(static_cast<std::size_t>(inst.n), 0);
  for (const int h : nodes) in_set[h] = 1;
  const FlagCells cells = hv_cells(inst, nodes, in_set, lambda);

  // Cheap lower bound on any completion, used to skip hopeless candidates
  // before the exact check.
  std::vector<double> suffix_floor(static_cast<std::size_t>(P) + 1, 0.0);
  for (int p = P - 1; p >= 0; --p) {
    double mn = kInf;
    for (int c = 0; c < 4; ++c) mn = std::min(mn, cells.cell[p][c]);
    suffix_floor[p] = suffix_floor[p + 1] + mn;
  }
  const double reject_above = budget * pd * (1.0 + kSumSlack) + 1e-300;

  std::vector<int> serving(static_cast<std::size_t>(P), -1);
  double prefix = 0.0;
  long loc_used = 0;
  long hv_used = 0;
  for (int p = 0; p < P; ++p) {
    for (const int h : sorted_candidates(inst, nodes, p)) {
      const long dl = (inst.covered[p] && h != inst.prior_node[p]) ? 1 : 0;
      const long dh = (inst.covered[p] && h != lambda[inst.prior_entity[p]]) ? 1 : 0;
      const long t_rest = t_star - hv_used - dh;
      const long j_cap_rest = cap - loc_used - dl;
      if (t_rest < 0 || j_cap_rest < 0) continue;
      const double with_h = prefix + inst.lat(p, h);
      if (with_h + suffix_floor[p + 1] > reject_above) continue;
      const long j_dim = std::min<long>(j_cap_rest, P - p);
      const long t_dim = std::min<long>(t_rest, P - p);
      if (t_dim < t_rest) continue;  // not enough paths left to change
      if (exact_min_mean(cells, p + 1, P, pd, with_h, j_dim, false, t_rest) <= budget) {
        serving[p] = h;
        prefix = with_h;
        loc_used += dl;
        hv_used += dh;
        break;
      }
    }
    if (serving[p] < 0) throw std::logic_error("internal: no completable serving node");
  }
  return serving;
}


// ---------------------------------------------------------------------------
// Outcome assembly.

Placement placement_from_sorted(const Instance& inst, const std::vector<int>& nodes,
                                const std::vector<int>& serving) {
  Placement pl;
  pl.locations = nodes;  // ascending: entity e sits on the e-th smallest node
  for (int p = 0; p < inst.n_vcps; ++p) {
    const auto it = std::lower_bound(nodes.begin(), nodes.end(), serving[p]);
    pl.assignment[key_of(inst.vcps[p])] = static_cast<int>(it - nodes.begin());
  }
  return pl;
}

Placement placement_from_lambda(const Instance& inst, const std::vector<int>& lambda,
                                const std::vector<int>& serving) {
  Placement pl;
  pl.locations = lambda;
  std::vector<int> entity_at(static_cast<std::size_t>(inst.n), -1);
  for (int e = 0; e < inst.k; ++e) entity_at[lambda[e]] = e;
  for (int p = 0; p < inst.n_vcps; ++p) {
    pl.assignment[key_of(inst.vcps[p])] = entity_at[serving[p]];
  }
  return pl;
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

void check_internal(bool ok, const char* what) {
  if (!ok) throw std::logic_error(std::string("internal: ") + what);
}

SolveOutcome assemble(const Instance& inst, Placement pl, const Placement* prior,
                      StageBounds bounds, long long leaves,
                      std::chrono::steady_clock::time_point t0) {
  SolveOutcome out;
  out.objectives.l_avg_ms = eval_avg_latency_ms(*inst.topo, *inst.scenario, pl);
  if (prior != nullptr) {
    const ReconfigReport rep = count_reconfigurations(*prior, pl, inst.vcps);
    out.objectives.r_loc = rep.r_loc;
    out.objectives.r_hv = rep.r_hv;
  }
  check_internal(validate_placement(*inst.topo, *inst.scenario, pl).empty(),
                 "solver produced an invalid placement");
  out.placement = std::move(pl);
  out.bounds = bounds;
  out.nodes_explored = leaves;
  out.solve_time_ms = elapsed_ms(t0);
  return out;
}

template <class Visitor>
ScanResult<Visitor> run_scan(const Instance& inst, const Visitor& proto, Exec exec) {
  if (exec == Exec::serial) return scan_serial(inst, proto);
  return scan_parallel(inst, proto);
}

}  // namespace

SolveOutcome solve_stage1(const Topology& t, const Scenario& s, Exec exec) {
  const auto t0 = std::chrono::steady_clock::now();
  const Instance inst = build_instance(t, s, nullptr);

  Stage1Visitor proto{&inst};
  const auto best = run_scan(inst, proto, exec);
  check_internal(best.found, "latency scan found no placement");

  // Pointwise cheapest serving node, smallest id on ties.
  std::vector<int> serving(static_cast<std::size_t>(inst.n_vcps));
  for (int p = 0; p < inst.n_vcps; ++p) {
    double mn = kInf;
    int arg = -1;
    for (const int h : best.nodes) {
      const double l = inst.lat(p, h);
      if (l < mn) {
        mn = l;
        arg = h;
      }
    }
    serving[p] = arg;
  }
  Placement pl = placement_from_sorted(inst, best.nodes, serving);

  StageBounds bounds;
  bounds.l_star_ms = best.value;
  bounds.rho = 0.0;
  bounds.latency_budget_ms = best.value;

  SolveOutcome out = assemble(inst, std::move(pl), nullptr, bounds, best.leaves, t0);
  check_internal(out.objectives.l_avg_ms == best.value,
                 "latency objective does not re-evaluate to the scan value");
  return out;
}

SolveOutcome solve_stage2(const Topology& t, const Scenario& s, const Placement& prior,
                          const StageBounds& bounds, Exec exec) {
  const auto t0 = std::chrono::steady_clock::now();
  const Instance inst = build_instance(t, s, &prior);

  Stage2Visitor proto;
  proto.inst = &inst;
  proto.budget = bounds.latency_budget_ms;
  const auto best = run_scan(inst, proto, exec);
  if (!best.found) {
    throw InfeasibleBudget("no placement meets the latency budget of " +
                           std::to_string(bounds.latency_budget_ms) + " ms");
  }

  const std::vector<int> serving =
      canonical_serving_loc(inst, best.nodes, best.value, bounds.latency_budget_ms);
  Placement pl = placement_from_sorted(inst, best.nodes, serving);

  StageBounds out_bounds = bounds;
  out_bounds.r_loc_star = best.value;

  SolveOutcome out = assemble(inst, std::move(pl), &prior, out_bounds, best.leaves, t0);
  check_internal(out.objectives.r_loc == best.value,
                 "node-change objective does not re-evaluate to the scan value");
  check_internal(out.objectives.l_avg_ms <= bounds.latency_budget_ms,
                 "stage-2 placement busts the latency budget");
  return out;
}

SolveOutcome solve_stage3(const Topology& t, const Scenario& s, const Placement& prior,
                          const StageBounds& bounds, Exec exec) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!bounds.r_loc_star.has_value()) {
    throw InvalidParameter("stage 3 requires the stage-2 node-change optimum in its bounds");
  }
  const Instance inst = build_instance(t, s, &prior);
  const long cap = *bounds.r_loc_star;

  Stage3Visitor proto;
  proto.inst = &inst;
  proto.budget = bounds.latency_budget_ms;
  proto.cap = cap;
  const auto best = run_scan(inst, proto, exec);
  if (!best.found) {
    throw InfeasibleBudget("no placement meets the latency budget and node-change cap");
  }

  // Recover the first labeling (in lexicographic order) of the winning set
  // that attains the optimum, then the canonical serving choices under it.
  LeafView view{};
  std::vector<double> mins(static_cast<std::size_t>(inst.n_vcps));
  std::vector<char> in_set(static_cast<std::size_t>(inst.n), 0);
  for (const int h : best.nodes) in_set[h] = 1;
  for (int p = 0; p < inst.n_vcps; ++p) {
    double mn = kInf;
    for (const int h : best.nodes) mn = std::min(mn, inst.lat(p, h));
    mins[p] = mn;
  }
  view.nodes = best.nodes.data();
  view.min_lat = mins.data();
  view.in_set = in_set.data();

  Stage3Visitor finder;
  finder.inst = &inst;
  finder.budget = bounds.latency_budget_ms;
  finder.cap = cap;
  finder.build_top3(view);

  std::vector<int> lambda(best.nodes);
  bool lambda_found = false;
  do {
    const auto tval = hv_optimum_for_lambda(inst, view, lambda, bounds.latency_budget_ms, cap,
                                            best.value, finder.scratch);
    if (tval.has_value() && *tval == best.value) {
      lambda_found = true;
      break;
    }
  } while (std::next_permutation(lambda.begin(), lambda.end()));
  check_internal(lambda_found, "winning labeling not recovered");

  const std::vector<int> serving = canonical_serving_hv(inst, best.nodes, lambda, best.value, cap,
                                                        bounds.latency_budget_ms);
  Placement pl = placement_from_lambda(inst, lambda, serving);

  SolveOutcome out = assemble(inst, std::move(pl), &prior, bounds, best.leaves, t0);
  check_internal(out.objectives.r_hv == best.value,
                 "entity-change objective does not re-evaluate to the scan value");
  check_internal(out.objectives.r_loc <= cap, "stage-3 placement busts the node-change cap");
  check_internal(out.objectives.l_avg_ms <= bounds.latency_budget_ms,
                 "stage-3 placement busts the latency budget");
  return out;
}

SolveOutcome solve_multistage(const Topology& t, const Scenario& s, const Placement& prior,
                              double rho, Exec exec) {
  if (rho < 0.0 || !std::isfinite(rho)) {
    throw InvalidParameter("relaxation factor must be finite and non-negative");
  }
  const auto t0 = std::chrono::steady_clock::now();

  const SolveOutcome stage1 = solve_stage1(t, s, exec);
  StageBounds bounds;
  bounds.l_star_ms = stage1.bounds.l_star_ms;
  bounds.rho = rho;
  bounds.latency_budget_ms = (1.0 + rho) * bounds.l_star_ms;

  const SolveOutcome stage2 = solve_stage2(t, s, prior, bounds, exec);
  SolveOutcome out = solve_stage3(t, s, prior, stage2.bounds, exec);
  out.nodes_explored += stage1.nodes_explored + stage2.nodes_explored;
  out.solve_time_ms = elapsed_ms(t0);
  return out;
}

}  // namespace dhpp

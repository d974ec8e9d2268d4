#include "dhpp/scenario.hpp"

#include <algorithm>

#include "dhpp/errors.hpp"
#include "dhpp/rng.hpp"

namespace dhpp {

SizeRange default_size_range(int n_nodes) {
  return SizeRange{std::min(2, n_nodes), std::min(10, n_nodes)};
}

std::vector<Vcp> Scenario::vcps() const {
  std::vector<Vcp> out;
  for (const Vsdn& v : vsdns) {
    for (const int sw : v.switches) out.push_back(Vcp{v.id, v.controller, sw});
  }
  return out;
}

namespace {

void check_size_range(const SizeRange& r, int n_nodes) {
  if (r.min < 1 || r.min > r.max || r.max > n_nodes) {
    throw InvalidSizeRange("vSDN size range [" + std::to_string(r.min) + ", " +
                           std::to_string(r.max) + "] is invalid for a " +
                           std::to_string(n_nodes) + "-node topology");
  }
}

Vsdn draw_vsdn(Xoshiro256StarStar& rng, int id, int n_nodes, const SizeRange& r) {
  Vsdn v;
  v.id = id;
  const int span = r.max - r.min + 1;
  const int size = r.min + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(span)));
  v.controller = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n_nodes)));
  v.switches = sample_without_replacement(rng, n_nodes, size);
  return v;
}

}  // namespace

Scenario generate_scenario(const Topology& t, int n_vsdns, int k, std::uint64_t seed,
                           SizeRange size_range, std::string topology_ref) {
  const int n = t.n_nodes();
  if (k < 1 || k > n) {
    throw KTooLarge("k = " + std::to_string(k) + " is outside [1, " + std::to_string(n) + "]");
  }
  if (n_vsdns < 0) throw InvalidParameter("n_vsdns must be non-negative");
  check_size_range(size_range, n);

  Scenario s;
  s.topology_ref = topology_ref.empty() ? t.name() : std::move(topology_ref);
  s.k = k;
  s.seed = seed;
  s.size_range = size_range;
  Xoshiro256StarStar rng(seed);
  s.vsdns.reserve(static_cast<std::size_t>(n_vsdns));
  for (int i = 0; i < n_vsdns; ++i) s.vsdns.push_back(draw_vsdn(rng, i, n, size_range));
  return s;
}

std::pair<Scenario, Vsdn> add_vsdn(const Scenario& s, const Topology& t,
                                   std::uint64_t event_seed) {
  check_size_range(s.size_range, t.n_nodes());
  int next_id = 0;
  for (const Vsdn& v : s.vsdns) next_id = std::max(next_id, v.id + 1);
  Xoshiro256StarStar rng(event_seed);
  Vsdn fresh = draw_vsdn(rng, next_id, t.n_nodes(), s.size_range);
  Scenario grown = s;
  grown.vsdns.push_back(fresh);
  return {std::move(grown), std::move(fresh)};
}

}  // namespace dhpp

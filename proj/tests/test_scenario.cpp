#include <set>

#include <doctest.h>

#include "dhpp/errors.hpp"
#include "dhpp/json_io.hpp"
#include "dhpp/scenario.hpp"
#include "support/helpers.hpp"

using namespace dhpp;

TEST_SUITE("scenario") {

TEST_CASE("zero tenants give an empty scenario") {
  const Topology t = test::random_geo_topology(3, 5, 8);
  const Scenario s = generate_scenario(t, 0, 2, 42, default_size_range(t.n_nodes()));
  CHECK(s.vsdns.empty());
  CHECK(s.vcps().empty());
}

TEST_CASE("generation is deterministic") {
  const Topology t = test::random_geo_topology(4, 6, 10);
  const Scenario a = generate_scenario(t, 5, 5, 1, SizeRange{2, std::min(10, t.n_nodes())});
  const Scenario b = generate_scenario(t, 5, 5, 1, SizeRange{2, std::min(10, t.n_nodes())});
  CHECK(scenario_to_json(a) == scenario_to_json(b));
  const Scenario c = generate_scenario(t, 5, 5, 2, SizeRange{2, std::min(10, t.n_nodes())});
  CHECK(scenario_to_json(a) != scenario_to_json(c));
}

TEST_CASE("control paths expand one per (controller, switch) pair") {
  Scenario s;
  s.k = 1;
  s.vsdns.push_back(Vsdn{7, 3, {1, 4}});
  const auto vcps = s.vcps();
  REQUIRE(vcps.size() == 2);
  CHECK(vcps[0].vsdn_id == 7);
  CHECK(vcps[0].controller == 3);
  CHECK(vcps[0].switch_node == 1);
  CHECK(vcps[1].switch_node == 4);
}

TEST_CASE("path count equals the sum of tenant sizes and ids stay in range") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const Topology t = test::random_geo_topology(seed, 3, 10);
    const Scenario s = generate_scenario(t, 6, 1, seed, default_size_range(t.n_nodes()));
    std::size_t expected = 0;
    for (const Vsdn& v : s.vsdns) {
      expected += v.switches.size();
      CHECK(v.controller >= 0);
      CHECK(v.controller < t.n_nodes());
      std::set<int> uniq(v.switches.begin(), v.switches.end());
      CHECK(uniq.size() == v.switches.size());
      CHECK(!v.switches.empty());
      for (const int sw : v.switches) {
        CHECK(sw >= 0);
        CHECK(sw < t.n_nodes());
      }
      CHECK(static_cast<int>(v.switches.size()) >= s.size_range.min);
      CHECK(static_cast<int>(v.switches.size()) <= s.size_range.max);
    }
    CHECK(s.vcps().size() == expected);
  }
}

TEST_CASE("growth event appends exactly one tenant and leaves the input alone") {
  const Topology t = test::random_geo_topology(9, 5, 8);
  const Scenario empty = generate_scenario(t, 0, 2, 3, default_size_range(t.n_nodes()));
  const auto [one, fresh] = add_vsdn(empty, t, 99);
  CHECK(empty.vsdns.empty());
  REQUIRE(one.vsdns.size() == 1);
  CHECK(one.vsdns[0].id == 0);
  CHECK(one.vcps().size() == fresh.switches.size());

  const Scenario base = generate_scenario(t, 4, 2, 3, default_size_range(t.n_nodes()));
  const auto before = base.vcps().size();
  const auto [grown, added] = add_vsdn(base, t, 123);
  CHECK(base.vcps().size() == before);
  CHECK(grown.vcps().size() == before + added.switches.size());
  int max_id = -1;
  for (const Vsdn& v : base.vsdns) max_id = std::max(max_id, v.id);
  CHECK(added.id == max_id + 1);

  const auto [grown2, added2] = add_vsdn(base, t, 123);
  CHECK(scenario_to_json(grown) == scenario_to_json(grown2));
}

TEST_CASE("scenario JSON round-trips losslessly") {
  const Topology t = test::random_geo_topology(11, 6, 10);
  const Scenario s = generate_scenario(t, 7, 3, 77, default_size_range(t.n_nodes()), "toy");
  const Scenario back = scenario_from_json(scenario_to_json(s));
  CHECK(scenario_to_json(back) == scenario_to_json(s));
  CHECK(back.topology_ref == "toy");
  CHECK(back.seed == 77);
}

TEST_CASE("invalid parameters are rejected") {
  const Topology t = test::random_geo_topology(2, 4, 4);
  const int n = t.n_nodes();
  CHECK_THROWS_AS(generate_scenario(t, 1, n + 1, 0, default_size_range(n)), KTooLarge);
  CHECK_THROWS_AS(generate_scenario(t, 1, 0, 0, default_size_range(n)), KTooLarge);
  CHECK_THROWS_AS(generate_scenario(t, 1, 1, 0, SizeRange{0, 2}), InvalidSizeRange);
  CHECK_THROWS_AS(generate_scenario(t, 1, 1, 0, SizeRange{3, 2}), InvalidSizeRange);
  CHECK_THROWS_AS(generate_scenario(t, 1, 1, 0, SizeRange{1, n + 1}), InvalidSizeRange);
  CHECK_THROWS_AS(generate_scenario(t, -1, 1, 0, default_size_range(n)), InvalidParameter);
}

}  // TEST_SUITE

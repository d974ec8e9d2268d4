#include "dhpp/json_io.hpp"

#include <fstream>
#include <map>

#include "dhpp/errors.hpp"
#include "dhpp/rng.hpp"

namespace dhpp {

json scenario_to_json(const Scenario& s) {
  json j;
  j["rng"] = kRngTag;
  j["topology_ref"] = s.topology_ref;
  j["k"] = s.k;
  j["seed"] = s.seed;
  j["size_range"] = {s.size_range.min, s.size_range.max};
  json vsdns = json::array();
  for (const Vsdn& v : s.vsdns) {
    vsdns.push_back({{"id", v.id}, {"controller", v.controller}, {"switches", v.switches}});
  }
  j["vsdns"] = std::move(vsdns);
  return j;
}

Scenario scenario_from_json(const json& j) {
  try {
    Scenario s;
    s.topology_ref = j.at("topology_ref").get<std::string>();
    s.k = j.at("k").get<int>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.size_range.min = j.at("size_range").at(0).get<int>();
    s.size_range.max = j.at("size_range").at(1).get<int>();
    for (const json& jv : j.at("vsdns")) {
      Vsdn v;
      v.id = jv.at("id").get<int>();
      v.controller = jv.at("controller").get<int>();
      v.switches = jv.at("switches").get<std::vector<int>>();
      s.vsdns.push_back(std::move(v));
    }
    return s;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed scenario document: ") + e.what());
  }
}

json placement_to_json(const Placement& pl, const Scenario& s) {
  json locations = json::object();
  for (int e = 0; e < pl.k(); ++e) locations[std::to_string(e)] = pl.locations[e];

  std::map<VcpKey, int> controller_of;
  for (const Vsdn& v : s.vsdns) {
    for (const int sw : v.switches) controller_of[VcpKey{v.id, sw}] = v.controller;
  }
  json assignment = json::array();
  for (const auto& [key, entity] : pl.assignment) {
    const auto it = controller_of.find(key);
    assignment.push_back({{"vsdn", key.vsdn_id},
                          {"controller", it == controller_of.end() ? -1 : it->second},
                          {"switch", key.switch_node},
                          {"entity", entity}});
  }
  return json{{"locations", std::move(locations)}, {"assignment", std::move(assignment)}};
}

Placement placement_from_json(const json& j) {
  try {
    Placement pl;
    const json& locations = j.at("locations");
    pl.locations.resize(locations.size());
    for (const auto& [key, value] : locations.items()) {
      const int e = std::stoi(key);
      if (e < 0 || e >= static_cast<int>(pl.locations.size())) {
        throw ParseError("placement entity ids must form a dense range");
      }
      pl.locations[e] = value.get<int>();
    }
    for (const json& ja : j.at("assignment")) {
      const VcpKey key{ja.at("vsdn").get<int>(), ja.at("switch").get<int>()};
      pl.assignment[key] = ja.at("entity").get<int>();
    }
    return pl;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed placement document: ") + e.what());
  }
}

json outcome_to_json(const SolveOutcome& out, const Scenario& s, bool with_reconfig,
                     const std::string& solver_name) {
  json objectives{{"l_avg_ms", out.objectives.l_avg_ms}};
  if (with_reconfig) {
    objectives["r_loc"] = out.objectives.r_loc;
    objectives["r_hv"] = out.objectives.r_hv;
  }
  json bounds{{"l_star_ms", out.bounds.l_star_ms},
              {"rho", out.bounds.rho},
              {"latency_budget_ms", out.bounds.latency_budget_ms}};
  if (with_reconfig && out.bounds.r_loc_star.has_value()) {
    bounds["r_loc_star"] = *out.bounds.r_loc_star;
  }
  return json{{"solver", solver_name},
              {"placement", placement_to_json(out.placement, s)},
              {"objectives", std::move(objectives)},
              {"bounds", std::move(bounds)},
              {"solve_time_ms", out.solve_time_ms},
              {"nodes_explored", out.nodes_explored}};
}

json sweep_config_to_json(const SweepConfig& cfg) {
  json j;
  j["topology"] = cfg.topology_path;
  j["k_values"] = cfg.k_values;
  j["n_vsdns_values"] = cfg.n_vsdns_values;
  j["seeds"] = cfg.seeds;
  j["rho_grid"] = cfg.rho_grid;
  j["mode"] = to_string(cfg.mode);
  if (cfg.size_range) j["size_range"] = {cfg.size_range->min, cfg.size_range->max};
  j["n_events"] = cfg.n_events;
  return j;
}

SweepConfig sweep_config_from_json(const json& j) {
  try {
    SweepConfig cfg = default_sweep_config();
    cfg.topology_path = j.at("topology").get<std::string>();
    if (j.contains("k_values")) cfg.k_values = j["k_values"].get<std::vector<int>>();
    if (j.contains("n_vsdns_values")) {
      cfg.n_vsdns_values = j["n_vsdns_values"].get<std::vector<int>>();
    }
    if (j.contains("seeds")) cfg.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    if (j.contains("rho_grid")) cfg.rho_grid = j["rho_grid"].get<std::vector<double>>();
    if (j.contains("mode")) cfg.mode = sweep_mode_from_string(j["mode"].get<std::string>());
    if (j.contains("size_range")) {
      cfg.size_range = SizeRange{j["size_range"].at(0).get<int>(),
                                 j["size_range"].at(1).get<int>()};
    }
    if (j.contains("n_events")) cfg.n_events = j["n_events"].get<int>();
    return cfg;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed sweep config: ") + e.what());
  }
}

json aggregate_to_json(const AggregateTable& table) {
  json fine = json::array();
  for (const AggregateRow& r : table.by_k_n_rho) {
    fine.push_back({{"k", r.k},
                    {"n_vsdns", r.n_vsdns},
                    {"rho", r.rho},
                    {"mean_l_avg_ms", r.mean_l_avg_ms},
                    {"mean_r_loc", r.mean_r_loc},
                    {"mean_r_hv", r.mean_r_hv},
                    {"rows", r.n_rows}});
  }
  json coarse = json::array();
  for (const AggregateRowK& r : table.by_k_rho) {
    coarse.push_back({{"k", r.k},
                      {"rho", r.rho},
                      {"mean_l_avg_ms", r.mean_l_avg_ms},
                      {"mean_r_loc", r.mean_r_loc},
                      {"mean_r_hv", r.mean_r_hv},
                      {"rows", r.n_rows}});
  }
  return json{{"groups_k_n_rho", std::move(fine)}, {"groups_k_rho", std::move(coarse)}};
}

json sweep_summary_to_json(const SweepResult& result) {
  json j = aggregate_to_json(aggregate(result.rows));
  j["total_rows"] = result.rows.size();
  json failures = json::array();
  for (const CellFailure& f : result.failures) {
    failures.push_back(
        {{"k", f.k}, {"n_vsdns", f.n_vsdns}, {"seed", f.seed}, {"error", f.message}});
  }
  j["failures"] = std::move(failures);
  return j;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open file: " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("malformed JSON in " + path + ": " + e.what());
  }
}

void save_json_file(const json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write file: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing file: " + path);
}

}  // namespace dhpp

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dhpp/errors.hpp"
#include "dhpp/harness.hpp"
#include "dhpp/json_io.hpp"
#include "dhpp/oracle.hpp"
#include "dhpp/placement.hpp"
#include "dhpp/scenario.hpp"
#include "dhpp/solver.hpp"
#include "dhpp/topology.hpp"

// Exit codes: 0 success, 1 usage error, 2 runtime error. Machine output goes
// to stdout, diagnostics and progress to stderr.

namespace {

namespace fs = std::filesystem;
using dhpp::json;

struct TopoInfoArgs {
  std::string input;
  bool as_json = false;
};

int cmd_topo_info(const TopoInfoArgs& args) {
  const dhpp::Topology t = dhpp::Topology::from_file(args.input);
  double mn = 0.0, mx = 0.0, mean = 0.0;
  if (t.n_links() > 0) {
    mn = mx = t.links()[0].latency_ms;
    double sum = 0.0;
    for (const dhpp::Link& l : t.links()) {
      mn = std::min(mn, l.latency_ms);
      mx = std::max(mx, l.latency_ms);
      sum += l.latency_ms;
    }
    mean = sum / t.n_links();
  }
  if (args.as_json) {
    json j{{"name", t.name()},
           {"nodes", t.n_nodes()},
           {"links", t.n_links()},
           {"link_latency_ms", {{"min", mn}, {"max", mx}, {"mean", mean}}},
           {"diameter_ms", t.diameter_ms()}};
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "nodes: " << t.n_nodes() << ", links: " << t.n_links() << '\n';
    std::cout << "link_latency_ms: min=" << mn << " max=" << mx << " mean=" << mean << '\n';
    std::cout << "diameter_ms: " << t.diameter_ms() << '\n';
  }
  return 0;
}

struct ScenarioGenArgs {
  std::string topology;
  int n_vsdns = 0;
  int k = 0;
  std::uint64_t seed = 0;
  std::optional<int> size_min;
  std::optional<int> size_max;
  std::string output;
  bool as_json = false;
};

int cmd_scenario_gen(const ScenarioGenArgs& args) {
  const dhpp::Topology t = dhpp::Topology::from_file(args.topology);
  dhpp::SizeRange range = dhpp::default_size_range(t.n_nodes());
  if (args.size_min) range.min = *args.size_min;
  if (args.size_max) range.max = *args.size_max;
  const dhpp::Scenario s =
      dhpp::generate_scenario(t, args.n_vsdns, args.k, args.seed, range);
  dhpp::save_json_file(dhpp::scenario_to_json(s), args.output);
  const auto vcp_count = s.vcps().size();
  if (args.as_json) {
    std::cout << json{{"vcp_count", vcp_count}, {"path", args.output}}.dump(2) << '\n';
  } else {
    std::cout << "vcps: " << vcp_count << '\n';
  }
  return 0;
}

struct SolveArgs {
  std::string topology;
  std::string scenario;
  std::string prior = "none";
  double rho = 0.0;
  std::string output;
  bool as_json = false;
  bool serial = false;
};

void print_outcome_human(const dhpp::SolveOutcome& out, bool with_reconfig) {
  std::cout << "l_avg_ms: " << out.objectives.l_avg_ms << '\n';
  if (with_reconfig) {
    std::cout << "r_loc: " << out.objectives.r_loc << '\n';
    std::cout << "r_hv: " << out.objectives.r_hv << '\n';
  }
  std::cout << "l_star_ms: " << out.bounds.l_star_ms << '\n';
  if (with_reconfig) {
    std::cout << "latency_budget_ms: " << out.bounds.latency_budget_ms << '\n';
    if (out.bounds.r_loc_star) std::cout << "r_loc_star: " << *out.bounds.r_loc_star << '\n';
  }
  std::cout << "solve_time_ms: " << out.solve_time_ms << '\n';
  std::cout << "nodes_explored: " << out.nodes_explored << '\n';
}

int cmd_solve(const SolveArgs& args) {
  const dhpp::Topology t = dhpp::Topology::from_file(args.topology);
  const dhpp::Scenario s = dhpp::scenario_from_json(dhpp::load_json_file(args.scenario));
  const dhpp::Exec exec = args.serial ? dhpp::Exec::serial : dhpp::Exec::parallel;

  dhpp::SolveOutcome out;
  bool with_reconfig = false;
  std::string solver_name;
  if (args.prior == "none") {
    out = dhpp::solve_stage1(t, s, exec);
    solver_name = "stage1";
  } else {
    const dhpp::Placement prior = dhpp::placement_from_json(dhpp::load_json_file(args.prior));
    out = dhpp::solve_multistage(t, s, prior, args.rho, exec);
    with_reconfig = true;
    solver_name = "multistage";
  }
  const json j = dhpp::outcome_to_json(out, s, with_reconfig, solver_name);
  if (!args.output.empty()) dhpp::save_json_file(j, args.output);
  if (args.as_json) {
    std::cout << j.dump(2) << '\n';
  } else {
    print_outcome_human(out, with_reconfig);
  }
  return 0;
}

struct OracleArgs {
  std::string topology;
  std::string scenario;
  std::string prior;
  double rho = 0.0;
  std::string output;
  bool as_json = false;
};

int cmd_oracle(const OracleArgs& args) {
  const dhpp::Topology t = dhpp::Topology::from_file(args.topology);
  const dhpp::Scenario s = dhpp::scenario_from_json(dhpp::load_json_file(args.scenario));
  const dhpp::Placement prior = dhpp::placement_from_json(dhpp::load_json_file(args.prior));
  const dhpp::SolveOutcome out = dhpp::brute_force_oracle(t, s, prior, args.rho);
  const json j = dhpp::outcome_to_json(out, s, true, "oracle");
  if (!args.output.empty()) dhpp::save_json_file(j, args.output);
  if (args.as_json) {
    std::cout << j.dump(2) << '\n';
  } else {
    print_outcome_human(out, true);
  }
  return 0;
}

struct SweepArgs {
  std::string config;
  std::string output_dir;
  int jobs = 1;
};

int cmd_sweep(const SweepArgs& args) {
  const json cfg_json = dhpp::load_json_file(args.config);
  dhpp::SweepConfig cfg = dhpp::sweep_config_from_json(cfg_json);

  // Topology paths in configs are usually relative to the config file.
  fs::path topo_path(cfg.topology_path);
  if (!fs::exists(topo_path)) {
    const fs::path beside_config = fs::path(args.config).parent_path() / topo_path;
    if (fs::exists(beside_config)) topo_path = beside_config;
  }
  const dhpp::Topology t = dhpp::Topology::from_file(topo_path.string());

  fs::create_directories(args.output_dir);
  const dhpp::SweepResult result = dhpp::run_sweep(
      t, cfg, args.jobs, [](const std::string& msg) { std::cerr << msg << '\n'; });

  const fs::path csv_path = fs::path(args.output_dir) / "rows.csv";
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw dhpp::IoError("cannot write " + csv_path.string());
  dhpp::export_csv(result.rows, csv);
  csv.close();

  if (!result.rows.empty()) {
    const fs::path summary_path = fs::path(args.output_dir) / "summary.json";
    dhpp::save_json_file(dhpp::sweep_summary_to_json(result), summary_path.string());
  }

  std::cerr << "rows: " << result.rows.size() << ", failed cells: " << result.failures.size()
            << ", output: " << args.output_dir << '\n';
  return result.rows.empty() && !result.failures.empty() ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact solver and experiment harness for dynamic hypervisor placement"};
  app.require_subcommand(1);

  TopoInfoArgs topo_args;
  CLI::App* topo = app.add_subcommand("topo", "Topology inspection");
  topo->require_subcommand(1);
  CLI::App* topo_info = topo->add_subcommand("info", "Print node/link counts and latency stats");
  topo_info->add_option("--input", topo_args.input, "Topology file (GML or GraphML)")->required();
  topo_info->add_flag("--json", topo_args.as_json, "Emit JSON on stdout");

  ScenarioGenArgs gen_args;
  CLI::App* scenario = app.add_subcommand("scenario", "Scenario generation");
  scenario->require_subcommand(1);
  CLI::App* gen = scenario->add_subcommand("gen", "Generate a seeded random scenario");
  gen->add_option("--topology", gen_args.topology, "Topology file")->required();
  gen->add_option("--n-vsdns", gen_args.n_vsdns, "Number of tenant networks")->required();
  gen->add_option("--k", gen_args.k, "Number of hypervisor entities")->required();
  gen->add_option("--seed", gen_args.seed, "Scenario seed")->required();
  gen->add_option("--size-min", gen_args.size_min, "Smallest vSDN size");
  gen->add_option("--size-max", gen_args.size_max, "Largest vSDN size");
  gen->add_option("-o,--output", gen_args.output, "Scenario JSON path")->required();
  gen->add_flag("--json", gen_args.as_json, "Emit JSON on stdout");

  SolveArgs solve_args;
  CLI::App* solve = app.add_subcommand("solve", "Solve one instance");
  solve->add_option("--topology", solve_args.topology, "Topology file")->required();
  solve->add_option("--scenario", solve_args.scenario, "Scenario JSON")->required();
  solve->add_option("--prior", solve_args.prior,
                    "Prior placement JSON, or 'none' for a latency-only solve");
  solve->add_option("--rho", solve_args.rho, "Latency relaxation factor");
  solve->add_option("-o,--output", solve_args.output, "Outcome JSON path");
  solve->add_flag("--json", solve_args.as_json, "Emit JSON on stdout");
  solve->add_flag("--serial", solve_args.serial, "Use the serial reference scan");

  OracleArgs oracle_args;
  CLI::App* oracle = app.add_subcommand("oracle", "Brute-force verification solve");
  oracle->add_option("--topology", oracle_args.topology, "Topology file")->required();
  oracle->add_option("--scenario", oracle_args.scenario, "Scenario JSON")->required();
  oracle->add_option("--prior", oracle_args.prior, "Prior placement JSON")->required();
  oracle->add_option("--rho", oracle_args.rho, "Latency relaxation factor");
  oracle->add_option("-o,--output", oracle_args.output, "Outcome JSON path");
  oracle->add_flag("--json", oracle_args.as_json, "Emit JSON on stdout");

  SweepArgs sweep_args;
  CLI::App* sweep = app.add_subcommand("sweep", "Run a full experiment grid");
  sweep->add_option("--config", sweep_args.config, "Sweep config JSON")->required();
  sweep->add_option("-o,--output", sweep_args.output_dir, "Output directory")->required();
  sweep->add_option("--jobs", sweep_args.jobs, "Parallel cell workers")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (topo_info->parsed()) return cmd_topo_info(topo_args);
    if (gen->parsed()) return cmd_scenario_gen(gen_args);
    if (solve->parsed()) return cmd_solve(solve_args);
    if (oracle->parsed()) return cmd_oracle(oracle_args);
    if (sweep->parsed()) return cmd_sweep(sweep_args);
  } catch (const dhpp::KTooLarge& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const dhpp::InvalidSizeRange& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const dhpp::InvalidParameter& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const dhpp::InstanceTooLarge& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

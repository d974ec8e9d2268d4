#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dhpp/scenario.hpp"
#include "dhpp/solver.hpp"
#include "dhpp/topology.hpp"

namespace dhpp {

// single_add: one growth event per cell, every rho re-optimizes against the
// same pre-event incumbent. sequential_add: a chain of growth events per rho,
// each re-optimization becoming the next incumbent.
enum class SweepMode { single_add, sequential_add };

const char* to_string(SweepMode mode);
SweepMode sweep_mode_from_string(const std::string& s);

struct SweepConfig {
  std::string topology_path;
  std::vector<int> k_values;
  std::vector<int> n_vsdns_values;
  std::vector<std::uint64_t> seeds;
  std::vector<double> rho_grid;
  SweepMode mode = SweepMode::single_add;
  std::optional<SizeRange> size_range;  // topology default when unset
  int n_events = 5;                     // sequential mode only
};

// k in {3,5,7}, 5/15/40 initial tenants, seeds 1..30, rho 0%..10% in 1%
// steps, one growth event per cell.
SweepConfig default_sweep_config();

struct SweepResultRow {
  std::string topology_ref;
  int k = 0;
  int n_vsdns_initial = 0;
  std::uint64_t seed = 0;
  double rho = 0.0;
  double l_star_ms = 0.0;
  double l_avg_ms = 0.0;
  long r_loc = 0;
  long r_hv = 0;
  long vcp_count = 0;
  double solve_time_ms = 0.0;
  std::string mode;

  bool operator==(const SweepResultRow&) const = default;
};

// One (k, n_vsdns, seed) cell: embed the initial tenants, take the latency
// optimum as the incumbent placement, apply the growth event, then
// re-optimize once per rho value.
std::vector<SweepResultRow> run_experiment_cell(const Topology& t, const std::string& topology_ref,
                                                int k, int n_vsdns, std::uint64_t seed,
                                                const std::vector<double>& rho_grid, SweepMode mode,
                                                SizeRange size_range, int n_events,
                                                Exec exec = Exec::parallel);

struct CellFailure {
  int k = 0;
  int n_vsdns = 0;
  std::uint64_t seed = 0;
  std::string message;
};

struct SweepResult {
  std::vector<SweepResultRow> rows;      // sorted by (k, n_vsdns_initial, seed, rho)
  std::vector<CellFailure> failures;     // failed cells are recorded, not fatal
};

// Runs every cell of the grid. jobs > 1 distributes cells across that many
// workers (each solving serially); jobs == 1 runs cells in order with the
// parallel solver inside. Objective fields are identical either way.
SweepResult run_sweep(const Topology& t, const SweepConfig& cfg, int jobs = 1,
                      const std::function<void(const std::string&)>& progress = {});

struct AggregateRow {
  int k = 0;
  int n_vsdns = 0;
  double rho = 0.0;
  double mean_l_avg_ms = 0.0;
  double mean_r_loc = 0.0;
  double mean_r_hv = 0.0;
  long n_rows = 0;
};

struct AggregateRowK {
  int k = 0;
  double rho = 0.0;
  double mean_l_avg_ms = 0.0;
  double mean_r_loc = 0.0;
  double mean_r_hv = 0.0;
  long n_rows = 0;
};

struct AggregateTable {
  std::vector<AggregateRow> by_k_n_rho;  // sorted by group key
  std::vector<AggregateRowK> by_k_rho;
};

// Arithmetic means per group. Throws EmptyGroup when there are no rows.
AggregateTable aggregate(const std::vector<SweepResultRow>& rows);

// RFC 4180 CSV with a fixed header; floating values use 6 significant
// digits; rows are written sorted by (k, n_vsdns_initial, seed, rho).
void export_csv(const std::vector<SweepResultRow>& rows, std::ostream& out);
std::vector<SweepResultRow> parse_csv(std::istream& in);

inline constexpr const char* kCsvHeader =
    "topology_ref,k,n_vsdns_initial,seed,rho,l_star_ms,l_avg_ms,r_loc,r_hv,vcp_count,"
    "solve_time_ms,mode";

}  // namespace dhpp

#include "dhpp/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include "dhpp/errors.hpp"
#include "dhpp/rng.hpp"

namespace dhpp {

const char* to_string(SweepMode mode) {
  return mode == SweepMode::single_add ? "single_add" : "sequential_add";
}

SweepMode sweep_mode_from_string(const std::string& s) {
  if (s == "single_add") return SweepMode::single_add;
  if (s == "sequential_add") return SweepMode::sequential_add;
  throw InvalidParameter("unknown sweep mode '" + s + "'");
}

SweepConfig default_sweep_config() {
  SweepConfig cfg;
  cfg.k_values = {3, 5, 7};
  cfg.n_vsdns_values = {5, 15, 40};
  cfg.seeds.resize(30);
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) cfg.seeds[i] = i + 1;
  for (int i = 0; i <= 10; ++i) cfg.rho_grid.push_back(static_cast<double>(i) / 100.0);
  cfg.mode = SweepMode::single_add;
  cfg.n_events = 5;
  return cfg;
}

namespace {

SweepResultRow make_row(const std::string& topology_ref, int k, int n_initial, std::uint64_t seed,
                        double rho, const SolveOutcome& out, long vcp_count, SweepMode mode) {
  SweepResultRow row;
  row.topology_ref = topology_ref;
  row.k = k;
  row.n_vsdns_initial = n_initial;
  row.seed = seed;
  row.rho = rho;
  row.l_star_ms = out.bounds.l_star_ms;
  row.l_avg_ms = out.objectives.l_avg_ms;
  row.r_loc = out.objectives.r_loc;
  row.r_hv = out.objectives.r_hv;
  row.vcp_count = vcp_count;
  row.solve_time_ms = out.solve_time_ms;
  row.mode = to_string(mode);
  return row;
}

void sort_rows(std::vector<SweepResultRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const SweepResultRow& a, const SweepResultRow& b) {
    return std::tie(a.k, a.n_vsdns_initial, a.seed, a.rho) <
           std::tie(b.k, b.n_vsdns_initial, b.seed, b.rho);
  });
}

}  // namespace

std::vector<SweepResultRow> run_experiment_cell(const Topology& t, const std::string& topology_ref,
                                                int k, int n_vsdns, std::uint64_t seed,
                                                const std::vector<double>& rho_grid, SweepMode mode,
                                                SizeRange size_range, int n_events, Exec exec) {
  const Scenario initial = generate_scenario(t, n_vsdns, k, seed, size_range, topology_ref);
  const Placement incumbent = solve_stage1(t, initial, exec).placement;

  std::vector<SweepResultRow> rows;
  if (mode == SweepMode::single_add) {
    const auto [grown, fresh] = add_vsdn(initial, t, seed ^ kAddEventSeedXor);
    const long vcp_count = static_cast<long>(grown.vcps().size());
    for (const double rho : rho_grid) {
      const SolveOutcome out = solve_multistage(t, grown, incumbent, rho, exec);
      rows.push_back(make_row(topology_ref, k, n_vsdns, seed, rho, out, vcp_count, mode));
    }
    return rows;
  }

  // Sequential: each rho traces its own trajectory of growth events, carrying
  // its re-optimized placement forward as the next incumbent.
  for (const double rho : rho_grid) {
    Scenario current = initial;
    Placement prior = incumbent;
    std::uint64_t event_seed = seed ^ kAddEventSeedXor;
    for (int e = 0; e < n_events; ++e) {
      const int n_before = static_cast<int>(current.vsdns.size());
      auto [grown, fresh] = add_vsdn(current, t, event_seed);
      const SolveOutcome out = solve_multistage(t, grown, prior, rho, exec);
      rows.push_back(make_row(topology_ref, k, n_before, seed, rho, out,
                              static_cast<long>(grown.vcps().size()), mode));
      prior = out.placement;
      current = std::move(grown);
      event_seed = SplitMix64(event_seed).next();
    }
  }
  return rows;
}

SweepResult run_sweep(const Topology& t, const SweepConfig& cfg, int jobs,
                      const std::function<void(const std::string&)>& progress) {
  if (cfg.k_values.empty() || cfg.n_vsdns_values.empty() || cfg.seeds.empty() ||
      cfg.rho_grid.empty()) {
    throw InvalidParameter("sweep config has an empty grid dimension");
  }
  for (std::size_t i = 0; i < cfg.rho_grid.size(); ++i) {
    if (cfg.rho_grid[i] < 0.0) throw InvalidParameter("rho values must be non-negative");
    if (i > 0 && cfg.rho_grid[i] < cfg.rho_grid[i - 1]) {
      throw InvalidParameter("rho grid must be sorted ascending");
    }
  }
  if (std::set<std::uint64_t>(cfg.seeds.begin(), cfg.seeds.end()).size() != cfg.seeds.size()) {
    throw InvalidParameter("seeds must be pairwise distinct");
  }
  if (cfg.mode == SweepMode::sequential_add && cfg.n_events < 1) {
    throw InvalidParameter("sequential mode needs at least one event");
  }
  const SizeRange size_range = cfg.size_range.value_or(default_size_range(t.n_nodes()));

  struct Cell {
    int k;
    int n;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (const int k : cfg.k_values) {
    for (const int n : cfg.n_vsdns_values) {
      for (const std::uint64_t seed : cfg.seeds) cells.push_back(Cell{k, n, seed});
    }
  }

  std::vector<std::vector<SweepResultRow>> cell_rows(cells.size());
  std::vector<std::optional<CellFailure>> cell_failures(cells.size());
  std::mutex progress_mutex;

  const auto run_cell = [&](std::size_t i, Exec exec) {
    const Cell& cell = cells[i];
    try {
      cell_rows[i] = run_experiment_cell(t, t.name(), cell.k, cell.n, cell.seed, cfg.rho_grid,
                                         cfg.mode, size_range, cfg.n_events, exec);
      if (progress) {
        std::ostringstream msg;
        msg << "cell k=" << cell.k << " n=" << cell.n << " seed=" << cell.seed << ": "
            << cell_rows[i].size() << " rows";
        const std::lock_guard<std::mutex> lock(progress_mutex);
        progress(msg.str());
      }
    } catch (const std::exception& e) {
      cell_failures[i] = CellFailure{cell.k, cell.n, cell.seed, e.what()};
      if (progress) {
        std::ostringstream msg;
        msg << "cell k=" << cell.k << " n=" << cell.n << " seed=" << cell.seed
            << ": FAILED: " << e.what();
        const std::lock_guard<std::mutex> lock(progress_mutex);
        progress(msg.str());
      }
    }
  };

  if (jobs > 1) {
#ifdef _OPENMP
#pragma omp parallel for num_threads(jobs) schedule(dynamic)
#endif
    for (long long i = 0; i < static_cast<long long>(cells.size()); ++i) {
      run_cell(static_cast<std::size_t>(i), Exec::serial);
    }
  } else {
    for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i, Exec::parallel);
  }

  SweepResult result;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cell_failures[i]) {
      result.failures.push_back(*cell_failures[i]);
    } else {
      result.rows.insert(result.rows.end(), cell_rows[i].begin(), cell_rows[i].end());
    }
  }
  sort_rows(result.rows);
  return result;
}

AggregateTable aggregate(const std::vector<SweepResultRow>& rows) {
  if (rows.empty()) throw EmptyGroup("no rows to aggregate");

  struct Acc {
    double l = 0.0;
    double loc = 0.0;
    double hv = 0.0;
    long n = 0;
  };
  std::map<std::tuple<int, int, double>, Acc> fine;
  std::map<std::tuple<int, double>, Acc> coarse;
  for (const SweepResultRow& row : rows) {
    Acc& a = fine[{row.k, row.n_vsdns_initial, row.rho}];
    a.l += row.l_avg_ms;
    a.loc += static_cast<double>(row.r_loc);
    a.hv += static_cast<double>(row.r_hv);
    ++a.n;
    Acc& b = coarse[{row.k, row.rho}];
    b.l += row.l_avg_ms;
    b.loc += static_cast<double>(row.r_loc);
    b.hv += static_cast<double>(row.r_hv);
    ++b.n;
  }

  AggregateTable table;
  for (const auto& [key, acc] : fine) {
    const auto& [k, n, rho] = key;
    const double d = static_cast<double>(acc.n);
    table.by_k_n_rho.push_back(AggregateRow{k, n, rho, acc.l / d, acc.loc / d, acc.hv / d, acc.n});
  }
  for (const auto& [key, acc] : coarse) {
    const auto& [k, rho] = key;
    const double d = static_cast<double>(acc.n);
    table.by_k_rho.push_back(AggregateRowK{k, rho, acc.l / d, acc.loc / d, acc.hv / d, acc.n});
  }
  return table;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

void export_csv(const std::vector<SweepResultRow>& rows, std::ostream& out) {
  std::vector<SweepResultRow> sorted = rows;
  sort_rows(sorted);
  out << kCsvHeader << "\r\n";
  for (const SweepResultRow& r : sorted) {
    out << r.topology_ref << ',' << r.k << ',' << r.n_vsdns_initial << ',' << r.seed << ','
        << format_double(r.rho) << ',' << format_double(r.l_star_ms) << ','
        << format_double(r.l_avg_ms) << ',' << r.r_loc << ',' << r.r_hv << ',' << r.vcp_count
        << ',' << format_double(r.solve_time_ms) << ',' << r.mode << "\r\n";
  }
}

std::vector<SweepResultRow> parse_csv(std::istream& in) {
  const auto split = [](const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (const char c : line) {
      if (c == ',') {
        fields.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur.push_back(c);
      }
    }
    fields.push_back(cur);
    return fields;
  };

  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty CSV document");
  if (split(line) != split(kCsvHeader)) throw ParseError("unexpected CSV header");

  std::vector<SweepResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = split(line);
    if (f.size() != 12) throw ParseError("CSV row has " + std::to_string(f.size()) + " fields");
    SweepResultRow r;
    try {
      r.topology_ref = f[0];
      r.k = std::stoi(f[1]);
      r.n_vsdns_initial = std::stoi(f[2]);
      r.seed = std::stoull(f[3]);
      r.rho = std::stod(f[4]);
      r.l_star_ms = std::stod(f[5]);
      r.l_avg_ms = std::stod(f[6]);
      r.r_loc = std::stol(f[7]);
      r.r_hv = std::stol(f[8]);
      r.vcp_count = std::stol(f[9]);
      r.solve_time_ms = std::stod(f[10]);
      r.mode = f[11];
    } catch (const std::exception&) {
      throw ParseError("malformed CSV row: " + line);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace dhpp

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dhpp/harness.hpp"
#include "dhpp/scenario.hpp"
#include "dhpp/solver.hpp"
#include "dhpp/topology.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

// Times the serial reference scan against the OpenMP scan, stage by stage,
// and checks that both return the same placement.

namespace {

template <class Fn>
double time_best_ms(int repeats, Fn&& fn) {
  double best = 1e300;
  for (int i = 0; i < repeats; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    best = std::min(best, ms);
  }
  return best;
}

void report(const char* stage, double serial_ms, double parallel_ms, bool same) {
  std::printf("%-12s %10.2f ms %10.2f ms   %5.2fx   outcomes %s\n", stage, serial_ms, parallel_ms,
              serial_ms / parallel_ms, same ? "identical" : "DIFFER");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmark: serial reference scan vs OpenMP scan"};
  std::string topology_path;
  int k = 5;
  int n_vsdns = 15;
  std::uint64_t seed = 7;
  double rho = 0.05;
  int repeats = 3;
  app.add_option("--topology", topology_path, "Topology file")->required();
  app.add_option("--k", k, "Hypervisor entities");
  app.add_option("--n-vsdns", n_vsdns, "Initial tenant networks");
  app.add_option("--seed", seed, "Scenario seed");
  app.add_option("--rho", rho, "Latency relaxation factor");
  app.add_option("--repeat", repeats, "Repetitions (best-of)");
  CLI11_PARSE(app, argc, argv);

  try {
    const dhpp::Topology t = dhpp::Topology::from_file(topology_path);
    const dhpp::Scenario initial = dhpp::generate_scenario(
        t, n_vsdns, k, seed, dhpp::default_size_range(t.n_nodes()));
    const dhpp::Placement prior = dhpp::solve_stage1(t, initial).placement;
    const auto [grown, fresh] = dhpp::add_vsdn(initial, t, seed ^ dhpp::kAddEventSeedXor);

#ifdef _OPENMP
    std::printf("threads: %d, ", omp_get_max_threads());
#else
    std::printf("threads: 1 (OpenMP disabled), ");
#endif
    std::printf("nodes: %d, k: %d, paths: %zu, rho: %.3f\n", t.n_nodes(), k, grown.vcps().size(),
                rho);
    std::printf("%-12s %13s %13s %8s\n", "stage", "serial", "parallel", "speedup");

    dhpp::SolveOutcome s1_serial, s1_parallel;
    const double t1s = time_best_ms(repeats, [&] {
      s1_serial = dhpp::solve_stage1(t, grown, dhpp::Exec::serial);
    });
    const double t1p = time_best_ms(repeats, [&] {
      s1_parallel = dhpp::solve_stage1(t, grown, dhpp::Exec::parallel);
    });
    report("stage1", t1s, t1p, s1_serial.placement == s1_parallel.placement);

    dhpp::StageBounds bounds;
    bounds.l_star_ms = s1_parallel.bounds.l_star_ms;
    bounds.rho = rho;
    bounds.latency_budget_ms = (1.0 + rho) * bounds.l_star_ms;

    dhpp::SolveOutcome s2_serial, s2_parallel;
    const double t2s = time_best_ms(repeats, [&] {
      s2_serial = dhpp::solve_stage2(t, grown, prior, bounds, dhpp::Exec::serial);
    });
    const double t2p = time_best_ms(repeats, [&] {
      s2_parallel = dhpp::solve_stage2(t, grown, prior, bounds, dhpp::Exec::parallel);
    });
    report("stage2", t2s, t2p, s2_serial.placement == s2_parallel.placement);

    dhpp::SolveOutcome s3_serial, s3_parallel;
    const double t3s = time_best_ms(repeats, [&] {
      s3_serial = dhpp::solve_stage3(t, grown, prior, s2_parallel.bounds, dhpp::Exec::serial);
    });
    const double t3p = time_best_ms(repeats, [&] {
      s3_parallel = dhpp::solve_stage3(t, grown, prior, s2_parallel.bounds, dhpp::Exec::parallel);
    });
    report("stage3", t3s, t3p, s3_serial.placement == s3_parallel.placement);

    dhpp::SolveOutcome m_serial, m_parallel;
    const double tms = time_best_ms(repeats, [&] {
      m_serial = dhpp::solve_multistage(t, grown, prior, rho, dhpp::Exec::serial);
    });
    const double tmp = time_best_ms(repeats, [&] {
      m_parallel = dhpp::solve_multistage(t, grown, prior, rho, dhpp::Exec::parallel);
    });
    report("multistage", tms, tmp, m_serial.placement == m_parallel.placement);

    const bool all_same = s1_serial.placement == s1_parallel.placement &&
                          s2_serial.placement == s2_parallel.placement &&
                          s3_serial.placement == s3_parallel.placement &&
                          m_serial.placement == m_parallel.placement;
    return all_same ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

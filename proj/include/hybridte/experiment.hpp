#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hybridte/lsa.hpp"
#include "hybridte/ospf.hpp"
#include "hybridte/partition.hpp"
#include "hybridte/topology.hpp"

namespace hybridte {

// C_l = smallest of {10, 40, 100, 400} Gbit/s covering the load; loads above
// 400 round up to the next multiple of 400 (extension beyond the stated
// granularity, counted in the report).
std::vector<double> assign_capacities(const std::vector<double>& link_loads,
                                      int* extensions = nullptr);

struct ExperimentConfig {
  int trials = 100;
  std::uint64_t base_seed = 1;
  double demand_low = 1.0;
  double demand_high = 7.0;
  std::string solver_command;
  LsaMode lsa_mode = LsaMode::kMetricOnly;
  // Relative MIP gap the solver command was configured with; used only to
  // slacken the per-trial ordering assertions.
  double mip_gap = 0.0;
  int workers = 0;  // 0 = hardware concurrency
  std::filesystem::path work_dir = "experiment_out";
  bool keep_solver_artifacts = false;
};

// Trial-independent derived data for one (topology, partition).
struct ExperimentContext {
  Partition partition;
  RoutingEntities entities;
  LsaCatalog catalog;
  std::vector<std::vector<char>> lsa_table;
};

ExperimentContext build_experiment_context(const Topology& topology,
                                           const Partition& partition,
                                           LsaMode mode);

struct RegimeResult {
  std::vector<double> utilization;  // per link
  double total_cost = 0.0;
  double solve_seconds = 0.0;
};

struct TrialResult {
  int index = -1;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string failure;
  RegimeResult ospf, hybrid, fullte;
  // Objective of the injected plain-OSPF-compatible point, when the plain
  // exits were strictly realizable.
  std::optional<double> injected_objective;
  int capacity_extensions = 0;
  int pruned_entities = 0;
  std::string note;
};

TrialResult run_trial(const Topology& topology, const ExperimentContext& ctx,
                      int trial_index, const ExperimentConfig& config);

struct Report {
  int trials_requested = 0;
  int trials_succeeded = 0;
  std::vector<TrialResult> trials;
  // 21 bins: [0,0.05) .. [0.95,1.0] plus overflow (> 1.0).
  std::vector<std::vector<long long>> histograms;  // [regime][bin]
  std::vector<std::string> regimes{"ospf", "hybrid", "fullte"};
  double total_cost_ospf = 0.0, total_cost_hybrid = 0.0,
         total_cost_fullte = 0.0;
  double saving_hybrid = 0.0, saving_fullte = 0.0;        // ratio of sums
  double saving_hybrid_mean = 0.0, saving_fullte_mean = 0.0;  // per-trial mean
  int capacity_extensions = 0;
  std::vector<std::string> sdn_node_names;
  int subdomain_count = 0;
};

Report run_experiment(const Topology& topology, int sdn_count,
                      const ExperimentConfig& config);

// report.json, hist_<regime>.csv, savings.csv and timings.csv under dir.
// Everything except timings.csv is byte-deterministic for fixed inputs.
void write_report_files(const Report& report, const ExperimentConfig& config,
                        const std::filesystem::path& dir);

}  // namespace hybridte

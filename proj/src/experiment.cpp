#include "hybridte/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <set>
#include <thread>

#include "hybridte/cost.hpp"
#include "hybridte/errors.hpp"
#include "hybridte/model.hpp"
#include "hybridte/rng.hpp"
#include "hybridte/solve.hpp"

#include "json.hpp"

namespace hybridte {

namespace {

constexpr double kGranularity[] = {10.0, 40.0, 100.0, 400.0};
constexpr int kHistogramBins = 21;  // 20 regular + overflow

int histogram_bin(double u) {
  if (u > 1.0) return 20;
  return std::min(static_cast<int>(u / 0.05), 19);
}

double sum_cost(const std::vector<double>& util) {
  double total = 0.0;
  for (double u : util) total += link_cost(u);
  return total;
}

}  // namespace

std::vector<double> assign_capacities(const std::vector<double>& link_loads,
                                      int* extensions) {
  std::vector<double> caps(link_loads.size());
  int extended = 0;
  for (size_t i = 0; i < link_loads.size(); ++i) {
    double load = link_loads[i];
    double cap = -1.0;
    for (double g : kGranularity)
      if (g >= load) {
        cap = g;
        break;
      }
    if (cap < 0) {
      cap = 400.0 * std::ceil(load / 400.0);
      ++extended;
    }
    caps[i] = cap;
  }
  if (extensions != nullptr) *extensions = extended;
  return caps;
}

ExperimentContext build_experiment_context(const Topology& topology,
                                           const Partition& partition,
                                           LsaMode mode) {
  ExperimentContext ctx;
  ctx.partition = partition;
  ctx.entities = build_entities(topology, ctx.partition);
  ctx.catalog = enumerate_lsa_sets(topology, ctx.partition, mode);
  ctx.lsa_table = lsa_param(ctx.catalog, ctx.entities.paths);
  return ctx;
}

TrialResult run_trial(const Topology& topology, const ExperimentContext& ctx,
                      int trial_index, const ExperimentConfig& config) {
  TrialResult result;
  result.index = trial_index;
  result.seed = derive_seed(config.base_seed, trial_index);

  std::vector<Flow> flows = full_mesh_flows(topology, result.seed,
                                            config.demand_low,
                                            config.demand_high);
  OspfRouting plain = ospf_route_all(topology, flows);
  std::vector<double> caps =
      assign_capacities(plain.link_loads, &result.capacity_extensions);
  Topology topo = topology.with_capacities(caps);

  // Baseline regime: the unbalanced minimum-hop routing itself.
  result.ospf.utilization.resize(topo.link_count());
  for (LinkIndex l = 0; l < topo.link_count(); ++l)
    result.ospf.utilization[l] = plain.link_loads[l] / caps[l];
  result.ospf.total_cost = sum_cost(result.ospf.utilization);

  auto [intra, inter] = classify_flows(ctx.partition, flows);
  std::vector<double> u = intra_utilization(topo, ctx.partition, intra);

  const std::filesystem::path trial_dir =
      config.work_dir / ("trial_" + std::to_string(trial_index));

  // Hybrid regime.
  IlpModel hybrid = build_hybrid_model(topo, ctx.partition, ctx.entities,
                                       ctx.catalog, ctx.lsa_table, inter, u);
  Solution hybrid_sol;
  if (inter.empty()) {
    // Nothing to steer: U is fixed by the intra flows.
    hybrid_sol.values.assign(hybrid.var_count(), 0.0);
    for (LinkIndex l = 0; l < topo.link_count(); ++l) {
      hybrid_sol.values[hybrid.find_var("U_l" + std::to_string(l))] = u[l];
      double c = link_cost(u[l]);
      hybrid_sol.values[hybrid.find_var("COST_l" + std::to_string(l))] = c;
      hybrid_sol.objective += c;
    }
  } else {
    ExternalSolveResult ext =
        solve_external(hybrid, config.solver_command, trial_dir / "hybrid");
    if (ext.infeasible) throw InfeasibleError("hybrid model infeasible");
    hybrid_sol = std::move(ext.solution);
    result.hybrid.solve_seconds = ext.wall_seconds;
  }
  DecodeResult hybrid_dec =
      decode_and_validate(hybrid, hybrid_sol, topo, inter, u, &ctx.entities,
                          &ctx.catalog, &ctx.lsa_table);
  result.hybrid.utilization = hybrid_dec.utilization;
  result.hybrid.total_cost = hybrid_dec.objective;
  for (const DecodedWalk& w : hybrid_dec.walks)
    result.pruned_entities += w.pruned_entities;

  std::optional<Solution> injected = inject_plain_ospf(
      hybrid, topo, ctx.partition, ctx.entities, ctx.catalog, ctx.lsa_table,
      inter, u);
  if (injected.has_value()) result.injected_objective = injected->objective;

  // Full-TE regime.
  IlpModel fullte = build_fullte_model(topo, flows);
  ExternalSolveResult fext =
      solve_external(fullte, config.solver_command, trial_dir / "fullte");
  if (fext.infeasible) throw InfeasibleError("full-TE model infeasible");
  result.fullte.solve_seconds = fext.wall_seconds;
  std::vector<double> zeros(topo.link_count(), 0.0);
  DecodeResult fullte_dec = decode_and_validate(
      fullte, fext.solution, topo, flows, zeros, nullptr, nullptr, nullptr);
  result.fullte.utilization = fullte_dec.utilization;
  result.fullte.total_cost = fullte_dec.objective;
  for (const DecodedWalk& w : fullte_dec.walks)
    result.pruned_entities += w.pruned_entities;

  // Relaxation ordering, slackened by the configured MIP gap.
  const double gap = config.mip_gap;
  if (result.fullte.total_cost >
      result.hybrid.total_cost * (1.0 + gap) + 1e-6)
    throw SolverError("trial " + std::to_string(trial_index) +
                      ": full-TE objective exceeds hybrid objective");
  if (result.injected_objective.has_value() &&
      result.hybrid.total_cost >
          *result.injected_objective * (1.0 + gap) + 1e-6)
    throw SolverError("trial " + std::to_string(trial_index) +
                      ": hybrid objective exceeds the injected OSPF point");
  if (result.hybrid.total_cost >
      result.ospf.total_cost * (1.0 + gap) + 1e-6)
    result.note = "hybrid cost above plain OSPF baseline";

  if (!config.keep_solver_artifacts) {
    std::error_code ec;
    std::filesystem::remove_all(trial_dir, ec);
  }
  return result;
}

Report run_experiment(const Topology& topology, int sdn_count,
                      const ExperimentConfig& config) {
  if (config.trials < 1) throw UsageError("trials must be >= 1");
  std::set<NodeIndex> sdn = place_sdn_nodes(topology, sdn_count);
  Partition partition = derive_partition(topology, sdn);
  ExperimentContext ctx =
      build_experiment_context(topology, partition, config.lsa_mode);

  Report report;
  report.trials_requested = config.trials;
  for (NodeIndex s : partition.sdn_nodes)
    report.sdn_node_names.push_back(topology.name(s));
  report.subdomain_count = static_cast<int>(partition.subdomains.size());
  report.trials.resize(config.trials);

  int workers = config.workers > 0
                    ? config.workers
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, config.trials));

  std::atomic<int> next{0};
  auto worker = [&]() {
    while (true) {
      int i = next.fetch_add(1);
      if (i >= config.trials) return;
      try {
        report.trials[i] = run_trial(topology, ctx, i, config);
      } catch (const Error& e) {
        report.trials[i].index = i;
        report.trials[i].seed = derive_seed(config.base_seed, i);
        report.trials[i].failed = true;
        report.trials[i].failure = e.what();
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  report.histograms.assign(3, std::vector<long long>(kHistogramBins, 0));
  double sum_h = 0.0, sum_f = 0.0, sum_o = 0.0;
  double mean_h = 0.0, mean_f = 0.0;
  for (const TrialResult& t : report.trials) {
    if (t.failed) continue;
    ++report.trials_succeeded;
    report.capacity_extensions += t.capacity_extensions;
    const RegimeResult* regimes[3] = {&t.ospf, &t.hybrid, &t.fullte};
    for (int r = 0; r < 3; ++r)
      for (double u : regimes[r]->utilization)
        ++report.histograms[r][histogram_bin(u)];
    sum_o += t.ospf.total_cost;
    sum_h += t.hybrid.total_cost;
    sum_f += t.fullte.total_cost;
    if (t.ospf.total_cost > 0.0) {
      mean_h += 1.0 - t.hybrid.total_cost / t.ospf.total_cost;
      mean_f += 1.0 - t.fullte.total_cost / t.ospf.total_cost;
    }
  }
  if (report.trials_succeeded == 0) throw SolverError("all trials failed");
  int failed = report.trials_requested - report.trials_succeeded;
  if (failed * 20 > report.trials_requested)  // > 5%
    throw SolverError(std::to_string(failed) + " of " +
                      std::to_string(report.trials_requested) +
                      " trials failed (more than 5%)");

  report.total_cost_ospf = sum_o;
  report.total_cost_hybrid = sum_h;
  report.total_cost_fullte = sum_f;
  report.saving_hybrid = sum_o > 0.0 ? 1.0 - sum_h / sum_o : 0.0;
  report.saving_fullte = sum_o > 0.0 ? 1.0 - sum_f / sum_o : 0.0;
  report.saving_hybrid_mean = mean_h / report.trials_succeeded;
  report.saving_fullte_mean = mean_f / report.trials_succeeded;
  return report;
}

void write_report_files(const Report& report, const ExperimentConfig& config,
                        const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  nlohmann::ordered_json j;
  j["sdn_nodes"] = report.sdn_node_names;
  j["subdomains"] = report.subdomain_count;
  j["trials"] = {{"requested", report.trials_requested},
                 {"succeeded", report.trials_succeeded}};
  j["capacity_extensions"] = report.capacity_extensions;
  j["total_cost"] = {{"ospf", report.total_cost_ospf},
                     {"hybrid", report.total_cost_hybrid},
                     {"fullte", report.total_cost_fullte}};
  j["savings"] = {{"hybrid",
                   {{"ratio_of_sums", report.saving_hybrid},
                    {"mean_of_trials", report.saving_hybrid_mean}}},
                  {"fullte",
                   {{"ratio_of_sums", report.saving_fullte},
                    {"mean_of_trials", report.saving_fullte_mean}}}};
  j["histogram"] = {{"bin_width", 0.05}, {"bins", kHistogramBins}};
  for (size_t r = 0; r < report.regimes.size(); ++r)
    j["histograms"][report.regimes[r]] = report.histograms[r];
  auto jt = nlohmann::ordered_json::array();
  for (const TrialResult& t : report.trials) {
    nlohmann::ordered_json e;
    e["trial"] = t.index;
    e["seed"] = t.seed;
    e["failed"] = t.failed;
    if (t.failed) {
      e["failure"] = t.failure;
    } else {
      e["cost_ospf"] = t.ospf.total_cost;
      e["cost_hybrid"] = t.hybrid.total_cost;
      e["cost_fullte"] = t.fullte.total_cost;
      if (t.injected_objective.has_value())
        e["cost_injected_ospf_point"] = *t.injected_objective;
      e["capacity_extensions"] = t.capacity_extensions;
      e["pruned_entities"] = t.pruned_entities;
      if (!t.note.empty()) e["note"] = t.note;
    }
    jt.push_back(std::move(e));
  }
  j["per_trial"] = std::move(jt);
  j["config"] = {{"trials", config.trials},
                 {"base_seed", config.base_seed},
                 {"demand_low", config.demand_low},
                 {"demand_high", config.demand_high},
                 {"lsa_mode", config.lsa_mode == LsaMode::kMetricOnly
                                  ? "metric-only"
                                  : "all-mappings"},
                 {"mip_gap", config.mip_gap}};
  std::ofstream(dir / "report.json", std::ios::binary) << j.dump(1) << "\n";

  for (size_t r = 0; r < report.regimes.size(); ++r) {
    std::ofstream csv(dir / ("hist_" + report.regimes[r] + ".csv"),
                      std::ios::binary);
    csv << "bin_low,bin_high,count\n";
    for (int b = 0; b < kHistogramBins; ++b) {
      if (b < 20)
        csv << 0.05 * b << "," << 0.05 * (b + 1);
      else
        csv << 1.0 << ",inf";
      csv << "," << report.histograms[r][b] << "\n";
    }
  }
  {
    std::ofstream csv(dir / "savings.csv", std::ios::binary);
    csv.precision(17);
    csv << "regime,saved_cost_ratio_of_sums,saved_cost_mean_of_trials\n";
    csv << "hybrid," << report.saving_hybrid << ","
        << report.saving_hybrid_mean << "\n";
    csv << "fullte," << report.saving_fullte << ","
        << report.saving_fullte_mean << "\n";
  }
  {
    std::ofstream csv(dir / "timings.csv", std::ios::binary);
    csv << "trial,hybrid_solve_seconds,fullte_solve_seconds\n";
    for (const TrialResult& t : report.trials) {
      if (t.failed) continue;
      csv << t.index << "," << t.hybrid.solve_seconds << ","
          << t.fullte.solve_seconds << "\n";
    }
  }
}

}  // namespace hybridte

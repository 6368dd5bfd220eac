// hybridte: traffic-engineering optimizer for hybrid SDN/OSPF networks.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 infeasible,
// 4 solver error.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "hybridte/cost.hpp"
#include "hybridte/errors.hpp"
#include "hybridte/experiment.hpp"
#include "hybridte/lsa.hpp"
#include "hybridte/model.hpp"
#include "hybridte/ospf.hpp"
#include "hybridte/partition.hpp"
#include "hybridte/solve.hpp"
#include "hybridte/topology.hpp"

namespace {

constexpr const char* kVersion = "hybridte 1.0.0";

hybridte::Topology load_topology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw hybridte::DataError("cannot open topology file: " + path);
  // SNDlib native files start with a '?' banner or contain section headers;
  // the internal format starts with NODE/LINK directives.
  std::string head;
  std::getline(in, head);
  in.seekg(0);
  if (head.rfind("NODE", 0) == 0 || head.rfind("#", 0) == 0 ||
      head.rfind("LINK", 0) == 0) {
    // '#'-led files could be either; try internal first, fall back.
    try {
      return hybridte::parse_internal(in);
    } catch (const hybridte::DataError&) {
      std::ifstream retry(path);
      return hybridte::parse_sndlib(retry);
    }
  }
  return hybridte::parse_sndlib(in);
}

hybridte::Partition load_partition(const std::string& path,
                                   const hybridte::Topology& topology) {
  std::ifstream in(path);
  if (!in) throw hybridte::DataError("cannot open partition file: " + path);
  return hybridte::parse_partition(in, topology);
}

std::vector<hybridte::Flow> load_demands(const std::string& path,
                                         const hybridte::Topology& topology) {
  std::ifstream in(path);
  if (!in) throw hybridte::DataError("cannot open demands file: " + path);
  return hybridte::parse_demands(in, topology);
}

void print_utilization_table(const hybridte::Topology& topology,
                             const std::vector<double>& util) {
  std::cout << "link utilization:\n";
  for (hybridte::LinkIndex l = 0; l < topology.link_count(); ++l) {
    const hybridte::Link& link = topology.link(l);
    std::printf("  %-24s %8.4f  cost %.6f\n",
                (topology.name(link.a) + "-" + topology.name(link.b)).c_str(),
                util[l], hybridte::link_cost(util[l]));
  }
}

int cmd_partition(const std::string& topo_path, int sdn_count,
                  const std::string& out_path) {
  using namespace hybridte;
  Topology topology = load_topology(topo_path);
  std::set<NodeIndex> sdn = place_sdn_nodes(topology, sdn_count);
  Partition partition = derive_partition(topology, sdn);

  std::string text = serialize_partition(topology, partition);
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw DataError("cannot write " + out_path);
    out << text;
  } else {
    std::cout << text;
  }

  // Inter-flow count over the full mesh (each ordered pair once).
  int inter = 0;
  for (NodeIndex s = 0; s < topology.node_count(); ++s)
    for (NodeIndex d = 0; d < topology.node_count(); ++d)
      if (s != d && !partition.share_subdomain(s, d)) ++inter;
  std::cout << partition.subdomains.size() << " subdomains"
            << (partition.degenerate ? " (degenerate)" : "") << ", " << inter
            << " inter-sub-domain flows of "
            << topology.node_count() * (topology.node_count() - 1) << "\n";
  return 0;
}

int cmd_validate(const std::string& topo_path,
                 const std::string& partition_path) {
  using namespace hybridte;
  Topology topology = load_topology(topo_path);
  std::cout << topology.node_count() << " nodes, " << topology.link_count()
            << " links\n";
  if (!partition_path.empty()) {
    Partition partition = load_partition(partition_path, topology);
    RoutingEntities ents = build_entities(topology, partition);
    LsaCatalog catalog =
        enumerate_lsa_sets(topology, partition, LsaMode::kMetricOnly);
    std::cout << partition.subdomains.size() << " subdomains, "
              << ents.paths.size() << " OSPF paths, "
              << ents.sdn_links.size() << " SDN links, " << catalog.sets.size()
              << " realizable LSA sets\n";
  }
  return 0;
}

struct OptimizeArgs {
  std::string topology, partition, demands, mode = "hybrid";
  std::string lsa_mode = "metric-only";
  std::string solver_cmd;
  std::string emit_lp;
  std::string out_dir = "optimize_out";
  std::string dump_lsa;
  bool oracle = false;
  bool paper_literal = false;
};

int cmd_optimize(const OptimizeArgs& args) {
  using namespace hybridte;
  namespace fs = std::filesystem;
  Topology topology = load_topology(args.topology);
  std::vector<Flow> flows = load_demands(args.demands, topology);

  if (args.mode == "ospf") {
    if (!topology.all_capacities_assigned())
      throw DataError("ospf mode requires assigned capacities");
    OspfRouting routing = ospf_route_all(topology, flows);
    std::vector<double> util(topology.link_count());
    double total = 0.0;
    for (LinkIndex l = 0; l < topology.link_count(); ++l) {
      util[l] = routing.link_loads[l] / topology.link(l).capacity;
      total += link_cost(util[l]);
    }
    std::printf("objective %.9f\n", total);
    print_utilization_table(topology, util);
    for (size_t i = 0; i < flows.size(); ++i) {
      std::cout << "  " << topology.name(flows[i].src) << "->"
                << topology.name(flows[i].dst) << ":";
      for (NodeIndex n : routing.flow_paths[i])
        std::cout << " " << topology.name(n);
      std::cout << "\n";
    }
    return 0;
  }

  IlpModel model;
  Partition partition;
  ExperimentContext ctx;
  std::vector<Flow> model_flows;
  std::vector<double> u(topology.link_count(), 0.0);
  if (args.mode == "hybrid") {
    if (args.partition.empty())
      throw UsageError("--partition is required for hybrid mode");
    partition = load_partition(args.partition, topology);
    ctx = build_experiment_context(topology, partition,
                                   args.lsa_mode == "all-mappings"
                                       ? LsaMode::kAllMappings
                                       : LsaMode::kMetricOnly);
    if (!args.dump_lsa.empty()) {
      std::ofstream out(args.dump_lsa, std::ios::binary);
      if (!out) throw DataError("cannot write " + args.dump_lsa);
      out << serialize_catalog(topology, ctx.catalog);
    }
    auto [intra, inter] = classify_flows(ctx.partition, flows);
    u = intra_utilization(topology, ctx.partition, intra);
    model_flows = inter;
    HybridModelOptions opts;
    opts.paper_literal = args.paper_literal;
    model = build_hybrid_model(topology, ctx.partition, ctx.entities,
                               ctx.catalog, ctx.lsa_table, inter, u, opts);
    std::cout << "hybrid model: " << model.var_count() << " variables, "
              << model.rows.size() << " constraints, " << inter.size()
              << " inter flows\n";
  } else if (args.mode == "fullte") {
    model = build_fullte_model(topology, flows);
    model_flows = flows;
    std::cout << "fullte model: " << model.var_count() << " variables, "
              << model.rows.size() << " constraints\n";
  } else {
    throw UsageError("unknown mode: " + args.mode);
  }

  if (!args.emit_lp.empty()) {
    fs::create_directories(args.emit_lp);
    std::ofstream lp(fs::path(args.emit_lp) / "model.lp", std::ios::binary);
    write_lp(model, lp);
    std::cout << "wrote " << (fs::path(args.emit_lp) / "model.lp").string()
              << "\n";
    return 0;
  }

  Solution solution;
  if (args.oracle) {
    if (args.mode != "hybrid")
      throw UsageError("--oracle applies to hybrid mode only");
    solution = solve_exhaustive(model, topology, ctx.partition, ctx.entities,
                                ctx.catalog, ctx.lsa_table, model_flows, u);
  } else {
    if (args.solver_cmd.empty())
      throw UsageError("--solver-cmd is required unless --oracle/--emit-lp");
    ExternalSolveResult ext =
        solve_external(model, args.solver_cmd, args.out_dir);
    if (ext.infeasible) throw InfeasibleError("model infeasible");
    solution = std::move(ext.solution);
  }

  DecodeResult decode = decode_and_validate(
      model, solution, topology, model_flows, u,
      args.mode == "hybrid" ? &ctx.entities : nullptr,
      args.mode == "hybrid" ? &ctx.catalog : nullptr,
      args.mode == "hybrid" ? &ctx.lsa_table : nullptr);

  fs::create_directories(args.out_dir);
  std::ofstream(fs::path(args.out_dir) / "decode.json", std::ios::binary)
      << serialize_decode(model, topology, model_flows, decode);

  std::printf("objective %.9f\n", decode.objective);
  print_utilization_table(topology, decode.utilization);
  std::cout << "routes:\n";
  for (size_t i = 0; i < model_flows.size(); ++i) {
    std::cout << "  " << topology.name(model_flows[i].src) << "->"
              << topology.name(model_flows[i].dst) << ":";
    for (NodeIndex n : decode.walks[i].nodes)
      std::cout << " " << topology.name(n);
    std::cout << "\n";
  }
  for (const std::string& note : decode.notes)
    std::cerr << "note: " << note << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Traffic engineering for hybrid SDN/OSPF networks"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // partition
  auto* part = app.add_subcommand("partition",
                                  "Place SDN nodes and derive sub-domains");
  std::string part_topo, part_out;
  int part_k = 0;
  part->add_option("--topology", part_topo, "Topology file")->required();
  part->add_option("--sdn-count", part_k, "Number of SDN nodes")->required();
  part->add_option("--out", part_out, "Partition output file");

  // optimize
  auto* opt = app.add_subcommand("optimize", "Build and solve one instance");
  OptimizeArgs oa;
  opt->add_option("--topology", oa.topology, "Topology file")->required();
  opt->add_option("--partition", oa.partition, "Partition file");
  opt->add_option("--demands", oa.demands, "Demands CSV")->required();
  opt->add_option("--mode", oa.mode, "hybrid|fullte|ospf");
  opt->add_option("--lsa-mode", oa.lsa_mode, "metric-only|all-mappings");
  opt->add_option("--solver-cmd", oa.solver_cmd, "External MILP solver");
  opt->add_option("--emit-lp", oa.emit_lp, "Write model.lp to DIR and exit");
  opt->add_option("--out", oa.out_dir, "Artifact directory");
  opt->add_option("--dump-lsa", oa.dump_lsa, "Write the LSA catalog to FILE");
  opt->add_flag("--oracle", oa.oracle, "Exhaustive oracle (size-gated)");
  opt->add_flag("--paper-literal", oa.paper_literal,
                "Literal continuity constraints");

  // experiment
  auto* exp = app.add_subcommand("experiment", "Monte-Carlo trial protocol");
  std::string exp_topo, exp_solver, exp_out = "experiment_out";
  std::string exp_lsa_mode = "metric-only";
  int exp_k = 3, exp_trials = 100, exp_workers = 0;
  std::uint64_t exp_seed = 1;
  double exp_gap = 0.0;
  bool exp_keep = false;
  exp->add_option("--topology", exp_topo, "Topology file")->required();
  exp->add_option("--sdn-count", exp_k, "Number of SDN nodes")->required();
  exp->add_option("--trials", exp_trials, "Trial count")->required();
  exp->add_option("--seed", exp_seed, "Base seed")->required();
  exp->add_option("--solver-cmd", exp_solver, "External MILP solver");
  exp->add_option("--workers", exp_workers, "Concurrent trials");
  exp->add_option("--out", exp_out, "Report directory");
  exp->add_option("--lsa-mode", exp_lsa_mode, "metric-only|all-mappings");
  exp->add_option("--mip-gap", exp_gap,
                  "Relative gap configured in the solver command (slackens "
                  "ordering checks)");
  exp->add_flag("--keep-artifacts", exp_keep, "Keep trial_<i>/ directories");

  // validate
  auto* val = app.add_subcommand("validate", "Parse and report entity counts");
  std::string val_topo, val_part;
  val->add_option("--topology", val_topo, "Topology file")->required();
  val->add_option("--partition", val_part, "Partition file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (part->parsed()) return cmd_partition(part_topo, part_k, part_out);
    if (opt->parsed()) return cmd_optimize(oa);
    if (val->parsed()) return cmd_validate(val_topo, val_part);
    if (exp->parsed()) {
      using namespace hybridte;
      if (exp_solver.empty() && exp_trials > 0)
        throw UsageError("--solver-cmd is required for experiments");
      Topology topology = load_topology(exp_topo);
      ExperimentConfig config;
      config.trials = exp_trials;
      config.base_seed = exp_seed;
      config.solver_command = exp_solver;
      config.workers = exp_workers;
      config.work_dir = std::filesystem::path(exp_out) / "work";
      config.keep_solver_artifacts = exp_keep;
      config.mip_gap = exp_gap;
      config.lsa_mode = exp_lsa_mode == "all-mappings"
                            ? LsaMode::kAllMappings
                            : LsaMode::kMetricOnly;
      Report report = run_experiment(topology, exp_k, config);
      write_report_files(report, config, exp_out);
      std::printf("subdomains %d\n", report.subdomain_count);
      std::printf("saving hybrid %.4f fullte %.4f (ratio of sums, %d/%d trials)\n",
                  report.saving_hybrid, report.saving_fullte,
                  report.trials_succeeded, report.trials_requested);
      return 0;
    }
  } catch (const hybridte::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const hybridte::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const hybridte::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 3;
  } catch (const hybridte::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

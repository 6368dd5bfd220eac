#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hybridte/model.hpp"

namespace hybridte {

struct ExternalSolveResult {
  bool infeasible = false;
  Solution solution;  // valid when !infeasible
  double wall_seconds = 0.0;
};

// Runs `<solver_command> <model.lp> <solution.out>` in workdir. The wrapper
// must write one "name value" line per nonzero variable plus an
// "OBJECTIVE <value>" line; exit 0 = optimal, 2 = infeasible, anything else
// is a solver error. Binaries are rounded at tolerance 1e-6 and the
// objective is cross-checked against the sum of COST variables.
ExternalSolveResult solve_external(const IlpModel& model,
                                   const std::string& solver_command,
                                   const std::filesystem::path& workdir);

// Solution-file grammar, exposed for tests and the CLI.
Solution parse_solution_text(const IlpModel& model, std::istream& in);

// Exhaustive oracle for the hybrid model: enumerates every LSA-consistent
// combination of flowchart-valid walks and returns the optimum with a
// deterministic tie-break (lexicographically smallest variable vector).
// Gated: <= 8 nodes, <= 12 inter flows, <= 64 LSA sets in the catalog.
Solution solve_exhaustive(const IlpModel& model, const Topology& topology,
                          const Partition& partition,
                          const RoutingEntities& entities,
                          const LsaCatalog& catalog,
                          const std::vector<std::vector<char>>& lsa_table,
                          const std::vector<Flow>& inter_flows,
                          const std::vector<double>& intra_util);

struct WalkEntity {
  enum Kind { kPath, kSdnLink, kArc } kind;
  int id;
};

struct DecodedWalk {
  std::vector<WalkEntity> entities;
  std::vector<NodeIndex> nodes;  // expanded node sequence source..dest
  int pruned_entities = 0;       // disjoint-cycle entities dropped
};

struct DecodeResult {
  std::vector<DecodedWalk> walks;    // one per model flow
  std::vector<double> utilization;   // per link, retained walks + intra
  std::vector<double> link_cost;     // cost(utilization)
  double objective = 0.0;            // sum of link_cost
  std::vector<std::string> notes;    // pruning log
};

// Assembles per-flow walks from a solution, prunes disjoint cycles,
// validates the flowchart grammar (OSPF? (SDN+ OSPF?)*), node-simplicity
// and LSA consistency, and recomputes utilizations and costs. Throws
// SolverError naming the flow and node on any violation. For full-TE
// models pass nullptr for the hybrid context.
DecodeResult decode_and_validate(
    const IlpModel& model, const Solution& solution, const Topology& topology,
    const std::vector<Flow>& flows, const std::vector<double>& intra_util,
    const RoutingEntities* entities, const LsaCatalog* catalog,
    const std::vector<std::vector<char>>* lsa_table);

// Expresses plain-OSPF routing of the inter flows as a feasible point of
// the hybrid model (canonical path segments, per-destination plain exit
// mappings). Returns nullopt when strict-metric advertisements cannot
// represent the plain exits (equal-cost-tie pathologies); on success the
// returned point satisfies every model row (verified).
std::optional<Solution> inject_plain_ospf(
    const IlpModel& model, const Topology& topology, const Partition& partition,
    const RoutingEntities& entities, const LsaCatalog& catalog,
    const std::vector<std::vector<char>>& lsa_table,
    const std::vector<Flow>& inter_flows,
    const std::vector<double>& intra_util);

// decode.json payload for the CLI.
std::string serialize_decode(const IlpModel& model, const Topology& topology,
                             const std::vector<Flow>& flows,
                             const DecodeResult& decode);

}  // namespace hybridte

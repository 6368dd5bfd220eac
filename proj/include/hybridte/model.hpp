#pragma once

#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "hybridte/lsa.hpp"
#include "hybridte/ospf.hpp"
#include "hybridte/partition.hpp"
#include "hybridte/topology.hpp"

namespace hybridte {

enum class VarKind {
  kPathUse,    // Rp_f<fid>_p<pid>
  kSdnUse,     // Rl_f<fid>_l<sdnid>     (hybrid)
  kArcUse,     // Rl_f<fid>_l<arcid>     (full TE; arcid = 2*link + dir)
  kLsaChoice,  // LSA_k<kid>_d<did>
  kUtil,       // U_l<lid>
  kLinkCost,   // COST_l<lid>
};

struct VarInfo {
  VarKind kind;
  int flow = -1;      // kPathUse / kSdnUse / kArcUse
  int entity = -1;    // path id, sdn-link id, or arc id
  int set = -1;       // kLsaChoice
  NodeIndex dest = -1;
  LinkIndex link = -1;
};

struct LinTerm {
  int var;
  double coef;
};

enum class Rel { kLe, kGe, kEq };

struct RowConstraint {
  std::string name;
  std::vector<LinTerm> terms;
  Rel rel;
  double rhs;
};

struct IlpModel {
  enum class Kind { kHybrid, kFullTe } kind = Kind::kHybrid;
  std::vector<std::string> var_names;
  std::vector<char> is_binary;
  std::vector<VarInfo> var_info;
  std::vector<RowConstraint> rows;
  std::vector<LinTerm> objective;  // minimized
  int num_flows = 0;

  int var_count() const { return static_cast<int>(var_names.size()); }
  // -1 when the name is unknown.
  int find_var(const std::string& name) const;

  std::unordered_map<std::string, int> var_index;
};

struct HybridModelOptions {
  // Emit the continuity constraints exactly as printed in the source
  // formulation instead of the corrected conservation + transition form.
  bool paper_literal = false;
};

// The hybrid sub-domain model: routes the inter-sub-domain flows over OSPF
// paths and SDN links subject to LSA-consistency, on top of the fixed
// intra-flow utilization u_l.
IlpModel build_hybrid_model(const Topology& topology,
                            const Partition& partition,
                            const RoutingEntities& entities,
                            const LsaCatalog& catalog,
                            const std::vector<std::vector<char>>& lsa_table,
                            const std::vector<Flow>& inter_flows,
                            const std::vector<double>& intra_util,
                            const HybridModelOptions& options = {});

// Reference regime: unsplittable single-path routing of every flow on
// directed link binaries with node conservation; same cost machinery.
IlpModel build_fullte_model(const Topology& topology,
                            const std::vector<Flow>& flows);

// CPLEX LP format, LF line endings, ASCII, deterministic order.
void write_lp(const IlpModel& model, std::ostream& out);

struct Solution {
  std::vector<double> values;  // aligned with model variables
  double objective = 0.0;
};

// Objective of an explicit assignment (used for injected feasible points).
double evaluate_objective(const IlpModel& model,
                          const std::vector<double>& values);

// Verifies every row within tol; returns the first violated row name or
// empty string.
std::string check_solution_feasible(const IlpModel& model,
                                    const std::vector<double>& values,
                                    double tol = 1e-6);

}  // namespace hybridte

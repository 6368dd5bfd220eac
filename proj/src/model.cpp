#include "hybridte/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>

#include "hybridte/cost.hpp"
#include "hybridte/errors.hpp"

namespace hybridte {

namespace {

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_flows(const Topology& topology, const std::vector<Flow>& flows) {
  for (const Flow& f : flows) {
    if (f.src < 0 || f.src >= topology.node_count() || f.dst < 0 ||
        f.dst >= topology.node_count())
      throw DataError("flow endpoint outside topology");
    if (f.src == f.dst) throw DataError("flow with identical endpoints");
    if (f.demand <= 0.0) throw DataError("non-positive flow demand");
  }
  if (!topology.all_capacities_assigned())
    throw DataError("model build requires assigned capacities");
}

struct ModelBuilder {
  IlpModel model;

  int add_var(std::string name, bool binary, VarInfo info) {
    int id = model.var_count();
    model.var_index.emplace(name, id);
    model.var_names.push_back(std::move(name));
    model.is_binary.push_back(binary ? 1 : 0);
    model.var_info.push_back(info);
    return id;
  }

  void add_row(std::string name, std::vector<LinTerm> terms, Rel rel,
               double rhs) {
    model.rows.push_back({std::move(name), std::move(terms), rel, rhs});
  }

  // U_l and COST_l variables plus the cost lower-bound rows; shared by both
  // model kinds. Returns ids of the U variables.
  std::vector<int> add_cost_machinery(const Topology& topology) {
    std::vector<int> u_vars(topology.link_count());
    std::vector<int> cost_vars(topology.link_count());
    for (LinkIndex l = 0; l < topology.link_count(); ++l) {
      VarInfo ui{VarKind::kUtil};
      ui.link = l;
      u_vars[l] = add_var("U_l" + std::to_string(l), false, ui);
    }
    for (LinkIndex l = 0; l < topology.link_count(); ++l) {
      VarInfo ci{VarKind::kLinkCost};
      ci.link = l;
      cost_vars[l] = add_var("COST_l" + std::to_string(l), false, ci);
      model.objective.push_back({cost_vars[l], 1.0});
    }
    return u_vars;
  }

  void add_cost_rows(const Topology& topology) {
    // Variables were created in link order: find them back by name.
    for (LinkIndex l = 0; l < topology.link_count(); ++l) {
      int u = model.var_index.at("U_l" + std::to_string(l));
      int c = model.var_index.at("COST_l" + std::to_string(l));
      for (size_t i = 0; i < kCostLines.size(); ++i) {
        add_row("c10_cost_l" + std::to_string(l) + "_i" + std::to_string(i),
                {{c, 1.0}, {u, -kCostLines[i].gradient}}, Rel::kGe,
                -kCostLines[i].intercept);
      }
    }
  }
};

}  // namespace

int IlpModel::find_var(const std::string& name) const {
  auto it = var_index.find(name);
  return it == var_index.end() ? -1 : it->second;
}

IlpModel build_hybrid_model(const Topology& topology,
                            const Partition& partition,
                            const RoutingEntities& entities,
                            const LsaCatalog& catalog,
                            const std::vector<std::vector<char>>& lsa_table,
                            const std::vector<Flow>& inter_flows,
                            const std::vector<double>& intra_util,
                            const HybridModelOptions& options) {
  check_flows(topology, inter_flows);
  if (lsa_table.size() != catalog.sets.size())
    throw DataError("lsa table does not match catalog");
  for (const auto& row : lsa_table)
    if (row.size() != entities.paths.size())
      throw DataError("lsa table does not match path set");
  if (intra_util.size() != static_cast<size_t>(topology.link_count()))
    throw DataError("intra utilization vector size mismatch");

  ModelBuilder b;
  b.model.kind = IlpModel::Kind::kHybrid;
  b.model.num_flows = static_cast<int>(inter_flows.size());

  // Nodes reachable as the target of some SDN link can host a path start
  // mid-walk; a path from anywhere else is only usable from the flow source.
  std::vector<char> sdn_target(topology.node_count(), 0);
  for (const SdnLink& l : entities.sdn_links) sdn_target[l.target] = 1;

  auto border_of = [&](const OspfPath& p) {
    const SubDomain& sd = partition.subdomains[p.subdomain];
    return std::binary_search(sd.border_nodes.begin(), sd.border_nodes.end(),
                              p.target);
  };
  auto internal_to = [&](NodeIndex d, int subdomain) {
    const SubDomain& sd = partition.subdomains[subdomain];
    return std::binary_search(sd.internal_nodes.begin(),
                              sd.internal_nodes.end(), d);
  };

  // Per-flow relevant entities and their variables.
  std::vector<std::vector<int>> flow_paths(inter_flows.size());
  std::vector<std::vector<int>> flow_sdn(inter_flows.size());
  std::vector<std::vector<int>> path_var(inter_flows.size()),
      sdn_var(inter_flows.size());
  for (size_t fi = 0; fi < inter_flows.size(); ++fi) {
    const Flow& f = inter_flows[fi];
    for (const OspfPath& p : entities.paths) {
      if (p.source == f.dst || p.target == f.src) continue;
      bool border_term = border_of(p);
      if (!border_term && p.target != f.dst) continue;
      // Border-terminal paths in the destination's own sub-domain have no
      // LSA selection (tuned advertisements cover external destinations
      // only) and can never be used.
      if (border_term && internal_to(f.dst, p.subdomain)) continue;
      if (p.source != f.src && !sdn_target[p.source]) continue;
      flow_paths[fi].push_back(p.id);
    }
    for (const SdnLink& l : entities.sdn_links) {
      if (l.target == f.src || l.source == f.dst) continue;
      flow_sdn[fi].push_back(l.id);
    }
    path_var[fi].assign(entities.paths.size(), -1);
    sdn_var[fi].assign(entities.sdn_links.size(), -1);
    for (int pid : flow_paths[fi]) {
      VarInfo info{VarKind::kPathUse};
      info.flow = static_cast<int>(fi);
      info.entity = pid;
      path_var[fi][pid] =
          b.add_var("Rp_f" + std::to_string(fi) + "_p" + std::to_string(pid),
                    true, info);
    }
    for (int lid : flow_sdn[fi]) {
      VarInfo info{VarKind::kSdnUse};
      info.flow = static_cast<int>(fi);
      info.entity = lid;
      sdn_var[fi][lid] =
          b.add_var("Rl_f" + std::to_string(fi) + "_l" + std::to_string(lid),
                    true, info);
    }
  }

  // LSA selection variables per (destination, sub-domain).
  std::set<NodeIndex> dests;
  for (const Flow& f : inter_flows) dests.insert(f.dst);
  // (d, subdomain) -> var id per set id
  std::map<std::pair<NodeIndex, int>, std::vector<std::pair<int, int>>>
      selection;  // list of (set id, var id)
  for (NodeIndex d : dests) {
    for (const SubDomain& sd : partition.subdomains) {
      if (catalog.sets_of_subdomain.empty()) break;
      const auto& sets = catalog.sets_of_subdomain[sd.index];
      if (sets.empty()) continue;
      if (internal_to(d, sd.index)) continue;
      auto& vars = selection[{d, sd.index}];
      for (int k : sets) {
        VarInfo info{VarKind::kLsaChoice};
        info.set = k;
        info.dest = d;
        vars.push_back(
            {k, b.add_var("LSA_k" + std::to_string(k) + "_d" +
                              std::to_string(d),
                          true, info)});
      }
    }
  }

  std::vector<int> u_vars = b.add_cost_machinery(topology);

  // Routing constraint families, per flow.
  for (size_t fi = 0; fi < inter_flows.size(); ++fi) {
    const Flow& f = inter_flows[fi];
    const std::string fs = std::to_string(fi);

    // C1 start at source / C2 end at destination.
    std::vector<LinTerm> start, end;
    for (int pid : flow_paths[fi]) {
      if (entities.paths[pid].source == f.src)
        start.push_back({path_var[fi][pid], 1.0});
      if (entities.paths[pid].target == f.dst)
        end.push_back({path_var[fi][pid], 1.0});
    }
    for (int lid : flow_sdn[fi]) {
      if (entities.sdn_links[lid].source == f.src)
        start.push_back({sdn_var[fi][lid], 1.0});
      if (entities.sdn_links[lid].target == f.dst)
        end.push_back({sdn_var[fi][lid], 1.0});
    }
    if (start.empty() || end.empty())
      throw InfeasibleError("flow " + topology.name(f.src) + "->" +
                            topology.name(f.dst) +
                            " has no candidate start or end entity");
    b.add_row("c1_src_f" + fs, std::move(start), Rel::kEq, 1.0);
    b.add_row("c2_dst_f" + fs, std::move(end), Rel::kEq, 1.0);

    if (!options.paper_literal) {
      // C3/C4 in corrected conservation form: entity flow conservation at
      // intermediate nodes plus the OSPF->OSPF transition ban.
      for (NodeIndex n = 0; n < topology.node_count(); ++n) {
        if (n == f.src || n == f.dst) continue;
        std::vector<LinTerm> cons;
        std::vector<LinTerm> trans_in, trans_out;
        for (int pid : flow_paths[fi]) {
          const OspfPath& p = entities.paths[pid];
          if (p.target == n) {
            cons.push_back({path_var[fi][pid], 1.0});
            trans_in.push_back({path_var[fi][pid], 1.0});
          }
          if (p.source == n) {
            cons.push_back({path_var[fi][pid], -1.0});
            trans_out.push_back({path_var[fi][pid], 1.0});
          }
        }
        for (int lid : flow_sdn[fi]) {
          const SdnLink& l = entities.sdn_links[lid];
          if (l.target == n) cons.push_back({sdn_var[fi][lid], 1.0});
          if (l.source == n) cons.push_back({sdn_var[fi][lid], -1.0});
        }
        if (!cons.empty())
          b.add_row("c3_cons_f" + fs + "_n" + std::to_string(n),
                    std::move(cons), Rel::kEq, 0.0);
        if (!trans_in.empty() && !trans_out.empty()) {
          std::vector<LinTerm> trans = trans_in;
          trans.insert(trans.end(), trans_out.begin(), trans_out.end());
          b.add_row("c4_trans_f" + fs + "_n" + std::to_string(n),
                    std::move(trans), Rel::kLe, 1.0);
        }
      }
    } else {
      // Literal continuity constraints as printed in the formulation.
      for (int pid : flow_paths[fi]) {
        const OspfPath& p = entities.paths[pid];
        std::vector<LinTerm> row{{path_var[fi][pid], 1.0}};
        for (int lid : flow_sdn[fi])
          if (entities.sdn_links[lid].source == p.target)
            row.push_back({sdn_var[fi][lid], -1.0});
        b.add_row("c3lit_f" + fs + "_p" + std::to_string(pid), std::move(row),
                  Rel::kEq, p.target == f.dst ? 1.0 : 0.0);
      }
      for (int lid : flow_sdn[fi]) {
        const SdnLink& l = entities.sdn_links[lid];
        std::vector<LinTerm> row{{sdn_var[fi][lid], 1.0}};
        for (int mid : flow_sdn[fi])
          if (entities.sdn_links[mid].source == l.target)
            row.push_back({sdn_var[fi][mid], -1.0});
        for (int pid : flow_paths[fi])
          if (entities.paths[pid].source == l.target)
            row.push_back({path_var[fi][pid], -1.0});
        b.add_row("c4lit_f" + fs + "_l" + std::to_string(lid), std::move(row),
                  Rel::kEq, l.target == f.dst ? 1.0 : 0.0);
      }
    }

    // C5: any intermediate node is traversed at most once (entity degree).
    for (NodeIndex n = 0; n < topology.node_count(); ++n) {
      if (n == f.src || n == f.dst) continue;
      std::vector<LinTerm> deg;
      for (int pid : flow_paths[fi]) {
        const OspfPath& p = entities.paths[pid];
        if (p.source == n || p.target == n)
          deg.push_back({path_var[fi][pid], 1.0});
      }
      for (int lid : flow_sdn[fi]) {
        const SdnLink& l = entities.sdn_links[lid];
        if (l.source == n || l.target == n)
          deg.push_back({sdn_var[fi][lid], 1.0});
      }
      if (deg.size() > 2)
        b.add_row("c5_once_f" + fs + "_n" + std::to_string(n), std::move(deg),
                  Rel::kLe, 2.0);
    }

    // C6 (endpoints never intermediate) holds by variable pruning: nothing
    // entering the source or leaving the destination was given a variable.

    // C7: LSA consistency for border-terminal paths.
    for (int pid : flow_paths[fi]) {
      const OspfPath& p = entities.paths[pid];
      if (!border_of(p)) continue;
      auto it = selection.find({f.dst, p.subdomain});
      if (it == selection.end())
        throw DataError("missing lsa selection for sub-domain " +
                        std::to_string(p.subdomain));
      std::vector<LinTerm> row{{path_var[fi][pid], 1.0}};
      for (auto [k, var] : it->second)
        if (lsa_table[k][pid]) row.push_back({var, -1.0});
      b.add_row("c7_lsa_f" + fs + "_p" + std::to_string(pid), std::move(row),
                Rel::kLe, 0.0);
    }
  }

  // C8: exactly one LSA set per sub-domain per external destination.
  for (const auto& [key, vars] : selection) {
    std::vector<LinTerm> row;
    for (auto [k, var] : vars) row.push_back({var, 1.0});
    b.add_row("c8_one_sd" + std::to_string(key.second) + "_d" +
                  std::to_string(key.first),
              std::move(row), Rel::kEq, 1.0);
  }

  // C9: utilization definition per link.
  for (LinkIndex li = 0; li < topology.link_count(); ++li) {
    const double cap = topology.link(li).capacity;
    std::vector<LinTerm> row{{u_vars[li], 1.0}};
    for (size_t fi = 0; fi < inter_flows.size(); ++fi) {
      const double unit = inter_flows[fi].demand / cap;
      for (int lid : flow_sdn[fi])
        if (entities.sdn_links[lid].link == li)
          row.push_back({sdn_var[fi][lid], -unit});
      for (int pid : flow_paths[fi]) {
        const OspfPath& p = entities.paths[pid];
        if (std::find(p.links.begin(), p.links.end(), li) != p.links.end())
          row.push_back({path_var[fi][pid], -unit});
      }
    }
    b.add_row("c9_util_l" + std::to_string(li), std::move(row), Rel::kEq,
              intra_util[li]);
  }

  b.add_cost_rows(topology);
  return std::move(b.model);
}

IlpModel build_fullte_model(const Topology& topology,
                            const std::vector<Flow>& flows) {
  check_flows(topology, flows);

  ModelBuilder b;
  b.model.kind = IlpModel::Kind::kFullTe;
  b.model.num_flows = static_cast<int>(flows.size());

  const int m = topology.link_count();
  // Arc id: 2*link for a->b, 2*link+1 for b->a.
  std::vector<std::vector<int>> arc_var(flows.size());
  for (size_t fi = 0; fi < flows.size(); ++fi) {
    arc_var[fi].resize(2 * m);
    for (int arc = 0; arc < 2 * m; ++arc) {
      VarInfo info{VarKind::kArcUse};
      info.flow = static_cast<int>(fi);
      info.entity = arc;
      info.link = arc / 2;
      arc_var[fi][arc] =
          b.add_var("Rl_f" + std::to_string(fi) + "_l" + std::to_string(arc),
                    true, info);
    }
  }

  std::vector<int> u_vars = b.add_cost_machinery(topology);

  for (size_t fi = 0; fi < flows.size(); ++fi) {
    const Flow& f = flows[fi];
    for (NodeIndex n = 0; n < topology.node_count(); ++n) {
      std::vector<LinTerm> row;
      for (LinkIndex li = 0; li < m; ++li) {
        const Link& l = topology.link(li);
        if (l.a == n) {
          row.push_back({arc_var[fi][2 * li], 1.0});       // a->b leaves n
          row.push_back({arc_var[fi][2 * li + 1], -1.0});  // b->a enters n
        } else if (l.b == n) {
          row.push_back({arc_var[fi][2 * li], -1.0});
          row.push_back({arc_var[fi][2 * li + 1], 1.0});
        }
      }
      double rhs = n == f.src ? 1.0 : (n == f.dst ? -1.0 : 0.0);
      b.add_row(
          "cons_f" + std::to_string(fi) + "_n" + std::to_string(n),
          std::move(row), Rel::kEq, rhs);
    }
  }

  for (LinkIndex li = 0; li < m; ++li) {
    const double cap = topology.link(li).capacity;
    std::vector<LinTerm> row{{u_vars[li], 1.0}};
    for (size_t fi = 0; fi < flows.size(); ++fi) {
      const double unit = flows[fi].demand / cap;
      row.push_back({arc_var[fi][2 * li], -unit});
      row.push_back({arc_var[fi][2 * li + 1], -unit});
    }
    b.add_row("c9_util_l" + std::to_string(li), std::move(row), Rel::kEq, 0.0);
  }

  b.add_cost_rows(topology);
  return std::move(b.model);
}

void write_lp(const IlpModel& model, std::ostream& out) {
  out << "Minimize\n obj:";
  for (const LinTerm& t : model.objective)
    out << " +" << fmt_num(t.coef) << " " << model.var_names[t.var];
  out << "\nSubject To\n";
  for (const RowConstraint& row : model.rows) {
    out << " " << row.name << ":";
    for (const LinTerm& t : row.terms) {
      out << (t.coef < 0 ? " -" : " +") << fmt_num(std::abs(t.coef)) << " "
          << model.var_names[t.var];
    }
    switch (row.rel) {
      case Rel::kLe: out << " <= "; break;
      case Rel::kGe: out << " >= "; break;
      case Rel::kEq: out << " = "; break;
    }
    out << fmt_num(row.rhs) << "\n";
  }
  out << "Bounds\n";
  for (int v = 0; v < model.var_count(); ++v)
    if (!model.is_binary[v]) out << " " << model.var_names[v] << " >= 0\n";
  out << "Binary\n";
  for (int v = 0; v < model.var_count(); ++v)
    if (model.is_binary[v]) out << " " << model.var_names[v] << "\n";
  out << "End\n";
}

double evaluate_objective(const IlpModel& model,
                          const std::vector<double>& values) {
  double total = 0.0;
  for (const LinTerm& t : model.objective) total += t.coef * values[t.var];
  return total;
}

std::string check_solution_feasible(const IlpModel& model,
                                    const std::vector<double>& values,
                                    double tol) {
  for (const RowConstraint& row : model.rows) {
    double lhs = 0.0;
    for (const LinTerm& t : row.terms) lhs += t.coef * values[t.var];
    bool ok = true;
    switch (row.rel) {
      case Rel::kLe: ok = lhs <= row.rhs + tol; break;
      case Rel::kGe: ok = lhs >= row.rhs - tol; break;
      case Rel::kEq: ok = std::abs(lhs - row.rhs) <= tol; break;
    }
    if (!ok) return row.name;
  }
  for (int v = 0; v < model.var_count(); ++v) {
    if (values[v] < -tol) return model.var_names[v];
    if (model.is_binary[v] &&
        (values[v] > 1.0 + tol ||
         std::min(values[v], 1.0 - values[v]) > tol))
      return model.var_names[v];
  }
  return {};
}

}  // namespace hybridte

#include "hybridte/solve.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "hybridte/cost.hpp"
#include "hybridte/errors.hpp"

#include "json.hpp"

namespace hybridte {

namespace {

constexpr double kBinaryTol = 1e-6;
constexpr double kValueTol = 1e-6;

bool is_one(double v) { return v > 0.5; }

}  // namespace

Solution parse_solution_text(const IlpModel& model, std::istream& in) {
  Solution sol;
  sol.values.assign(model.var_count(), 0.0);
  bool have_objective = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream iss(line);
    std::string name;
    double value;
    if (!(iss >> name)) continue;
    if (!(iss >> value))
      throw SolverError("unparseable solution line " + std::to_string(lineno));
    std::string extra;
    if (iss >> extra)
      throw SolverError("trailing tokens on solution line " +
                        std::to_string(lineno));
    if (name == "OBJECTIVE") {
      sol.objective = value;
      have_objective = true;
      continue;
    }
    int var = model.find_var(name);
    if (var < 0) throw SolverError("unknown variable in solution: " + name);
    sol.values[var] = value;
  }
  if (!have_objective) throw SolverError("solution file missing OBJECTIVE");

  for (int v = 0; v < model.var_count(); ++v) {
    if (!model.is_binary[v]) continue;
    double x = sol.values[v];
    if (x < -kBinaryTol || x > 1.0 + kBinaryTol ||
        std::min(std::abs(x), std::abs(x - 1.0)) > kBinaryTol)
      throw SolverError("binary variable " + model.var_names[v] +
                        " outside tolerance: " + std::to_string(x));
    sol.values[v] = is_one(x) ? 1.0 : 0.0;
  }
  double cost_sum = 0.0;
  for (int v = 0; v < model.var_count(); ++v)
    if (model.var_info[v].kind == VarKind::kLinkCost) cost_sum += sol.values[v];
  if (std::abs(cost_sum - sol.objective) > 1e-6)
    throw SolverError("objective does not match sum of COST variables");
  return sol;
}

ExternalSolveResult solve_external(const IlpModel& model,
                                   const std::string& solver_command,
                                   const std::filesystem::path& workdir) {
  namespace fs = std::filesystem;
  fs::create_directories(workdir);
  fs::path lp_path = workdir / "model.lp";
  fs::path sol_path = workdir / "solution.out";
  fs::path log_path = workdir / "solver.log";
  {
    std::ofstream lp(lp_path, std::ios::binary);
    if (!lp) throw SolverError("cannot write " + lp_path.string());
    write_lp(model, lp);
  }
  std::error_code ec;
  fs::remove(sol_path, ec);

  std::string cmd = solver_command + " \"" + lp_path.string() + "\" \"" +
                    sol_path.string() + "\" > \"" + log_path.string() +
                    "\" 2>&1";
  auto t0 = std::chrono::steady_clock::now();
  int rc = std::system(cmd.c_str());
  auto t1 = std::chrono::steady_clock::now();

  ExternalSolveResult result;
  result.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
  if (rc == -1) throw SolverError("failed to launch solver: " + cmd);
  int code = WIFEXITED(rc) ? WEXITSTATUS(rc) : 128;
  if (code == 2) {
    result.infeasible = true;
    return result;
  }
  if (code != 0)
    throw SolverError("solver exited with code " + std::to_string(code) +
                      " (see " + log_path.string() + ")");
  std::ifstream in(sol_path);
  if (!in) throw SolverError("solver wrote no solution file");
  result.solution = parse_solution_text(model, in);
  return result;
}

// ---------------------------------------------------------------------------
// Exhaustive oracle
// ---------------------------------------------------------------------------

namespace {

struct CandidateWalk {
  std::vector<WalkEntity> entities;
  std::vector<NodeIndex> expanded;
  std::vector<LinkIndex> links;
  std::vector<int> gated_paths;  // border-terminal path ids used
};

struct WalkEnumerator {
  const Topology& topology;
  const Partition& partition;
  const RoutingEntities& entities;
  NodeIndex src, dst;
  std::vector<std::vector<int>> paths_by_source;
  std::vector<std::vector<int>> sdn_by_source;
  std::vector<CandidateWalk> out;

  CandidateWalk current;
  std::vector<char> visited;

  bool path_usable(const OspfPath& p) const {
    const SubDomain& sd = partition.subdomains[p.subdomain];
    bool border_terminal = std::binary_search(
        sd.border_nodes.begin(), sd.border_nodes.end(), p.target);
    if (border_terminal)
      return !std::binary_search(sd.internal_nodes.begin(),
                                 sd.internal_nodes.end(), dst);
    return p.target == dst;
  }

  void dfs(NodeIndex cur, bool last_was_path) {
    if (cur == dst) {
      out.push_back(current);
      return;
    }
    if (!last_was_path) {
      for (int pid : paths_by_source[cur]) {
        const OspfPath& p = entities.paths[pid];
        if (!path_usable(p)) continue;
        bool clash = false;
        for (size_t i = 1; i < p.nodes.size(); ++i)
          if (visited[p.nodes[i]]) {
            clash = true;
            break;
          }
        if (clash) continue;
        for (size_t i = 1; i < p.nodes.size(); ++i) visited[p.nodes[i]] = 1;
        current.entities.push_back({WalkEntity::kPath, pid});
        current.expanded.insert(current.expanded.end(), p.nodes.begin() + 1,
                                p.nodes.end());
        current.links.insert(current.links.end(), p.links.begin(),
                             p.links.end());
        const SubDomain& sd = partition.subdomains[p.subdomain];
        bool gated = std::binary_search(sd.border_nodes.begin(),
                                        sd.border_nodes.end(), p.target);
        if (gated) current.gated_paths.push_back(pid);

        dfs(p.target, true);

        if (gated) current.gated_paths.pop_back();
        current.links.resize(current.links.size() - p.links.size());
        current.expanded.resize(current.expanded.size() - (p.nodes.size() - 1));
        current.entities.pop_back();
        for (size_t i = 1; i < p.nodes.size(); ++i) visited[p.nodes[i]] = 0;
      }
    }
    for (int lid : sdn_by_source[cur]) {
      const SdnLink& l = entities.sdn_links[lid];
      if (visited[l.target]) continue;
      visited[l.target] = 1;
      current.entities.push_back({WalkEntity::kSdnLink, lid});
      current.expanded.push_back(l.target);
      current.links.push_back(l.link);

      dfs(l.target, false);

      current.links.pop_back();
      current.expanded.pop_back();
      current.entities.pop_back();
      visited[l.target] = 0;
    }
  }

  std::vector<CandidateWalk> enumerate() {
    paths_by_source.assign(topology.node_count(), {});
    sdn_by_source.assign(topology.node_count(), {});
    for (const OspfPath& p : entities.paths)
      paths_by_source[p.source].push_back(p.id);
    for (const SdnLink& l : entities.sdn_links)
      sdn_by_source[l.source].push_back(l.id);
    visited.assign(topology.node_count(), 0);
    visited[src] = 1;
    current.expanded = {src};
    dfs(src, false);
    return std::move(out);
  }
};

}  // namespace

Solution solve_exhaustive(const IlpModel& model, const Topology& topology,
                          const Partition& partition,
                          const RoutingEntities& entities,
                          const LsaCatalog& catalog,
                          const std::vector<std::vector<char>>& lsa_table,
                          const std::vector<Flow>& inter_flows,
                          const std::vector<double>& intra_util) {
  if (topology.node_count() > 8)
    throw InfeasibleError("oracle size gate exceeded: " +
                          std::to_string(topology.node_count()) +
                          " nodes > 8");
  if (inter_flows.size() > 12)
    throw InfeasibleError("oracle size gate exceeded: " +
                          std::to_string(inter_flows.size()) +
                          " inter flows > 12");
  if (catalog.sets.size() > 64)
    throw InfeasibleError("oracle size gate exceeded: " +
                          std::to_string(catalog.sets.size()) +
                          " LSA sets > 64");

  const int nf = static_cast<int>(inter_flows.size());
  const int nl = topology.link_count();

  // Candidate walks per flow, in deterministic DFS order.
  std::vector<std::vector<CandidateWalk>> walks(nf);
  for (int fi = 0; fi < nf; ++fi) {
    WalkEnumerator we{topology, partition, entities, inter_flows[fi].src,
                      inter_flows[fi].dst};
    walks[fi] = we.enumerate();
    if (walks[fi].empty())
      throw InfeasibleError("oracle: flow " +
                            topology.name(inter_flows[fi].src) + "->" +
                            topology.name(inter_flows[fi].dst) +
                            " has no valid walk");
  }

  // Selection pairs (subdomain, destination) and their compatible-set masks.
  std::map<std::pair<int, NodeIndex>, std::uint64_t> full_mask;
  for (const Flow& f : inter_flows) {
    for (const SubDomain& sd : partition.subdomains) {
      if (std::binary_search(sd.internal_nodes.begin(),
                             sd.internal_nodes.end(), f.dst))
        continue;
      if (catalog.sets_of_subdomain[sd.index].empty()) continue;
      std::uint64_t mask = 0;
      for (int k : catalog.sets_of_subdomain[sd.index])
        mask |= std::uint64_t{1} << k;
      full_mask[{sd.index, f.dst}] = mask;
    }
  }

  // lsa-set masks per path: which sets allow a given gated path.
  std::vector<std::uint64_t> allow_mask(entities.paths.size(), 0);
  for (size_t k = 0; k < catalog.sets.size(); ++k)
    for (size_t p = 0; p < entities.paths.size(); ++p)
      if (lsa_table[k][p]) allow_mask[p] |= std::uint64_t{1} << k;

  std::vector<double> base_util = intra_util;
  auto total_cost = [&](const std::vector<double>& util) {
    double c = 0.0;
    for (int l = 0; l < nl; ++l) c += link_cost(util[l]);
    return c;
  };

  constexpr double kTieEps = 1e-12;
  double best_obj = std::numeric_limits<double>::infinity();
  std::vector<int> best_choice;
  std::map<std::pair<int, NodeIndex>, std::uint64_t> best_masks;

  std::vector<int> choice(nf, -1);
  std::vector<double> util = base_util;
  std::map<std::pair<int, NodeIndex>, std::uint64_t> masks = full_mask;

  // Lexicographic comparison of two complete choices via their variable
  // vectors; smaller vector wins ties.
  auto lex_better = [&](const std::vector<int>& cand,
                        const std::map<std::pair<int, NodeIndex>, std::uint64_t>&
                            cand_masks) {
    auto vec = [&](const std::vector<int>& ch,
                   const std::map<std::pair<int, NodeIndex>, std::uint64_t>& mk) {
      std::vector<double> v(model.var_count(), 0.0);
      for (int fi = 0; fi < nf; ++fi)
        for (const WalkEntity& e : walks[fi][ch[fi]].entities) {
          const char* prefix = e.kind == WalkEntity::kPath ? "Rp_f" : "Rl_f";
          const char* mid = e.kind == WalkEntity::kPath ? "_p" : "_l";
          int var = model.find_var(prefix + std::to_string(fi) + mid +
                                   std::to_string(e.id));
          if (var >= 0) v[var] = 1.0;
        }
      for (const auto& [key, mask] : mk) {
        int k = 63 - std::countl_zero(mask);  // largest compatible id
        int var = model.find_var("LSA_k" + std::to_string(k) + "_d" +
                                 std::to_string(key.second));
        if (var >= 0) v[var] = 1.0;
      }
      return v;
    };
    return vec(cand, cand_masks) < vec(best_choice, best_masks);
  };

  std::function<void(int)> rec = [&](int fi) {
    double partial = total_cost(util);
    if (partial > best_obj + kTieEps) return;
    if (fi == nf) {
      if (partial < best_obj - kTieEps ||
          (partial <= best_obj + kTieEps &&
           (best_choice.empty() || lex_better(choice, masks)))) {
        best_obj = std::min(best_obj, partial);
        best_choice = choice;
        best_masks = masks;
      }
      return;
    }
    const Flow& f = inter_flows[fi];
    for (size_t wi = 0; wi < walks[fi].size(); ++wi) {
      const CandidateWalk& w = walks[fi][wi];
      // Intersect LSA masks for this flow's destination.
      std::vector<std::pair<std::pair<int, NodeIndex>, std::uint64_t>> saved;
      bool dead = false;
      for (int pid : w.gated_paths) {
        const OspfPath& p = entities.paths[pid];
        auto key = std::make_pair(p.subdomain, f.dst);
        auto it = masks.find(key);
        if (it == masks.end()) {
          dead = true;
          break;
        }
        saved.push_back({key, it->second});
        it->second &= allow_mask[pid];
        if (it->second == 0) {
          dead = true;
          break;
        }
      }
      if (!dead) {
        for (LinkIndex l : w.links)
          util[l] += f.demand / topology.link(l).capacity;
        choice[fi] = static_cast<int>(wi);
        rec(fi + 1);
        choice[fi] = -1;
        for (LinkIndex l : w.links)
          util[l] -= f.demand / topology.link(l).capacity;
      }
      for (auto it = saved.rbegin(); it != saved.rend(); ++it)
        masks[it->first] = it->second;
    }
  };
  rec(0);

  if (best_choice.empty() && nf > 0)
    throw InfeasibleError("oracle: no jointly LSA-consistent routing exists");

  // Materialize the solution vector.
  Solution sol;
  sol.values.assign(model.var_count(), 0.0);
  std::vector<double> final_util = base_util;
  for (int fi = 0; fi < nf; ++fi) {
    const CandidateWalk& w = walks[fi][best_choice[fi]];
    for (const WalkEntity& e : w.entities) {
      const char* prefix = e.kind == WalkEntity::kPath ? "Rp_f" : "Rl_f";
      const char* mid = e.kind == WalkEntity::kPath ? "_p" : "_l";
      int var = model.find_var(prefix + std::to_string(fi) + mid +
                               std::to_string(e.id));
      if (var < 0)
        throw SolverError("oracle used an entity absent from the model");
      sol.values[var] = 1.0;
    }
    for (LinkIndex l : w.links)
      final_util[l] += inter_flows[fi].demand / topology.link(l).capacity;
  }
  for (const auto& [key, mask] : (nf > 0 ? best_masks : full_mask)) {
    if (mask == 0) throw SolverError("oracle: empty selection mask");
    int k = 63 - std::countl_zero(mask);
    int var = model.find_var("LSA_k" + std::to_string(k) + "_d" +
                             std::to_string(key.second));
    if (var < 0) throw SolverError("oracle: missing LSA variable");
    sol.values[var] = 1.0;
  }
  for (int l = 0; l < nl; ++l) {
    int uv = model.find_var("U_l" + std::to_string(l));
    int cv = model.find_var("COST_l" + std::to_string(l));
    sol.values[uv] = final_util[l];
    sol.values[cv] = link_cost(final_util[l]);
    sol.objective += sol.values[cv];
  }
  return sol;
}

// ---------------------------------------------------------------------------
// Decoding
// ---------------------------------------------------------------------------

namespace {

struct RawEntity {
  WalkEntity ref;
  NodeIndex source, target;
  std::vector<NodeIndex> expanded;  // nodes after source
  std::vector<LinkIndex> links;
};

std::string flow_label(const Topology& t, const Flow& f) {
  return t.name(f.src) + "->" + t.name(f.dst);
}

}  // namespace

DecodeResult decode_and_validate(
    const IlpModel& model, const Solution& solution, const Topology& topology,
    const std::vector<Flow>& flows, const std::vector<double>& intra_util,
    const RoutingEntities* entities, const LsaCatalog* catalog,
    const std::vector<std::vector<char>>* lsa_table) {
  const bool hybrid = model.kind == IlpModel::Kind::kHybrid;
  if (hybrid && (entities == nullptr || catalog == nullptr ||
                 lsa_table == nullptr))
    throw SolverError("decode: hybrid context missing");
  if (flows.size() != static_cast<size_t>(model.num_flows))
    throw SolverError("decode: flow list does not match model");

  DecodeResult out;
  out.walks.resize(flows.size());
  out.utilization = intra_util;
  const int nl = topology.link_count();

  // Selected LSA set per (subdomain, destination).
  std::map<std::pair<int, NodeIndex>, int> selected;
  if (hybrid) {
    for (int v = 0; v < model.var_count(); ++v) {
      const VarInfo& info = model.var_info[v];
      if (info.kind != VarKind::kLsaChoice || !is_one(solution.values[v]))
        continue;
      int sd = catalog->subdomain_of[info.set];
      auto key = std::make_pair(sd, info.dest);
      if (selected.count(key))
        throw SolverError("decode: multiple LSA sets selected for sub-domain " +
                          std::to_string(sd));
      selected[key] = info.set;
    }
  }

  std::vector<double> pruned_util(nl, 0.0);
  for (size_t fi = 0; fi < flows.size(); ++fi) {
    const Flow& f = flows[fi];
    // Collect selected entities of this flow.
    std::vector<RawEntity> raw;
    for (int v = 0; v < model.var_count(); ++v) {
      const VarInfo& info = model.var_info[v];
      if (info.flow != static_cast<int>(fi) || !is_one(solution.values[v]))
        continue;
      RawEntity e;
      if (info.kind == VarKind::kPathUse) {
        const OspfPath& p = entities->paths[info.entity];
        e.ref = {WalkEntity::kPath, p.id};
        e.source = p.source;
        e.target = p.target;
        e.expanded.assign(p.nodes.begin() + 1, p.nodes.end());
        e.links = p.links;
      } else if (info.kind == VarKind::kSdnUse) {
        const SdnLink& l = entities->sdn_links[info.entity];
        e.ref = {WalkEntity::kSdnLink, l.id};
        e.source = l.source;
        e.target = l.target;
        e.expanded = {l.target};
        e.links = {l.link};
      } else if (info.kind == VarKind::kArcUse) {
        const Link& l = topology.link(info.entity / 2);
        bool forward = info.entity % 2 == 0;
        e.ref = {WalkEntity::kArc, info.entity};
        e.source = forward ? l.a : l.b;
        e.target = forward ? l.b : l.a;
        e.expanded = {e.target};
        e.links = {static_cast<LinkIndex>(info.entity / 2)};
      } else {
        continue;
      }
      raw.push_back(std::move(e));
    }

    // Assemble from the source, excising loops; leftovers are disjoint
    // cycles and get pruned.
    std::vector<char> used(raw.size(), 0);
    std::vector<int> seq;  // indices into raw
    NodeIndex cur = f.src;
    std::map<NodeIndex, size_t> first_seen{{cur, 0}};
    while (cur != f.dst) {
      int next = -1;
      for (size_t i = 0; i < raw.size(); ++i)
        if (!used[i] && raw[i].source == cur) {
          if (next >= 0)
            throw SolverError("decode: flow " + flow_label(topology, f) +
                              ": entities do not assemble into a single walk "
                              "(branch at " +
                              topology.name(cur) + ")");
          next = static_cast<int>(i);
        }
      if (next < 0)
        throw SolverError("decode: flow " + flow_label(topology, f) +
                          ": entities do not assemble into a single walk "
                          "(stuck at " +
                          topology.name(cur) + ")");
      used[next] = 1;
      seq.push_back(next);
      cur = raw[next].target;
      auto seen = first_seen.find(cur);
      if (seen != first_seen.end()) {
        // Loop back to an earlier node: excise the cycle portion.
        size_t keep = seen->second;
        for (size_t j = keep; j < seq.size(); ++j) {
          for (LinkIndex l : raw[seq[j]].links)
            pruned_util[l] += f.demand / topology.link(l).capacity;
        }
        out.walks[fi].pruned_entities +=
            static_cast<int>(seq.size() - keep);
        // Remove nodes introduced by the excised part.
        for (auto it = first_seen.begin(); it != first_seen.end();)
          it = it->second > keep ? first_seen.erase(it) : std::next(it);
        seq.resize(keep);
      } else {
        first_seen[cur] = seq.size();
      }
    }
    // Anything unused is a disjoint cycle.
    int leftovers = 0;
    for (size_t i = 0; i < raw.size(); ++i)
      if (!used[i]) {
        ++leftovers;
        for (LinkIndex l : raw[i].links)
          pruned_util[l] += f.demand / topology.link(l).capacity;
      }
    if (leftovers > 0) out.walks[fi].pruned_entities += leftovers;
    if (out.walks[fi].pruned_entities > 0)
      out.notes.push_back("flow " + flow_label(topology, f) + ": pruned " +
                          std::to_string(out.walks[fi].pruned_entities) +
                          " cycle entities");

    // Validate grammar and node-simplicity on the retained walk.
    DecodedWalk& walk = out.walks[fi];
    walk.nodes = {f.src};
    std::set<NodeIndex> visited{f.src};
    for (size_t j = 0; j < seq.size(); ++j) {
      const RawEntity& e = raw[seq[j]];
      if (j > 0 && hybrid && e.ref.kind == WalkEntity::kPath &&
          raw[seq[j - 1]].ref.kind == WalkEntity::kPath)
        throw SolverError("decode: flow " + flow_label(topology, f) +
                          ": OSPF path follows OSPF path at " +
                          topology.name(e.source));
      for (NodeIndex n : e.expanded) {
        if (!visited.insert(n).second)
          throw SolverError("decode: flow " + flow_label(topology, f) +
                            ": node " + topology.name(n) +
                            " traversed more than once");
        walk.nodes.push_back(n);
      }
      walk.entities.push_back(e.ref);
    }
    if (walk.nodes.back() != f.dst)
      throw SolverError("decode: flow " + flow_label(topology, f) +
                        ": walk does not end at the destination");

    // LSA consistency of retained border-terminal paths.
    if (hybrid) {
      for (const WalkEntity& e : walk.entities) {
        if (e.kind != WalkEntity::kPath) continue;
        const OspfPath& p = entities->paths[e.id];
        const SubDomain& sd =
            *catalog->distances[p.subdomain].subdomain;
        if (!std::binary_search(sd.border_nodes.begin(), sd.border_nodes.end(),
                                p.target))
          continue;
        auto it = selected.find({p.subdomain, f.dst});
        if (it == selected.end() || !(*lsa_table)[it->second][p.id])
          throw SolverError("decode: flow " + flow_label(topology, f) +
                            ": path to " + topology.name(p.target) +
                            " inconsistent with the selected LSA set at " +
                            topology.name(p.source));
      }
    }

    for (int idx : seq)
      for (LinkIndex l : raw[idx].links)
        out.utilization[l] += f.demand / topology.link(l).capacity;
  }

  // Recomputed utilization must match the solver's values minus pruned
  // contributions.
  for (int l = 0; l < nl; ++l) {
    int uv = model.find_var("U_l" + std::to_string(l));
    double solver_u = solution.values[uv];
    if (std::abs(out.utilization[l] - (solver_u - pruned_util[l])) > kValueTol)
      throw SolverError("decode: utilization mismatch on link " +
                        std::to_string(l));
    out.link_cost.push_back(link_cost(out.utilization[l]));
    out.objective += out.link_cost.back();
  }
  if (std::abs(out.objective - solution.objective) > 1e-6)
    throw SolverError("decode: pruning changed the objective by " +
                      std::to_string(out.objective - solution.objective));
  return out;
}

// ---------------------------------------------------------------------------
// Plain-OSPF injection
// ---------------------------------------------------------------------------

std::optional<Solution> inject_plain_ospf(
    const IlpModel& model, const Topology& topology, const Partition& partition,
    const RoutingEntities& entities, const LsaCatalog& catalog,
    const std::vector<std::vector<char>>& lsa_table,
    const std::vector<Flow>& inter_flows,
    const std::vector<double>& intra_util) {
  (void)lsa_table;
  // Global shortest-path trees for every needed source.
  std::map<NodeIndex, ShortestPathTree> trees;
  auto tree_of = [&](NodeIndex s) -> const ShortestPathTree& {
    auto it = trees.find(s);
    if (it == trees.end())
      it = trees.emplace(s, shortest_paths(topology, s)).first;
    return it->second;
  };
  auto first_sdn_on = [&](const std::vector<NodeIndex>& path) -> NodeIndex {
    for (NodeIndex n : path)
      if (topology.is_sdn(n)) return n;
    return -1;
  };

  // Entity lookup (source, target) -> path id.
  std::map<std::pair<NodeIndex, NodeIndex>, int> path_at;
  for (const OspfPath& p : entities.paths)
    path_at[{p.source, p.target}] = p.id;

  std::set<NodeIndex> dests;
  for (const Flow& f : inter_flows) dests.insert(f.dst);

  Solution sol;
  sol.values.assign(model.var_count(), 0.0);

  // Plain exit mapping per (subdomain, destination); must exist in the
  // catalog (i.e., be strictly realizable) for the injection to work.
  for (NodeIndex d : dests) {
    for (const SubDomain& sd : partition.subdomains) {
      if (std::binary_search(sd.internal_nodes.begin(),
                             sd.internal_nodes.end(), d))
        continue;
      if (catalog.sets_of_subdomain[sd.index].empty()) continue;
      std::vector<NodeIndex> exits(sd.internal_nodes.size());
      for (size_t si = 0; si < sd.internal_nodes.size(); ++si) {
        const ShortestPathTree& tree = tree_of(sd.internal_nodes[si]);
        NodeIndex exit = first_sdn_on(tree.path[d]);
        if (exit < 0) return std::nullopt;
        exits[si] = exit;
      }
      int chosen = -1;
      for (int k : catalog.sets_of_subdomain[sd.index])
        if (catalog.sets[k].mapping.exit_border == exits) {
          chosen = k;
          break;
        }
      if (chosen < 0) return std::nullopt;  // plain mapping not realizable
      int var = model.find_var("LSA_k" + std::to_string(chosen) + "_d" +
                               std::to_string(d));
      if (var < 0) return std::nullopt;
      sol.values[var] = 1.0;
    }
  }

  // Decompose each flow's plain path into canonical entities.
  std::vector<double> util = intra_util;
  for (size_t fi = 0; fi < inter_flows.size(); ++fi) {
    const Flow& f = inter_flows[fi];
    const auto& path = tree_of(f.src).path[f.dst];
    if (path.empty()) return std::nullopt;
    size_t i = 0;
    while (i + 1 < path.size()) {
      int var = -1;
      std::vector<LinkIndex> seg_links;
      if (topology.is_sdn(path[i])) {
        // One SDN hop.
        LinkIndex li = topology.find_link(path[i], path[i + 1]);
        int sdn_id = -1;
        for (const SdnLink& l : entities.sdn_links)
          if (l.source == path[i] && l.target == path[i + 1]) sdn_id = l.id;
        if (sdn_id < 0) return std::nullopt;
        var = model.find_var("Rl_f" + std::to_string(fi) + "_l" +
                             std::to_string(sdn_id));
        seg_links = {li};
        i += 1;
      } else {
        // Maximal non-SDN run up to the next SDN node or the destination,
        // replaced by the canonical P path with the same endpoints.
        size_t j = i + 1;
        while (j + 1 < path.size() && !topology.is_sdn(path[j])) ++j;
        auto it = path_at.find({path[i], path[j]});
        if (it == path_at.end()) return std::nullopt;
        var = model.find_var("Rp_f" + std::to_string(fi) + "_p" +
                             std::to_string(it->second));
        seg_links = entities.paths[it->second].links;
        i = j;
      }
      if (var < 0) return std::nullopt;
      sol.values[var] = 1.0;
      for (LinkIndex l : seg_links)
        util[l] += f.demand / topology.link(l).capacity;
    }
  }

  for (LinkIndex l = 0; l < topology.link_count(); ++l) {
    sol.values[model.find_var("U_l" + std::to_string(l))] = util[l];
    double c = link_cost(util[l]);
    sol.values[model.find_var("COST_l" + std::to_string(l))] = c;
    sol.objective += c;
  }

  if (!check_solution_feasible(model, sol.values).empty()) return std::nullopt;
  return sol;
}

std::string serialize_decode(const IlpModel& model, const Topology& topology,
                             const std::vector<Flow>& flows,
                             const DecodeResult& decode) {
  nlohmann::ordered_json j;
  j["model"] = model.kind == IlpModel::Kind::kHybrid ? "hybrid" : "fullte";
  j["objective"] = decode.objective;
  auto links = nlohmann::ordered_json::array();
  for (LinkIndex l = 0; l < topology.link_count(); ++l) {
    const Link& link = topology.link(l);
    links.push_back({{"link", topology.name(link.a) + "-" +
                                  topology.name(link.b)},
                     {"utilization", decode.utilization[l]},
                     {"cost", decode.link_cost[l]}});
  }
  j["links"] = std::move(links);
  auto jflows = nlohmann::ordered_json::array();
  for (size_t fi = 0; fi < flows.size(); ++fi) {
    std::vector<std::string> names;
    for (NodeIndex n : decode.walks[fi].nodes)
      names.push_back(topology.name(n));
    jflows.push_back({{"src", topology.name(flows[fi].src)},
                      {"dst", topology.name(flows[fi].dst)},
                      {"demand", flows[fi].demand},
                      {"walk", names},
                      {"pruned_entities", decode.walks[fi].pruned_entities}});
  }
  j["flows"] = std::move(jflows);
  j["notes"] = decode.notes;
  return j.dump(1) + "\n";
}

}  // namespace hybridte

#include "hybridte/ospf.hpp"

#include <algorithm>
#include <queue>

#include "hybridte/errors.hpp"

namespace hybridte {

namespace {

// Lexicographic comparison of node sequences by name rank.
bool lex_less(const Topology& t, const std::vector<NodeIndex>& x,
              const std::vector<NodeIndex>& y) {
  const size_t m = std::min(x.size(), y.size());
  for (size_t i = 0; i < m; ++i) {
    int rx = t.name_rank(x[i]), ry = t.name_rank(y[i]);
    if (rx != ry) return rx < ry;
  }
  return x.size() < y.size();
}

}  // namespace

ShortestPathTree shortest_paths(const Topology& topology, NodeIndex src,
                                const std::vector<NodeIndex>* within,
                                const std::set<NodeIndex>* absorbing) {
  const int n = topology.node_count();
  std::vector<char> allowed(n, within == nullptr ? 1 : 0);
  if (within != nullptr)
    for (NodeIndex v : *within) allowed[v] = 1;
  if (src < 0 || src >= n || !allowed[src])
    throw DataError("shortest_paths: source outside graph");

  ShortestPathTree tree;
  tree.cost.assign(n, -1);
  tree.path.assign(n, {});
  tree.cost[src] = 0;
  tree.path[src] = {src};

  // Metrics are >= 1, so nodes of equal distance never relax each other;
  // paths are final once the node is popped regardless of pop order among
  // ties.
  using Item = std::pair<std::int64_t, NodeIndex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  std::vector<char> done(n, 0);
  queue.push({0, src});
  while (!queue.empty()) {
    auto [d, u] = queue.top();
    queue.pop();
    if (done[u]) continue;
    done[u] = 1;
    if (absorbing != nullptr && absorbing->count(u)) continue;
    for (const AdjacentLink& al : topology.adjacent(u)) {
      NodeIndex v = al.neighbor;
      if (!allowed[v] || done[v]) continue;
      std::int64_t nd = d + topology.link(al.link).metric;
      if (tree.cost[v] < 0 || nd < tree.cost[v]) {
        tree.cost[v] = nd;
        tree.path[v] = tree.path[u];
        tree.path[v].push_back(v);
        queue.push({nd, v});
      } else if (nd == tree.cost[v]) {
        std::vector<NodeIndex> cand = tree.path[u];
        cand.push_back(v);
        if (lex_less(topology, cand, tree.path[v]))
          tree.path[v] = std::move(cand);
      }
    }
  }
  return tree;
}

RoutingEntities build_entities(const Topology& topology,
                               const Partition& partition) {
  RoutingEntities ents;

  // L^sdn: one directed link per (SDN node, neighbor) adjacency.
  for (NodeIndex s : partition.sdn_nodes)
    for (const AdjacentLink& al : topology.adjacent(s))
      ents.sdn_links.push_back(
          {static_cast<int>(ents.sdn_links.size()), s, al.neighbor, al.link});

  // P: per sub-domain, from every internal (non-SDN) source to every other
  // member, on the sub-domain subgraph with SDN-sourced hops forbidden.
  std::set<NodeIndex> absorbing(partition.sdn_nodes.begin(),
                                partition.sdn_nodes.end());
  for (const SubDomain& sd : partition.subdomains) {
    std::vector<NodeIndex> members = sd.internal_nodes;
    members.insert(members.end(), sd.border_nodes.begin(),
                   sd.border_nodes.end());
    for (NodeIndex src : sd.internal_nodes) {
      ShortestPathTree tree =
          shortest_paths(topology, src, &members, &absorbing);
      for (NodeIndex dst : members) {
        if (dst == src || !tree.reachable(dst)) continue;
        OspfPath p;
        p.id = static_cast<int>(ents.paths.size());
        p.source = src;
        p.target = dst;
        p.nodes = tree.path[dst];
        p.cost = tree.cost[dst];
        p.subdomain = sd.index;
        for (size_t i = 0; i + 1 < p.nodes.size(); ++i)
          p.links.push_back(topology.find_link(p.nodes[i], p.nodes[i + 1]));
        ents.paths.push_back(std::move(p));
      }
    }
  }
  return ents;
}

OspfRouting ospf_route_all(const Topology& topology,
                           const std::vector<Flow>& flows) {
  OspfRouting out;
  out.flow_paths.resize(flows.size());
  out.link_loads.assign(topology.link_count(), 0.0);

  std::map<NodeIndex, ShortestPathTree> trees;
  for (size_t i = 0; i < flows.size(); ++i) {
    const Flow& f = flows[i];
    auto it = trees.find(f.src);
    if (it == trees.end())
      it = trees.emplace(f.src, shortest_paths(topology, f.src)).first;
    const ShortestPathTree& tree = it->second;
    if (!tree.reachable(f.dst))
      throw DataError("unreachable flow destination");  // connected graphs only
    const auto& path = tree.path[f.dst];
    out.flow_paths[i] = path;
    for (size_t j = 0; j + 1 < path.size(); ++j)
      out.link_loads[topology.find_link(path[j], path[j + 1])] += f.demand;
  }
  return out;
}

std::vector<double> intra_utilization(const Topology& topology,
                                      const Partition& partition,
                                      const std::vector<Flow>& intra_flows) {
  (void)partition;
  if (!topology.all_capacities_assigned())
    throw DataError("intra_utilization: capacity unassigned");
  OspfRouting routing = ospf_route_all(topology, intra_flows);
  std::vector<double> u(topology.link_count(), 0.0);
  for (LinkIndex l = 0; l < topology.link_count(); ++l)
    u[l] = routing.link_loads[l] / topology.link(l).capacity;
  return u;
}

}  // namespace hybridte

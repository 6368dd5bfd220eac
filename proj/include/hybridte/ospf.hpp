#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "hybridte/partition.hpp"
#include "hybridte/topology.hpp"

namespace hybridte {

// Unique least-cost path inside one sub-domain from a non-SDN source. No
// hop of the path leaves an SDN node (such a hop is an SDN link by
// definition and can never be part of an OSPF path).
struct OspfPath {
  int id = -1;
  NodeIndex source = -1;
  NodeIndex target = -1;
  std::vector<NodeIndex> nodes;  // source..target
  std::vector<LinkIndex> links;
  std::int64_t cost = 0;
  int subdomain = -1;
};

// Directed hop out of an SDN node; freely programmable by the controller.
struct SdnLink {
  int id = -1;
  NodeIndex source = -1;  // SDN
  NodeIndex target = -1;
  LinkIndex link = -1;
};

struct RoutingEntities {
  std::vector<OspfPath> paths;
  std::vector<SdnLink> sdn_links;
};

struct ShortestPathTree {
  // Per target: total metric, -1 cost if unreachable.
  std::vector<std::int64_t> cost;
  // Per target: full node sequence source..target (empty if unreachable;
  // the source itself gets the singleton sequence).
  std::vector<std::vector<NodeIndex>> path;

  bool reachable(NodeIndex t) const { return cost[t] >= 0; }
};

// Single-source least-cost paths over the whole topology, or over the
// node subset `within` when given. Nodes in `absorbing` take no outgoing
// hop (used to forbid SDN-sourced hops when building OSPF paths). Among
// equal-cost paths the lexicographically smallest node-name sequence wins.
ShortestPathTree shortest_paths(
    const Topology& topology, NodeIndex src,
    const std::vector<NodeIndex>* within = nullptr,
    const std::set<NodeIndex>* absorbing = nullptr);

// P and L^sdn for a partition. Path ids index RoutingEntities::paths; SDN
// link ids index sdn_links; both orderings are deterministic.
RoutingEntities build_entities(const Topology& topology,
                               const Partition& partition);

struct OspfRouting {
  // Per flow (input order): node sequence of its least-cost path.
  std::vector<std::vector<NodeIndex>> flow_paths;
  // Per link: accumulated demand in Gbit/s (both directions share the
  // undirected link).
  std::vector<double> link_loads;
};

// Plain OSPF: every flow on its global unique least-cost path.
OspfRouting ospf_route_all(const Topology& topology,
                           const std::vector<Flow>& flows);

// u_l: per-link utilization caused by intra-sub-domain flows under plain
// OSPF. Requires capacities. Throws DataError on an unassigned capacity.
std::vector<double> intra_utilization(const Topology& topology,
                                      const Partition& partition,
                                      const std::vector<Flow>& intra_flows);

}  // namespace hybridte

#pragma once

#include <iosfwd>
#include <set>
#include <utility>
#include <vector>

#include "hybridte/topology.hpp"

namespace hybridte {

// One OSPF sub-domain: a connected component of non-SDN nodes plus the SDN
// border nodes linked into it.
struct SubDomain {
  int index = -1;
  std::vector<NodeIndex> internal_nodes;  // sorted, non-SDN
  std::vector<NodeIndex> border_nodes;    // sorted, SDN
  std::vector<LinkIndex> internal_links;  // both endpoints in the sub-domain

  bool contains(NodeIndex n) const;
};

// Sub-domain decomposition induced by an SDN node set. SDN nodes belong to
// every sub-domain they have a link into.
struct Partition {
  std::vector<NodeIndex> sdn_nodes;  // sorted
  std::vector<SubDomain> subdomains;
  // node -> sorted sub-domain indices (empty for an SDN node with no
  // non-SDN neighbor).
  std::vector<std::vector<int>> membership;
  // True when removing sdn_nodes does not disconnect the graph (or the SDN
  // set is empty): a single sub-domain, the optimizer degenerates to OSPF.
  bool degenerate = false;

  bool share_subdomain(NodeIndex a, NodeIndex b) const;
};

// Decompose the topology under the given SDN set. Throws DataError on an
// out-of-range node; a non-separating set yields a degenerate partition.
Partition derive_partition(const Topology& topology,
                           const std::set<NodeIndex>& sdn_nodes);

// Exhaustive placement: scores every k-subset that separates the graph by
// the number of ordered non-SDN node pairs in different components; ties
// break toward the lexicographically smallest node-name set. Throws
// InfeasibleError when no k-subset separates.
std::set<NodeIndex> place_sdn_nodes(const Topology& topology, int k);

// intra: endpoints share at least one sub-domain; inter: they share none.
std::pair<std::vector<Flow>, std::vector<Flow>> classify_flows(
    const Partition& partition, const std::vector<Flow>& flows);

// Partition file: "SDN <name>" lines, then "SUBDOMAIN <i>: <names...>".
std::string serialize_partition(const Topology& topology,
                                const Partition& partition);
// Reads the SDN set back and re-derives the partition, verifying that the
// listed sub-domains match the derivation.
Partition parse_partition(std::istream& in, const Topology& topology);

}  // namespace hybridte

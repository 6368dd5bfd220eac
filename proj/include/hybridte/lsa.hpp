#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "hybridte/ospf.hpp"
#include "hybridte/partition.hpp"

namespace hybridte {

// Assignment of every internal node of one sub-domain to the border node
// its external traffic exits through.
struct ExitMapping {
  int subdomain = -1;
  // Parallel to SubDomain::internal_nodes: exit border per internal node.
  std::vector<NodeIndex> exit_border;
};

// A realizable exit mapping together with a witness vector of advertised
// border costs that induces it with strictly unique least-cost exits.
struct LsaSet {
  int id = -1;
  ExitMapping mapping;
  // border node -> advertised external cost (integer >= 1). Empty when the
  // set was admitted without a witness (all-mappings mode only).
  std::map<NodeIndex, int> witness_costs;
};

enum class LsaMode {
  kMetricOnly,   // keep only strictly realizable mappings
  kAllMappings,  // keep every mapping (upper-bound relaxation standing in
                 // for topology-altering advertisements)
};

// Internal distances of one sub-domain: dist[s][b] from each internal node
// to each border, with SDN-sourced hops forbidden (module ospf semantics).
struct SubDomainDistances {
  const SubDomain* subdomain = nullptr;
  // indexed [internal position][border position]
  std::vector<std::vector<std::int64_t>> dist;
};

SubDomainDistances compute_subdomain_distances(const Topology& topology,
                                               const Partition& partition,
                                               const SubDomain& subdomain);

// Decides feasibility of the strict system
//   cost(m(s)) - cost(b') <= dist(s,b') - dist(s,m(s)) - 1
// over integer costs >= 1 by negative-cycle detection on the difference-
// constraint graph, and returns the canonical witness (shortest-path
// potentials shifted so the minimum cost is 1). nullopt = not realizable.
std::optional<std::map<NodeIndex, int>> check_realizable(
    const SubDomainDistances& distances,
    const std::vector<NodeIndex>& exit_border);

struct LsaCatalog {
  std::vector<LsaSet> sets;  // ids are positions
  // bel(k, alpha): set id -> owning sub-domain (== sets[k].mapping.subdomain).
  std::vector<int> subdomain_of;
  // per sub-domain: ids of its sets, in enumeration order
  std::vector<std::vector<int>> sets_of_subdomain;
  // per sub-domain: the distances used, kept for witness replay
  std::vector<SubDomainDistances> distances;
};

// Enumerate candidate exit mappings per sub-domain (|B|^|S| each, capped)
// and keep them per the mode. Throws InfeasibleError when a sub-domain
// exceeds mapping_cap.
LsaCatalog enumerate_lsa_sets(const Topology& topology,
                              const Partition& partition, LsaMode mode,
                              std::int64_t mapping_cap = 100000);

// lsa(k, p) for every set in the catalog and every path in P: paths ending
// at a border are allowed iff the mapping sends their source there; paths
// ending at an internal node (only ever used when that node is the flow
// destination) are allowed under every set of their sub-domain.
std::vector<std::vector<char>> lsa_param(const LsaCatalog& catalog,
                                         const std::vector<OspfPath>& paths);

// Witness replay: attach the witness costs as a virtual sink behind the
// borders, recompute internal shortest paths, and confirm the induced exit
// of every internal node equals the mapping, strictly and uniquely.
bool verify_witness(const SubDomainDistances& distances, const LsaSet& set);

// Catalog dump, one line per set:
//   k=<id> subdomain=<a> mapping=<s:b,...> costs=<b:c,...>
std::string serialize_catalog(const Topology& topology,
                              const LsaCatalog& catalog);

}  // namespace hybridte

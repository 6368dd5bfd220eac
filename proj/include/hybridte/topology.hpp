#pragma once

#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace hybridte {

using NodeIndex = int;
using LinkIndex = int;

// Capacity not yet assigned (the experiment harness sets capacities from
// observed loads; parsers may leave them open).
inline constexpr double kCapacityUnassigned = -1.0;

// Undirected link with an OSPF metric and a capacity in Gbit/s.
// Endpoints are normalized so a < b.
struct Link {
  NodeIndex a = -1;
  NodeIndex b = -1;
  int metric = 1;
  double capacity = kCapacityUnassigned;

  bool capacity_assigned() const { return capacity > 0.0; }
  NodeIndex other(NodeIndex n) const { return n == a ? b : a; }
};

struct AdjacentLink {
  NodeIndex neighbor;
  LinkIndex link;
};

// Immutable weighted undirected graph with node roles. Construct through
// make_topology so the invariants (unique names, connectivity, metric >= 1,
// no duplicate links) always hold.
class Topology {
 public:
  int node_count() const { return static_cast<int>(names_.size()); }
  int link_count() const { return static_cast<int>(links_.size()); }

  const std::vector<std::string>& node_names() const { return names_; }
  const std::string& name(NodeIndex n) const { return names_[n]; }
  const std::vector<Link>& links() const { return links_; }
  const Link& link(LinkIndex l) const { return links_[l]; }
  const std::set<NodeIndex>& sdn_nodes() const { return sdn_nodes_; }
  bool is_sdn(NodeIndex n) const { return sdn_nodes_.count(n) > 0; }

  const std::vector<AdjacentLink>& adjacent(NodeIndex n) const {
    return adjacency_[n];
  }

  // -1 if the name is unknown.
  NodeIndex find_node(const std::string& name) const;
  // -1 if no link joins the pair.
  LinkIndex find_link(NodeIndex a, NodeIndex b) const;

  // Rank of a node in name-sorted order; used by every lexicographic
  // tie-break so results are invariant under index relabeling.
  int name_rank(NodeIndex n) const { return name_rank_[n]; }

  bool all_capacities_assigned() const;

  // Same graph with capacities replaced (one entry per link).
  Topology with_capacities(const std::vector<double>& capacities) const;
  // Same graph with a different SDN node set.
  Topology with_sdn_nodes(const std::set<NodeIndex>& sdn) const;

 private:
  friend Topology make_topology(std::vector<std::string> names,
                                std::vector<Link> links,
                                std::set<NodeIndex> sdn_nodes,
                                bool allow_trivial);
  Topology() = default;

  std::vector<std::string> names_;
  std::vector<Link> links_;
  std::set<NodeIndex> sdn_nodes_;
  std::vector<std::vector<AdjacentLink>> adjacency_;
  std::unordered_map<std::string, NodeIndex> name_to_index_;
  std::vector<int> name_rank_;
};

// Validates and freezes a topology. Throws DataError on any invariant
// violation. allow_trivial admits a single-node, zero-link graph.
Topology make_topology(std::vector<std::string> names, std::vector<Link> links,
                       std::set<NodeIndex> sdn_nodes = {},
                       bool allow_trivial = false);

// A demand between two distinct nodes, in Gbit/s.
struct Flow {
  NodeIndex src = -1;
  NodeIndex dst = -1;
  double demand = 0.0;
};

// SNDlib native format: only the NODES ( ... ) and LINKS ( ... ) blocks are
// consumed; metrics default to 1 and capacities stay unassigned.
Topology parse_sndlib(std::istream& in, bool allow_trivial = false);

// Line-oriented internal format:
//   NODE <name> [sdn]
//   LINK <name1> <name2> <metric:int> <capacity:float|?>
// '#' starts a comment.
Topology parse_internal(std::istream& in, bool allow_trivial = false);

// Inverse of parse_internal (parse(serialize(t)) == t).
std::string serialize_internal(const Topology& topology);

// Demands CSV: lines "src,dst,demand_gbps"; an optional header line and
// '#' comments are skipped.
std::vector<Flow> parse_demands(std::istream& in, const Topology& topology);
std::string serialize_demands(const Topology& topology,
                              const std::vector<Flow>& flows);

// One flow per ordered node pair (s, d), s != d, with demand drawn
// uniformly from (low, high). Pairs are visited in lexicographic order of
// (source name, destination name) so the draw sequence is well-defined.
std::vector<Flow> full_mesh_flows(const Topology& topology,
                                  std::uint64_t seed, double low, double high);

}  // namespace hybridte

#include "hybridte/lsa.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "hybridte/errors.hpp"

namespace hybridte {

SubDomainDistances compute_subdomain_distances(const Topology& topology,
                                               const Partition& partition,
                                               const SubDomain& subdomain) {
  SubDomainDistances out;
  out.subdomain = &subdomain;
  std::vector<NodeIndex> members = subdomain.internal_nodes;
  members.insert(members.end(), subdomain.border_nodes.begin(),
                 subdomain.border_nodes.end());
  std::set<NodeIndex> absorbing(partition.sdn_nodes.begin(),
                                partition.sdn_nodes.end());
  out.dist.resize(subdomain.internal_nodes.size());
  for (size_t si = 0; si < subdomain.internal_nodes.size(); ++si) {
    ShortestPathTree tree = shortest_paths(
        topology, subdomain.internal_nodes[si], &members, &absorbing);
    out.dist[si].resize(subdomain.border_nodes.size());
    for (size_t bi = 0; bi < subdomain.border_nodes.size(); ++bi) {
      NodeIndex b = subdomain.border_nodes[bi];
      if (!tree.reachable(b))
        throw DataError("border unreachable inside sub-domain");
      out.dist[si][bi] = tree.cost[b];
    }
  }
  return out;
}

std::optional<std::map<NodeIndex, int>> check_realizable(
    const SubDomainDistances& distances,
    const std::vector<NodeIndex>& exit_border) {
  const SubDomain& sd = *distances.subdomain;
  const int nb = static_cast<int>(sd.border_nodes.size());
  const int ns = static_cast<int>(sd.internal_nodes.size());

  std::vector<int> border_pos(nb);
  auto pos_of = [&](NodeIndex b) {
    auto it = std::lower_bound(sd.border_nodes.begin(), sd.border_nodes.end(), b);
    return static_cast<int>(it - sd.border_nodes.begin());
  };

  // Difference constraints cost(m) - cost(b') <= w become edges b' -> m of
  // weight w; tightest edge per pair suffices.
  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
  std::vector<std::vector<std::int64_t>> w(nb,
                                           std::vector<std::int64_t>(nb, kInf));
  for (int si = 0; si < ns; ++si) {
    int m = pos_of(exit_border[si]);
    for (int bp = 0; bp < nb; ++bp) {
      if (bp == m) continue;
      std::int64_t bound = distances.dist[si][bp] - distances.dist[si][m] - 1;
      w[bp][m] = std::min(w[bp][m], bound);
    }
  }

  // Bellman-Ford from an implicit source connected to every border with
  // weight 0; |V| = nb + 1 so nb rounds after initialization suffice.
  std::vector<std::int64_t> pot(nb, 0);
  for (int round = 0; round < nb; ++round) {
    bool changed = false;
    for (int u = 0; u < nb; ++u)
      for (int v = 0; v < nb; ++v) {
        if (w[u][v] == kInf) continue;
        if (pot[u] + w[u][v] < pot[v]) {
          pot[v] = pot[u] + w[u][v];
          changed = true;
        }
      }
    if (!changed) break;
    if (round == nb - 1) return std::nullopt;  // still relaxing: negative cycle
  }

  std::int64_t lo = *std::min_element(pot.begin(), pot.end());
  std::map<NodeIndex, int> witness;
  for (int bp = 0; bp < nb; ++bp)
    witness[sd.border_nodes[bp]] = static_cast<int>(pot[bp] - lo + 1);
  return witness;
}

LsaCatalog enumerate_lsa_sets(const Topology& topology,
                              const Partition& partition, LsaMode mode,
                              std::int64_t mapping_cap) {
  LsaCatalog catalog;
  catalog.sets_of_subdomain.resize(partition.subdomains.size());
  catalog.distances.reserve(partition.subdomains.size());
  for (const SubDomain& sd : partition.subdomains)
    catalog.distances.push_back(
        compute_subdomain_distances(topology, partition, sd));

  for (const SubDomain& sd : partition.subdomains) {
    const int ns = static_cast<int>(sd.internal_nodes.size());
    const int nb = static_cast<int>(sd.border_nodes.size());
    if (nb == 0) continue;  // degenerate partition: nothing to advertise

    std::int64_t total = 1;
    for (int i = 0; i < ns; ++i) {
      total *= nb;
      if (total > mapping_cap)
        throw InfeasibleError(
            "lsa mapping count exceeds cap in sub-domain " +
            std::to_string(sd.index) + ": " + std::to_string(nb) + "^" +
            std::to_string(ns) + " > " + std::to_string(mapping_cap));
    }

    const SubDomainDistances& dists = catalog.distances[sd.index];
    // Mixed-radix counter over border choices, least-significant digit =
    // first internal node; enumeration order is therefore deterministic.
    std::vector<int> digits(ns, 0);
    for (std::int64_t iter = 0; iter < total; ++iter) {
      std::vector<NodeIndex> exits(ns);
      for (int i = 0; i < ns; ++i) exits[i] = sd.border_nodes[digits[i]];

      std::optional<std::map<NodeIndex, int>> witness =
          check_realizable(dists, exits);
      if (mode == LsaMode::kAllMappings || witness.has_value()) {
        LsaSet set;
        set.id = static_cast<int>(catalog.sets.size());
        set.mapping.subdomain = sd.index;
        set.mapping.exit_border = std::move(exits);
        if (witness.has_value()) set.witness_costs = std::move(*witness);
        catalog.subdomain_of.push_back(sd.index);
        catalog.sets_of_subdomain[sd.index].push_back(set.id);
        catalog.sets.push_back(std::move(set));
      }

      for (int i = 0; i < ns; ++i) {
        if (++digits[i] < nb) break;
        digits[i] = 0;
      }
    }
  }
  return catalog;
}

std::vector<std::vector<char>> lsa_param(const LsaCatalog& catalog,
                                         const std::vector<OspfPath>& paths) {
  std::vector<std::vector<char>> table(
      catalog.sets.size(), std::vector<char>(paths.size(), 0));
  for (const LsaSet& set : catalog.sets) {
    const SubDomain& sd = *catalog.distances[set.mapping.subdomain].subdomain;
    for (const OspfPath& p : paths) {
      if (p.subdomain != set.mapping.subdomain) continue;
      bool border_terminal =
          std::binary_search(sd.border_nodes.begin(), sd.border_nodes.end(),
                             p.target);
      if (!border_terminal) {
        table[set.id][p.id] = 1;  // destination-terminal use, any set
        continue;
      }
      auto it = std::lower_bound(sd.internal_nodes.begin(),
                                 sd.internal_nodes.end(), p.source);
      int spos = static_cast<int>(it - sd.internal_nodes.begin());
      table[set.id][p.id] = set.mapping.exit_border[spos] == p.target ? 1 : 0;
    }
  }
  return table;
}

bool verify_witness(const SubDomainDistances& distances, const LsaSet& set) {
  if (set.witness_costs.empty()) return false;
  const SubDomain& sd = *distances.subdomain;
  const int ns = static_cast<int>(sd.internal_nodes.size());
  const int nb = static_cast<int>(sd.border_nodes.size());
  for (int si = 0; si < ns; ++si) {
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    NodeIndex best_border = -1;
    bool unique = false;
    for (int bp = 0; bp < nb; ++bp) {
      NodeIndex b = sd.border_nodes[bp];
      std::int64_t through = distances.dist[si][bp] + set.witness_costs.at(b);
      if (through < best) {
        best = through;
        best_border = b;
        unique = true;
      } else if (through == best) {
        unique = false;
      }
    }
    if (!unique || best_border != set.mapping.exit_border[si]) return false;
  }
  return true;
}

std::string serialize_catalog(const Topology& topology,
                              const LsaCatalog& catalog) {
  std::ostringstream out;
  for (const LsaSet& set : catalog.sets) {
    const SubDomain& sd = *catalog.distances[set.mapping.subdomain].subdomain;
    out << "k=" << set.id << " subdomain=" << set.mapping.subdomain
        << " mapping=";
    for (size_t i = 0; i < sd.internal_nodes.size(); ++i) {
      if (i) out << ",";
      out << topology.name(sd.internal_nodes[i]) << ":"
          << topology.name(set.mapping.exit_border[i]);
    }
    out << " costs=";
    bool first = true;
    for (const auto& [b, c] : set.witness_costs) {
      if (!first) out << ",";
      first = false;
      out << topology.name(b) << ":" << c;
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace hybridte

#include "hybridte/partition.hpp"

#include <algorithm>
#include <istream>
#include <sstream>

#include "hybridte/errors.hpp"

namespace hybridte {

namespace {

// Connected components of the non-SDN subgraph; returns component id per
// node, -1 for SDN nodes. Component ids are ordered by the smallest
// name-rank of their members so the numbering is relabeling-invariant.
std::vector<int> non_sdn_components(const Topology& topology,
                                    const std::set<NodeIndex>& sdn,
                                    int* count_out) {
  const int n = topology.node_count();
  std::vector<int> comp(n, -1);
  int count = 0;
  // Visit roots in name order.
  std::vector<NodeIndex> roots(n);
  for (int i = 0; i < n; ++i) roots[i] = i;
  std::sort(roots.begin(), roots.end(), [&](NodeIndex x, NodeIndex y) {
    return topology.name_rank(x) < topology.name_rank(y);
  });
  for (NodeIndex root : roots) {
    if (sdn.count(root) || comp[root] >= 0) continue;
    std::vector<NodeIndex> stack{root};
    comp[root] = count;
    while (!stack.empty()) {
      NodeIndex u = stack.back();
      stack.pop_back();
      for (const AdjacentLink& al : topology.adjacent(u)) {
        if (sdn.count(al.neighbor) || comp[al.neighbor] >= 0) continue;
        comp[al.neighbor] = count;
        stack.push_back(al.neighbor);
      }
    }
    ++count;
  }
  *count_out = count;
  return comp;
}

}  // namespace

bool SubDomain::contains(NodeIndex n) const {
  return std::binary_search(internal_nodes.begin(), internal_nodes.end(), n) ||
         std::binary_search(border_nodes.begin(), border_nodes.end(), n);
}

bool Partition::share_subdomain(NodeIndex a, NodeIndex b) const {
  const auto& ma = membership[a];
  const auto& mb = membership[b];
  size_t i = 0, j = 0;
  while (i < ma.size() && j < mb.size()) {
    if (ma[i] == mb[j]) return true;
    (ma[i] < mb[j] ? i : j)++;
  }
  return false;
}

Partition derive_partition(const Topology& topology,
                           const std::set<NodeIndex>& sdn_nodes) {
  const int n = topology.node_count();
  for (NodeIndex s : sdn_nodes)
    if (s < 0 || s >= n) throw DataError("sdn node index out of range");

  int comp_count = 0;
  std::vector<int> comp = non_sdn_components(topology, sdn_nodes, &comp_count);

  Partition p;
  p.sdn_nodes.assign(sdn_nodes.begin(), sdn_nodes.end());
  p.degenerate = comp_count <= 1;
  p.membership.assign(n, {});
  p.subdomains.resize(std::max(comp_count, comp_count == 0 ? 1 : comp_count));
  if (comp_count == 0) {
    // All nodes SDN: one empty degenerate sub-domain keeps callers simple.
    p.subdomains.clear();
    p.degenerate = true;
  }
  for (int c = 0; c < comp_count; ++c) p.subdomains[c].index = c;

  for (NodeIndex u = 0; u < n; ++u) {
    if (comp[u] >= 0) {
      p.subdomains[comp[u]].internal_nodes.push_back(u);
      p.membership[u] = {comp[u]};
    }
  }
  // Borders: an SDN node joins every sub-domain holding one of its non-SDN
  // neighbors.
  for (NodeIndex s : sdn_nodes) {
    std::set<int> joined;
    for (const AdjacentLink& al : topology.adjacent(s))
      if (comp[al.neighbor] >= 0) joined.insert(comp[al.neighbor]);
    for (int c : joined) {
      p.subdomains[c].border_nodes.push_back(s);
      p.membership[s].push_back(c);
    }
  }
  for (SubDomain& sd : p.subdomains) {
    std::sort(sd.internal_nodes.begin(), sd.internal_nodes.end());
    std::sort(sd.border_nodes.begin(), sd.border_nodes.end());
  }
  for (LinkIndex li = 0; li < topology.link_count(); ++li) {
    const Link& l = topology.link(li);
    for (SubDomain& sd : p.subdomains)
      if (sd.contains(l.a) && sd.contains(l.b))
        sd.internal_links.push_back(li);
  }
  return p;
}

std::set<NodeIndex> place_sdn_nodes(const Topology& topology, int k) {
  const int n = topology.node_count();
  if (k < 1 || k >= n)
    throw UsageError("sdn count must satisfy 1 <= k < node count");

  std::vector<NodeIndex> by_name(n);
  for (int i = 0; i < n; ++i) by_name[i] = i;
  std::sort(by_name.begin(), by_name.end(), [&](NodeIndex x, NodeIndex y) {
    return topology.name_rank(x) < topology.name_rank(y);
  });

  long long best_score = -1;
  std::vector<NodeIndex> best;  // in name order

  std::vector<int> pick(k);
  // Enumerate k-subsets of by_name in lexicographic name order; the first
  // subset reaching a score is therefore the tie-break winner.
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    std::set<NodeIndex> candidate;
    for (int i : idx) candidate.insert(by_name[i]);

    int comp_count = 0;
    std::vector<int> comp = non_sdn_components(topology, candidate, &comp_count);
    if (comp_count >= 2) {
      std::vector<long long> sizes(comp_count, 0);
      long long total = 0;
      for (int c : comp)
        if (c >= 0) {
          ++sizes[c];
          ++total;
        }
      long long score = total * total;
      for (long long s : sizes) score -= s * s;
      if (score > best_score) {
        best_score = score;
        best.assign(candidate.begin(), candidate.end());
      }
    }

    // next combination
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  if (best_score < 0)
    throw InfeasibleError("no separator of size " + std::to_string(k));
  return std::set<NodeIndex>(best.begin(), best.end());
}

std::pair<std::vector<Flow>, std::vector<Flow>> classify_flows(
    const Partition& partition, const std::vector<Flow>& flows) {
  std::vector<Flow> intra, inter;
  for (const Flow& f : flows)
    (partition.share_subdomain(f.src, f.dst) ? intra : inter).push_back(f);
  return {std::move(intra), std::move(inter)};
}

std::string serialize_partition(const Topology& topology,
                                const Partition& partition) {
  std::ostringstream out;
  for (NodeIndex s : partition.sdn_nodes)
    out << "SDN " << topology.name(s) << "\n";
  for (const SubDomain& sd : partition.subdomains) {
    out << "SUBDOMAIN " << sd.index << ":";
    std::vector<NodeIndex> members = sd.internal_nodes;
    members.insert(members.end(), sd.border_nodes.begin(),
                   sd.border_nodes.end());
    std::sort(members.begin(), members.end(), [&](NodeIndex x, NodeIndex y) {
      return topology.name_rank(x) < topology.name_rank(y);
    });
    for (NodeIndex m : members) out << " " << topology.name(m);
    out << "\n";
  }
  return out.str();
}

Partition parse_partition(std::istream& in, const Topology& topology) {
  std::set<NodeIndex> sdn;
  std::vector<std::vector<std::string>> listed;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream iss(line);
    std::string head;
    if (!(iss >> head)) continue;
    if (head == "SDN") {
      std::string name;
      if (!(iss >> name))
        throw DataError("malformed SDN line " + std::to_string(lineno));
      NodeIndex idx = topology.find_node(name);
      if (idx < 0) throw DataError("unknown SDN node: " + name);
      sdn.insert(idx);
    } else if (head == "SUBDOMAIN") {
      std::string rest, tok;
      std::getline(iss, rest);
      auto colon = rest.find(':');
      if (colon == std::string::npos)
        throw DataError("malformed SUBDOMAIN line " + std::to_string(lineno));
      std::istringstream names(rest.substr(colon + 1));
      std::vector<std::string> members;
      while (names >> tok) members.push_back(tok);
      listed.push_back(std::move(members));
    } else {
      throw DataError("unknown partition directive: " + head);
    }
  }
  Partition p = derive_partition(topology, sdn);
  if (!listed.empty()) {
    if (listed.size() != p.subdomains.size())
      throw DataError("partition file sub-domain count mismatch");
    for (size_t i = 0; i < listed.size(); ++i) {
      std::set<std::string> got;
      for (NodeIndex m : p.subdomains[i].internal_nodes)
        got.insert(topology.name(m));
      for (NodeIndex m : p.subdomains[i].border_nodes)
        got.insert(topology.name(m));
      std::set<std::string> want(listed[i].begin(), listed[i].end());
      if (got != want)
        throw DataError("partition file sub-domain " + std::to_string(i) +
                        " does not match derivation");
    }
  }
  return p;
}

}  // namespace hybridte

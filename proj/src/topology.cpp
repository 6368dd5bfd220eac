#include "hybridte/topology.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <sstream>

#include "hybridte/errors.hpp"
#include "hybridte/rng.hpp"

namespace hybridte {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream iss(line);
  std::vector<std::string> out;
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

std::string strip_comment(const std::string& line) {
  auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

bool connected(int n, const std::vector<Link>& links) {
  if (n == 0) return false;
  std::vector<std::vector<int>> adj(n);
  for (const Link& l : links) {
    adj[l.a].push_back(l.b);
    adj[l.b].push_back(l.a);
  }
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 0;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    ++count;
    for (int v : adj[u])
      if (!seen[v]) {
        seen[v] = 1;
        stack.push_back(v);
      }
  }
  return count == n;
}

}  // namespace

NodeIndex Topology::find_node(const std::string& name) const {
  auto it = name_to_index_.find(name);
  return it == name_to_index_.end() ? -1 : it->second;
}

LinkIndex Topology::find_link(NodeIndex a, NodeIndex b) const {
  for (const AdjacentLink& al : adjacency_[a])
    if (al.neighbor == b) return al.link;
  return -1;
}

bool Topology::all_capacities_assigned() const {
  return std::all_of(links_.begin(), links_.end(),
                     [](const Link& l) { return l.capacity_assigned(); });
}

Topology Topology::with_capacities(const std::vector<double>& capacities) const {
  if (capacities.size() != links_.size())
    throw DataError("capacity vector size does not match link count");
  std::vector<Link> links = links_;
  for (size_t i = 0; i < links.size(); ++i) links[i].capacity = capacities[i];
  return make_topology(names_, std::move(links), sdn_nodes_, node_count() == 1);
}

Topology Topology::with_sdn_nodes(const std::set<NodeIndex>& sdn) const {
  return make_topology(names_, links_, sdn, node_count() == 1);
}

Topology make_topology(std::vector<std::string> names, std::vector<Link> links,
                       std::set<NodeIndex> sdn_nodes, bool allow_trivial) {
  const int n = static_cast<int>(names.size());
  if (n == 0) throw DataError("topology has zero nodes");
  if (n == 1 && !allow_trivial)
    throw DataError("disconnected/degenerate topology: single node");

  Topology t;
  t.names_ = std::move(names);
  for (int i = 0; i < n; ++i) {
    if (t.names_[i].empty()) throw DataError("empty node name");
    if (!t.name_to_index_.emplace(t.names_[i], i).second)
      throw DataError("duplicate node name: " + t.names_[i]);
  }

  for (Link& l : links) {
    if (l.a < 0 || l.a >= n || l.b < 0 || l.b >= n)
      throw DataError("link endpoint out of range");
    if (l.a == l.b) throw DataError("self-loop at node " + t.names_[l.a]);
    if (l.a > l.b) std::swap(l.a, l.b);
    if (l.metric < 1)
      throw DataError("non-positive metric on link " + t.names_[l.a] + "-" +
                      t.names_[l.b]);
    if (l.capacity != kCapacityUnassigned && l.capacity <= 0.0)
      throw DataError("non-positive capacity on link " + t.names_[l.a] + "-" +
                      t.names_[l.b]);
  }
  std::sort(links.begin(), links.end(), [](const Link& x, const Link& y) {
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  for (size_t i = 1; i < links.size(); ++i)
    if (links[i].a == links[i - 1].a && links[i].b == links[i - 1].b)
      throw DataError("duplicate link " + t.names_[links[i].a] + "-" +
                      t.names_[links[i].b]);
  if (!connected(n, links))
    throw DataError("disconnected/degenerate topology");

  for (NodeIndex s : sdn_nodes)
    if (s < 0 || s >= n) throw DataError("sdn node index out of range");

  t.links_ = std::move(links);
  t.sdn_nodes_ = std::move(sdn_nodes);
  t.adjacency_.assign(n, {});
  for (LinkIndex li = 0; li < static_cast<int>(t.links_.size()); ++li) {
    const Link& l = t.links_[li];
    t.adjacency_[l.a].push_back({l.b, li});
    t.adjacency_[l.b].push_back({l.a, li});
  }
  for (auto& adj : t.adjacency_)
    std::sort(adj.begin(), adj.end(),
              [](const AdjacentLink& x, const AdjacentLink& y) {
                return x.neighbor < y.neighbor;
              });

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return t.names_[x] < t.names_[y]; });
  t.name_rank_.assign(n, 0);
  for (int r = 0; r < n; ++r) t.name_rank_[order[r]] = r;
  return t;
}

namespace {

struct ParsedGraph {
  std::vector<std::string> names;
  std::vector<Link> links;
  std::set<NodeIndex> sdn;
  std::unordered_map<std::string, NodeIndex> index;

  NodeIndex add_node(const std::string& name) {
    auto [it, inserted] =
        index.emplace(name, static_cast<NodeIndex>(names.size()));
    if (!inserted) throw DataError("duplicate node name: " + name);
    names.push_back(name);
    return it->second;
  }

  NodeIndex require_node(const std::string& name) const {
    auto it = index.find(name);
    if (it == index.end())
      throw DataError("link references unknown node: " + name);
    return it->second;
  }
};

}  // namespace

Topology parse_sndlib(std::istream& in, bool allow_trivial) {
  ParsedGraph g;
  enum class Section { kNone, kNodes, kLinks, kIgnored };
  Section section = Section::kNone;
  bool saw_nodes = false, saw_links = false;
  std::string line;
  while (std::getline(in, line)) {
    line = strip_comment(line);
    if (!line.empty() && line[0] == '?') continue;  // format banner
    auto toks = split_ws(line);
    if (toks.empty()) continue;

    if (section == Section::kNone) {
      if (toks[0] == "NODES" || toks[0] == "LINKS") {
        if (toks.size() != 2 || toks[1] != "(")
          throw DataError("malformed section header: " + line);
        section = toks[0] == "NODES" ? Section::kNodes : Section::kLinks;
        (section == Section::kNodes ? saw_nodes : saw_links) = true;
      } else if (toks.size() >= 2 && toks[1] == "(") {
        section = Section::kIgnored;  // DEMANDS etc.
      }
      continue;
    }
    if (toks[0] == ")") {
      section = Section::kNone;
      continue;
    }
    if (section == Section::kNodes) {
      g.add_node(toks[0]);
    } else if (section == Section::kLinks) {
      // <id> ( <source> <target> ) ...module data ignored
      if (toks.size() < 5 || toks[1] != "(" || toks[4] != ")")
        throw DataError("malformed link line: " + line);
      Link l;
      l.a = g.require_node(toks[2]);
      l.b = g.require_node(toks[3]);
      g.links.push_back(l);
    }
  }
  if (!saw_nodes) throw DataError("missing NODES section");
  if (!saw_links) throw DataError("missing LINKS section");
  if (g.names.empty()) throw DataError("topology has zero nodes");
  return make_topology(std::move(g.names), std::move(g.links), {},
                       allow_trivial);
}

Topology parse_internal(std::istream& in, bool allow_trivial) {
  ParsedGraph g;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = split_ws(strip_comment(line));
    if (toks.empty()) continue;
    const std::string where = " (line " + std::to_string(lineno) + ")";
    if (toks[0] == "NODE") {
      if (toks.size() < 2 || toks.size() > 3 ||
          (toks.size() == 3 && toks[2] != "sdn"))
        throw DataError("malformed NODE line" + where);
      NodeIndex n = g.add_node(toks[1]);
      if (toks.size() == 3) g.sdn.insert(n);
    } else if (toks[0] == "LINK") {
      if (toks.size() != 5) throw DataError("malformed LINK line" + where);
      Link l;
      l.a = g.require_node(toks[1]);
      l.b = g.require_node(toks[2]);
      try {
        size_t used = 0;
        l.metric = std::stoi(toks[3], &used);
        if (used != toks[3].size()) throw std::invalid_argument("");
        if (toks[4] != "?") {
          l.capacity = std::stod(toks[4], &used);
          if (used != toks[4].size()) throw std::invalid_argument("");
        }
      } catch (const std::logic_error&) {
        throw DataError("bad metric/capacity" + where);
      }
      g.links.push_back(l);
    } else {
      throw DataError("unknown directive '" + toks[0] + "'" + where);
    }
  }
  if (g.names.empty()) throw DataError("topology has zero nodes");
  return make_topology(std::move(g.names), std::move(g.links),
                       std::move(g.sdn), allow_trivial);
}

std::string serialize_internal(const Topology& topology) {
  std::ostringstream out;
  for (NodeIndex n = 0; n < topology.node_count(); ++n) {
    out << "NODE " << topology.name(n);
    if (topology.is_sdn(n)) out << " sdn";
    out << "\n";
  }
  for (const Link& l : topology.links()) {
    out << "LINK " << topology.name(l.a) << " " << topology.name(l.b) << " "
        << l.metric << " ";
    if (l.capacity_assigned()) {
      std::ostringstream cap;
      cap.precision(17);
      cap << l.capacity;
      out << cap.str();
    } else {
      out << "?";
    }
    out << "\n";
  }
  return out.str();
}

std::vector<Flow> parse_demands(std::istream& in, const Topology& topology) {
  std::vector<Flow> flows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_comment(line);
    if (split_ws(line).empty()) continue;
    if (lineno == 1 && line.find("demand") != std::string::npos) continue;
    std::istringstream iss(line);
    std::string src, dst, dem;
    if (!std::getline(iss, src, ',') || !std::getline(iss, dst, ',') ||
        !std::getline(iss, dem))
      throw DataError("malformed demand line " + std::to_string(lineno));
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    Flow f;
    f.src = topology.find_node(trim(src));
    f.dst = topology.find_node(trim(dst));
    if (f.src < 0 || f.dst < 0)
      throw DataError("demand references unknown node (line " +
                      std::to_string(lineno) + ")");
    if (f.src == f.dst)
      throw DataError("demand with identical endpoints (line " +
                      std::to_string(lineno) + ")");
    try {
      f.demand = std::stod(trim(dem));
    } catch (const std::logic_error&) {
      throw DataError("bad demand value (line " + std::to_string(lineno) + ")");
    }
    if (f.demand <= 0.0)
      throw DataError("non-positive demand (line " + std::to_string(lineno) +
                      ")");
    flows.push_back(f);
  }
  return flows;
}

std::string serialize_demands(const Topology& topology,
                              const std::vector<Flow>& flows) {
  std::ostringstream out;
  out << "src,dst,demand_gbps\n";
  out.precision(17);
  for (const Flow& f : flows)
    out << topology.name(f.src) << "," << topology.name(f.dst) << ","
        << f.demand << "\n";
  return out.str();
}

std::vector<Flow> full_mesh_flows(const Topology& topology, std::uint64_t seed,
                                  double low, double high) {
  if (!(low < high)) throw DataError("demand range requires low < high");
  const int n = topology.node_count();
  std::vector<NodeIndex> by_name(n);
  std::iota(by_name.begin(), by_name.end(), 0);
  std::sort(by_name.begin(), by_name.end(), [&](NodeIndex x, NodeIndex y) {
    return topology.name(x) < topology.name(y);
  });
  SplitMix64 rng(seed);
  std::vector<Flow> flows;
  flows.reserve(static_cast<size_t>(n) * (n - 1));
  for (NodeIndex s : by_name)
    for (NodeIndex d : by_name) {
      if (s == d) continue;
      flows.push_back({s, d, rng.next_uniform(low, high)});
    }
  return flows;
}

}  // namespace hybridte

#pragma once

#include <cstdint>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "hybridte/partition.hpp"
#include "hybridte/rng.hpp"
#include "hybridte/topology.hpp"

namespace testutil {

inline std::filesystem::path source_dir() {
  return std::filesystem::path(HYBRIDTE_SOURCE_DIR);
}

inline std::filesystem::path data_file(const std::string& name) {
  return source_dir() / "data" / name;
}

inline std::string solver_command() {
  return "python3 \"" + (source_dir() / "tools" / "lp_solve.py").string() +
         "\"";
}

// The two-sub-domain example instance: metrics chosen so the four plain
// routes are a-x-c, a-b-y-d, b-a-x-c, b-y-d, strictly unique.
inline hybridte::Topology fig3() {
  std::istringstream in(
      "NODE a\nNODE b\nNODE c\nNODE d\nNODE x sdn\nNODE y sdn\n"
      "LINK a b 1 10\nLINK a x 1 10\nLINK b y 1 10\n"
      "LINK x c 1 10\nLINK y d 1 10\nLINK c d 2 10\n");
  return hybridte::parse_internal(in);
}

inline hybridte::NodeIndex node(const hybridte::Topology& t,
                                const std::string& name) {
  return t.find_node(name);
}

// Small random connected topology for property tests: n nodes, extra
// random edges, metrics 1..10, capacities 10..40.
inline hybridte::Topology random_topology(std::uint64_t seed, int n,
                                          int extra_links) {
  hybridte::SplitMix64 rng(seed);
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back(std::string(1, 'a' + i));
  std::vector<hybridte::Link> links;
  auto has = [&](int a, int b) {
    for (const auto& l : links)
      if ((l.a == std::min(a, b)) && (l.b == std::max(a, b))) return true;
    return false;
  };
  for (int i = 1; i < n; ++i) {
    int j = static_cast<int>(rng.next_u64() % i);
    hybridte::Link l;
    l.a = j;
    l.b = i;
    l.metric = 1 + static_cast<int>(rng.next_u64() % 10);
    l.capacity = 10.0 + 10.0 * static_cast<double>(rng.next_u64() % 4);
    links.push_back(l);
  }
  for (int e = 0; e < extra_links; ++e) {
    int a = static_cast<int>(rng.next_u64() % n);
    int b = static_cast<int>(rng.next_u64() % n);
    if (a == b || has(a, b)) continue;
    hybridte::Link l;
    l.a = std::min(a, b);
    l.b = std::max(a, b);
    l.metric = 1 + static_cast<int>(rng.next_u64() % 10);
    l.capacity = 10.0 + 10.0 * static_cast<double>(rng.next_u64() % 4);
    links.push_back(l);
  }
  return hybridte::make_topology(names, links);
}

// Random SDN set that actually separates the graph, or empty if none of the
// sampled candidates do.
inline std::set<hybridte::NodeIndex> random_separator(
    const hybridte::Topology& topology, std::uint64_t seed, int k) {
  hybridte::SplitMix64 rng(seed);
  for (int attempt = 0; attempt < 200; ++attempt) {
    std::set<hybridte::NodeIndex> sdn;
    while (static_cast<int>(sdn.size()) < k)
      sdn.insert(static_cast<int>(rng.next_u64() % topology.node_count()));
    hybridte::Partition p = hybridte::derive_partition(topology, sdn);
    if (!p.degenerate) return sdn;
  }
  return {};
}

}  // namespace testutil

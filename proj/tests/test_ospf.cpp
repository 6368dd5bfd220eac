#include "hybridte/ospf.hpp"

#include <algorithm>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "hybridte/errors.hpp"

using namespace hybridte;

namespace {

// Independent all-pairs oracle for path costs.
std::vector<std::vector<std::int64_t>> floyd_warshall(const Topology& t) {
  const int n = t.node_count();
  const std::int64_t inf = std::numeric_limits<std::int64_t>::max() / 4;
  std::vector<std::vector<std::int64_t>> d(n, std::vector<std::int64_t>(n, inf));
  for (int i = 0; i < n; ++i) d[i][i] = 0;
  for (const Link& l : t.links()) {
    d[l.a][l.b] = std::min<std::int64_t>(d[l.a][l.b], l.metric);
    d[l.b][l.a] = d[l.a][l.b];
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

std::vector<std::string> path_names(const Topology& t,
                                    const std::vector<NodeIndex>& nodes) {
  std::vector<std::string> out;
  for (NodeIndex n : nodes) out.push_back(t.name(n));
  return out;
}

}  // namespace

TEST_CASE("shortest_paths matches Floyd-Warshall on random graphs") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Topology t = testutil::random_topology(seed, 6 + seed % 5, 6);
    auto oracle = floyd_warshall(t);
    for (NodeIndex s = 0; s < t.node_count(); ++s) {
      ShortestPathTree tree = shortest_paths(t, s);
      for (NodeIndex v = 0; v < t.node_count(); ++v) {
        REQUIRE(tree.reachable(v));
        CHECK(tree.cost[v] == oracle[s][v]);
        // path cost re-derivation
        std::int64_t acc = 0;
        for (size_t i = 0; i + 1 < tree.path[v].size(); ++i)
          acc += t.link(t.find_link(tree.path[v][i], tree.path[v][i + 1]))
                     .metric;
        CHECK(acc == tree.cost[v]);
      }
    }
  }
}

TEST_CASE("shortest_paths on the example instance") {
  Topology t = testutil::fig3();
  NodeIndex a = testutil::node(t, "a");
  ShortestPathTree tree = shortest_paths(t, a);

  CHECK(tree.cost[a] == 0);
  CHECK(tree.path[a] == std::vector<NodeIndex>{a});

  NodeIndex d = testutil::node(t, "d");
  CHECK(tree.cost[d] == 3);
  CHECK(path_names(t, tree.path[d]) ==
        std::vector<std::string>{"a", "b", "y", "d"});

  // All four plain routes of the reference table.
  auto route = [&](const std::string& s, const std::string& v) {
    return path_names(t,
                      shortest_paths(t, testutil::node(t, s))
                          .path[testutil::node(t, v)]);
  };
  CHECK(route("a", "c") == std::vector<std::string>{"a", "x", "c"});
  CHECK(route("a", "d") == std::vector<std::string>{"a", "b", "y", "d"});
  CHECK(route("b", "c") == std::vector<std::string>{"b", "a", "x", "c"});
  CHECK(route("b", "d") == std::vector<std::string>{"b", "y", "d"});
}

TEST_CASE("shortest_paths tie-break picks the lexicographic path") {
  // Two equal-cost two-hop routes m->a->z and m->b->z: the a-route wins.
  std::istringstream in(
      "NODE m\nNODE a\nNODE b\nNODE z\n"
      "LINK m a 1 ?\nLINK m b 1 ?\nLINK a z 1 ?\nLINK b z 1 ?\n");
  Topology t = parse_internal(in);
  ShortestPathTree tree = shortest_paths(t, testutil::node(t, "m"));
  CHECK(path_names(t, tree.path[testutil::node(t, "z")]) ==
        std::vector<std::string>{"m", "a", "z"});

  // A strictly cheaper direct link always beats the detour.
  std::istringstream tri(
      "NODE p\nNODE q\nNODE r\nLINK p q 1 ?\nLINK q r 1 ?\nLINK p r 1 ?\n");
  Topology triangle = parse_internal(tri);
  ShortestPathTree tp = shortest_paths(triangle, testutil::node(triangle, "p"));
  CHECK(path_names(triangle, tp.path[testutil::node(triangle, "r")]) ==
        std::vector<std::string>{"p", "r"});
}

TEST_CASE("build_entities on the example instance") {
  Topology t = testutil::fig3();
  Partition p =
      derive_partition(t, {testutil::node(t, "x"), testutil::node(t, "y")});
  RoutingEntities ents = build_entities(t, p);

  // L^sdn: one directed link per SDN adjacency; no x-y link exists.
  REQUIRE(ents.sdn_links.size() == 4);
  std::set<std::pair<std::string, std::string>> sdn;
  for (const SdnLink& l : ents.sdn_links)
    sdn.insert({t.name(l.source), t.name(l.target)});
  CHECK(sdn == std::set<std::pair<std::string, std::string>>{
                   {"x", "a"}, {"x", "c"}, {"y", "b"}, {"y", "d"}});

  // P: two internal sources per sub-domain, three same-sub-domain targets.
  CHECK(ents.paths.size() == 12);
  auto find_path = [&](const std::string& s, const std::string& v) {
    for (const OspfPath& path : ents.paths)
      if (t.name(path.source) == s && t.name(path.target) == v) return &path;
    return static_cast<const OspfPath*>(nullptr);
  };
  const OspfPath* ax = find_path("a", "x");
  REQUIRE(ax != nullptr);
  CHECK(ax->cost == 1);
  CHECK(path_names(t, ax->nodes) == std::vector<std::string>{"a", "x"});
  const OspfPath* bx = find_path("b", "x");
  REQUIRE(bx != nullptr);
  CHECK(bx->cost == 2);
  CHECK(path_names(t, bx->nodes) == std::vector<std::string>{"b", "a", "x"});

  for (const OspfPath& path : ents.paths) {
    CHECK_FALSE(t.is_sdn(path.source));
    // no hop leaves an SDN node
    for (size_t i = 0; i + 1 < path.nodes.size(); ++i)
      CHECK_FALSE(t.is_sdn(path.nodes[i]));
    // simple
    std::set<NodeIndex> uniq(path.nodes.begin(), path.nodes.end());
    CHECK(uniq.size() == path.nodes.size());
    // stays in one sub-domain
    for (NodeIndex n : path.nodes)
      CHECK(p.subdomains[path.subdomain].contains(n));
  }

  // Exactly one path per (internal source, border) pair.
  for (const SubDomain& sd : p.subdomains)
    for (NodeIndex s : sd.internal_nodes)
      for (NodeIndex b : sd.border_nodes) {
        int count = 0;
        for (const OspfPath& path : ents.paths)
          if (path.source == s && path.target == b) ++count;
        CHECK(count == 1);
      }
}

TEST_CASE("ospf_route_all loads and determinism") {
  Topology t = testutil::fig3();
  NodeIndex a = testutil::node(t, "a"), b = testutil::node(t, "b"),
            c = testutil::node(t, "c"), d = testutil::node(t, "d");

  SUBCASE("zero flows") {
    OspfRouting r = ospf_route_all(t, {});
    for (double load : r.link_loads) CHECK(load == 0.0);
  }
  SUBCASE("single flow") {
    OspfRouting r = ospf_route_all(t, {{a, d, 5.0}});
    LinkIndex ab = t.find_link(a, b);
    LinkIndex by = t.find_link(b, testutil::node(t, "y"));
    LinkIndex yd = t.find_link(testutil::node(t, "y"), d);
    CHECK(r.link_loads[ab] == doctest::Approx(5.0));
    CHECK(r.link_loads[by] == doctest::Approx(5.0));
    CHECK(r.link_loads[yd] == doctest::Approx(5.0));
    CHECK(r.link_loads[t.find_link(a, testutil::node(t, "x"))] == 0.0);
  }
  SUBCASE("a-b link accumulates the four crossing flows") {
    std::vector<Flow> flows{{a, d, 1.5}, {b, c, 2.5}, {a, b, 0.5}, {b, a, 1.0}};
    OspfRouting r = ospf_route_all(t, flows);
    CHECK(r.link_loads[t.find_link(a, b)] == doctest::Approx(5.5));
  }
  SUBCASE("deterministic") {
    auto flows = full_mesh_flows(t, 3, 1.0, 7.0);
    OspfRouting r1 = ospf_route_all(t, flows);
    OspfRouting r2 = ospf_route_all(t, flows);
    CHECK(r1.flow_paths == r2.flow_paths);
    CHECK(r1.link_loads == r2.link_loads);
  }
}

TEST_CASE("intra_utilization") {
  Topology t = testutil::fig3();
  Partition p =
      derive_partition(t, {testutil::node(t, "x"), testutil::node(t, "y")});
  NodeIndex a = testutil::node(t, "a"), b = testutil::node(t, "b");

  SUBCASE("no intra flows") {
    auto u = intra_utilization(t, p, {});
    for (double x : u) CHECK(x == 0.0);
  }
  SUBCASE("two flows on the direct link") {
    auto u = intra_utilization(t, p, {{a, b, 2.0}, {b, a, 2.0}});
    CHECK(u[t.find_link(a, b)] == doctest::Approx(0.4));
  }
  SUBCASE("capacity unassigned") {
    std::istringstream in("NODE a\nNODE b\nLINK a b 1 ?\n");
    Topology bare = parse_internal(in);
    Partition none = derive_partition(bare, {});
    CHECK_THROWS_AS(intra_utilization(bare, none, {{0, 1, 1.0}}), DataError);
  }
}

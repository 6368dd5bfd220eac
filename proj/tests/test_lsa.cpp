#include "hybridte/lsa.hpp"

#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "hybridte/errors.hpp"

using namespace hybridte;

namespace {

struct Fig3Setup {
  Topology t = testutil::fig3();
  Partition p;
  RoutingEntities ents;
  Fig3Setup() {
    p = derive_partition(t, {testutil::node(t, "x"), testutil::node(t, "y")});
    ents = build_entities(t, p);
  }
  const SubDomain& upper() const {
    // sub-domain containing a and b
    NodeIndex a = t.find_node("a");
    for (const SubDomain& sd : p.subdomains)
      if (std::binary_search(sd.internal_nodes.begin(),
                             sd.internal_nodes.end(), a))
        return sd;
    throw std::logic_error("no upper subdomain");
  }
};

// Brute-force realizability: search integer cost vectors in {1..10}^|B| for
// one that induces the mapping with strictly unique exits.
bool brute_force_realizable(const SubDomainDistances& d,
                            const std::vector<NodeIndex>& exits) {
  const SubDomain& sd = *d.subdomain;
  const int nb = static_cast<int>(sd.border_nodes.size());
  std::vector<int> costs(nb, 1);
  while (true) {
    bool ok = true;
    for (size_t si = 0; si < sd.internal_nodes.size() && ok; ++si) {
      std::int64_t best = std::numeric_limits<std::int64_t>::max();
      NodeIndex arg = -1;
      bool unique = false;
      for (int bp = 0; bp < nb; ++bp) {
        std::int64_t v = d.dist[si][bp] + costs[bp];
        if (v < best) {
          best = v;
          arg = sd.border_nodes[bp];
          unique = true;
        } else if (v == best) {
          unique = false;
        }
      }
      ok = unique && arg == exits[si];
    }
    if (ok) return true;
    int i = 0;
    while (i < nb && ++costs[i] > 10) costs[i++] = 1;
    if (i == nb) return false;
  }
}

}  // namespace

TEST_CASE("sub-domain distances on the example instance") {
  Fig3Setup s;
  const SubDomain& up = s.upper();
  SubDomainDistances d = compute_subdomain_distances(s.t, s.p, up);
  auto dist = [&](const std::string& from, const std::string& to) {
    size_t si = std::lower_bound(up.internal_nodes.begin(),
                                 up.internal_nodes.end(),
                                 s.t.find_node(from)) -
                up.internal_nodes.begin();
    size_t bi = std::lower_bound(up.border_nodes.begin(),
                                 up.border_nodes.end(), s.t.find_node(to)) -
                up.border_nodes.begin();
    return d.dist[si][bi];
  };
  CHECK(dist("a", "x") == 1);
  CHECK(dist("a", "y") == 2);
  CHECK(dist("b", "x") == 2);
  CHECK(dist("b", "y") == 1);
}

TEST_CASE("check_realizable on the example upper sub-domain") {
  Fig3Setup s;
  const SubDomain& up = s.upper();
  SubDomainDistances d = compute_subdomain_distances(s.t, s.p, up);
  NodeIndex x = s.t.find_node("x"), y = s.t.find_node("y");
  // internal_nodes sorted: a then b
  SUBCASE("plain mapping is realizable with unit witness") {
    auto w = check_realizable(d, {x, y});
    REQUIRE(w.has_value());
    CHECK(w->at(x) == 1);
    CHECK(w->at(y) == 1);
  }
  SUBCASE("crossed mapping is infeasible") {
    CHECK_FALSE(check_realizable(d, {y, x}).has_value());
  }
  SUBCASE("both to x needs a cost gap") {
    auto w = check_realizable(d, {x, x});
    REQUIRE(w.has_value());
    CHECK(w->at(x) == 1);
    CHECK(w->at(y) == 3);
  }
  SUBCASE("both to y mirrors it") {
    auto w = check_realizable(d, {y, y});
    REQUIRE(w.has_value());
    CHECK(w->at(x) == 3);
    CHECK(w->at(y) == 1);
  }
}

TEST_CASE("check_realizable single border is always feasible") {
  std::istringstream in(
      "NODE a\nNODE b\nNODE s sdn\nNODE z\n"
      "LINK a b 1 ?\nLINK b s 1 ?\nLINK s z 1 ?\n");
  Topology t = parse_internal(in);
  Partition p = derive_partition(t, {t.find_node("s")});
  REQUIRE(p.subdomains.size() == 2);
  for (const SubDomain& sd : p.subdomains) {
    SubDomainDistances d = compute_subdomain_distances(t, p, sd);
    std::vector<NodeIndex> exits(sd.internal_nodes.size(), t.find_node("s"));
    auto w = check_realizable(d, exits);
    REQUIRE(w.has_value());
    CHECK(w->at(t.find_node("s")) == 1);
  }
}

TEST_CASE("enumerate_lsa_sets on the example instance") {
  Fig3Setup s;
  SUBCASE("metric-only keeps 3 of 4 per sub-domain") {
    LsaCatalog cat = enumerate_lsa_sets(s.t, s.p, LsaMode::kMetricOnly);
    CHECK(cat.sets.size() == 6);
    CHECK(cat.sets_of_subdomain[0].size() == 3);
    CHECK(cat.sets_of_subdomain[1].size() == 3);
    // The crossed mapping never appears.
    NodeIndex x = s.t.find_node("x"), y = s.t.find_node("y");
    const SubDomain& up = s.upper();
    for (int k : cat.sets_of_subdomain[up.index])
      CHECK(cat.sets[k].mapping.exit_border != std::vector<NodeIndex>{y, x});
  }
  SUBCASE("all-mappings keeps everything") {
    LsaCatalog cat = enumerate_lsa_sets(s.t, s.p, LsaMode::kAllMappings);
    CHECK(cat.sets.size() == 8);
  }
  SUBCASE("cap exceeded") {
    CHECK_THROWS_WITH_AS(enumerate_lsa_sets(s.t, s.p, LsaMode::kMetricOnly, 3),
                         doctest::Contains("sub-domain"), InfeasibleError);
  }
  SUBCASE("single internal node with two borders yields both sets") {
    std::istringstream in(
        "NODE m\nNODE u sdn\nNODE v sdn\nNODE z\n"
        "LINK m u 1 ?\nLINK m v 2 ?\nLINK u z 1 ?\nLINK v z 1 ?\n");
    Topology t = parse_internal(in);
    Partition p =
        derive_partition(t, {t.find_node("u"), t.find_node("v")});
    REQUIRE(p.subdomains.size() == 2);
    LsaCatalog cat = enumerate_lsa_sets(t, p, LsaMode::kMetricOnly);
    for (const auto& ids : cat.sets_of_subdomain) CHECK(ids.size() == 2);
  }
}

TEST_CASE("witness replay reproduces every emitted mapping") {
  Fig3Setup s;
  LsaCatalog cat = enumerate_lsa_sets(s.t, s.p, LsaMode::kMetricOnly);
  for (const LsaSet& set : cat.sets)
    CHECK(verify_witness(cat.distances[set.mapping.subdomain], set));
}

TEST_CASE("difference-constraint feasibility equals brute force") {
  // Uniform and mixed small metrics keep canonical witnesses within the
  // brute-force cost box {1..10}.
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    Topology base = testutil::random_topology(seed, 6 + seed % 3, 4);
    std::vector<Link> links = base.links();
    for (Link& l : links) l.metric = 1 + static_cast<int>(seed + l.a) % 3;
    Topology t = make_topology(base.node_names(), links);
    auto sdn = testutil::random_separator(t, seed * 31, 2);
    if (sdn.empty()) continue;
    Partition p = derive_partition(t, sdn);
    for (const SubDomain& sd : p.subdomains) {
      if (sd.border_nodes.size() > 3 || sd.internal_nodes.size() > 5) continue;
      SubDomainDistances d = compute_subdomain_distances(t, p, sd);
      // every mapping
      std::vector<size_t> digits(sd.internal_nodes.size(), 0);
      while (true) {
        std::vector<NodeIndex> exits;
        for (size_t i = 0; i < digits.size(); ++i)
          exits.push_back(sd.border_nodes[digits[i]]);
        bool fast = check_realizable(d, exits).has_value();
        bool slow = brute_force_realizable(d, exits);
        CHECK(fast == slow);
        ++checked;
        size_t i = 0;
        while (i < digits.size() && ++digits[i] == sd.border_nodes.size())
          digits[i++] = 0;
        if (i == digits.size()) break;
      }
    }
  }
  CHECK(checked > 50);
}

TEST_CASE("lsa_param rules") {
  Fig3Setup s;
  LsaCatalog cat = enumerate_lsa_sets(s.t, s.p, LsaMode::kMetricOnly);
  auto table = lsa_param(cat, s.ents.paths);

  NodeIndex a = s.t.find_node("a"), b = s.t.find_node("b"),
            c = s.t.find_node("c"), d = s.t.find_node("d"),
            x = s.t.find_node("x"), y = s.t.find_node("y");
  const SubDomain& up = s.upper();
  int k_plain = -1;  // {a->x, b->y}
  for (int k : cat.sets_of_subdomain[up.index])
    if (cat.sets[k].mapping.exit_border == std::vector<NodeIndex>{x, y})
      k_plain = k;
  REQUIRE(k_plain >= 0);

  auto path_id = [&](NodeIndex s_, NodeIndex t_) {
    for (const OspfPath& p : s.ents.paths)
      if (p.source == s_ && p.target == t_) return p.id;
    return -1;
  };
  CHECK(table[k_plain][path_id(b, x)] == 0);  // mapping sends b to y
  CHECK(table[k_plain][path_id(a, x)] == 1);
  // destination-terminal path c->d allowed under every set of its sub-domain
  int cd = path_id(c, d);
  for (int k : cat.sets_of_subdomain[1 - up.index]) CHECK(table[k][cd] == 1);
  (void)d;
}

TEST_CASE("catalog serialization shape") {
  Fig3Setup s;
  LsaCatalog cat = enumerate_lsa_sets(s.t, s.p, LsaMode::kMetricOnly);
  std::string text = serialize_catalog(s.t, cat);
  std::istringstream lines(text);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    CHECK(line.rfind("k=", 0) == 0);
    CHECK(line.find("subdomain=") != std::string::npos);
    CHECK(line.find("mapping=") != std::string::npos);
    CHECK(line.find("costs=") != std::string::npos);
    ++count;
  }
  CHECK(count == 6);
}

#include "hybridte/solve.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "hybridte/cost.hpp"
#include "hybridte/errors.hpp"

using namespace hybridte;

namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("hybridte_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct Fig3Instance {
  Topology t = testutil::fig3();
  Partition p;
  RoutingEntities ents;
  LsaCatalog cat;
  std::vector<std::vector<char>> table;
  std::vector<Flow> inter;
  std::vector<double> u;
  IlpModel model;

  explicit Fig3Instance(std::uint64_t seed = 21) {
    p = derive_partition(t, {t.find_node("x"), t.find_node("y")});
    ents = build_entities(t, p);
    cat = enumerate_lsa_sets(t, p, LsaMode::kMetricOnly);
    table = lsa_param(cat, ents.paths);
    auto flows = full_mesh_flows(t, seed, 1.0, 7.0);
    auto [intra, inter_] = classify_flows(p, flows);
    inter = inter_;
    u = intra_utilization(t, p, intra);
    model = build_hybrid_model(t, p, ents, cat, table, inter, u);
  }

  Solution oracle() const {
    return solve_exhaustive(model, t, p, ents, cat, table, inter, u);
  }
};

IlpModel toy_infeasible_model() {
  IlpModel m;
  m.var_names = {"Rp_f0_p0", "U_l0", "COST_l0"};
  m.is_binary = {1, 0, 0};
  m.var_info = {{VarKind::kPathUse, 0, 0, -1, -1, -1},
                {VarKind::kUtil, -1, -1, -1, -1, 0},
                {VarKind::kLinkCost, -1, -1, -1, -1, 0}};
  m.var_index = {{"Rp_f0_p0", 0}, {"U_l0", 1}, {"COST_l0", 2}};
  m.rows = {{"eq0", {{0, 1.0}}, Rel::kEq, 0.0},
            {"eq1", {{0, 1.0}}, Rel::kEq, 1.0}};
  m.objective = {{2, 1.0}};
  return m;
}

}  // namespace

TEST_CASE("parse_solution_text basics and errors") {
  Fig3Instance inst;
  SUBCASE("percent style values parse and binaries round") {
    std::istringstream in(
        "# comment\n" +
        inst.model.var_names[0] + " 0.9999999\nOBJECTIVE 0\n");
    Solution s = parse_solution_text(inst.model, in);
    CHECK(s.values[0] == 1.0);
  }
  SUBCASE("missing objective") {
    std::istringstream in(inst.model.var_names[0] + " 1\n");
    CHECK_THROWS_AS(parse_solution_text(inst.model, in), SolverError);
  }
  SUBCASE("unknown variable") {
    std::istringstream in("NOSUCH 1\nOBJECTIVE 0\n");
    CHECK_THROWS_AS(parse_solution_text(inst.model, in), SolverError);
  }
  SUBCASE("binary out of tolerance") {
    std::istringstream in(inst.model.var_names[0] + " 0.5\nOBJECTIVE 0\n");
    CHECK_THROWS_AS(parse_solution_text(inst.model, in), SolverError);
  }
  SUBCASE("objective must match cost sum") {
    std::istringstream in("OBJECTIVE 5\n");
    CHECK_THROWS_AS(parse_solution_text(inst.model, in), SolverError);
  }
}

TEST_CASE("solve_external against the bundled wrapper") {
  SUBCASE("infeasible toy model") {
    IlpModel toy = toy_infeasible_model();
    ExternalSolveResult r = solve_external(toy, testutil::solver_command(),
                                           scratch_dir("infeasible"));
    CHECK(r.infeasible);
  }
  SUBCASE("solver error on a broken command") {
    IlpModel toy = toy_infeasible_model();
    CHECK_THROWS_AS(
        solve_external(toy, "false", scratch_dir("broken")),
        SolverError);
  }
  SUBCASE("analytically zero objective") {
    Fig3Instance inst;
    inst.inter.clear();
    std::vector<double> zeros(inst.t.link_count(), 0.0);
    IlpModel model = build_hybrid_model(inst.t, inst.p, inst.ents, inst.cat,
                                        inst.table, inst.inter, zeros);
    ExternalSolveResult r = solve_external(model, testutil::solver_command(),
                                           scratch_dir("zero"));
    REQUIRE_FALSE(r.infeasible);
    CHECK(r.solution.objective == doctest::Approx(0.0).epsilon(1e-6));
  }
}

TEST_CASE("oracle equals the external solver on the example instance") {
  Fig3Instance inst;
  Solution oracle = inst.oracle();
  ExternalSolveResult ext = solve_external(
      inst.model, testutil::solver_command(), scratch_dir("fig3"));
  REQUIRE_FALSE(ext.infeasible);
  CHECK(std::abs(oracle.objective - ext.solution.objective) <= 1e-6);

  // Both decode into valid walks with matching utilizations.
  DecodeResult od = decode_and_validate(inst.model, oracle, inst.t, inst.inter,
                                        inst.u, &inst.ents, &inst.cat,
                                        &inst.table);
  DecodeResult ed = decode_and_validate(inst.model, ext.solution, inst.t,
                                        inst.inter, inst.u, &inst.ents,
                                        &inst.cat, &inst.table);
  CHECK(od.objective == doctest::Approx(oracle.objective));
  CHECK(ed.objective == doctest::Approx(ext.solution.objective));
}

TEST_CASE("oracle trivial cases") {
  SUBCASE("zero flows") {
    Fig3Instance inst;
    inst.inter.clear();
    IlpModel model = build_hybrid_model(inst.t, inst.p, inst.ents, inst.cat,
                                        inst.table, inst.inter, inst.u);
    Solution s = solve_exhaustive(model, inst.t, inst.p, inst.ents, inst.cat,
                                  inst.table, inst.inter, inst.u);
    double expect = 0.0;
    for (double x : inst.u) expect += link_cost(x);
    CHECK(s.objective == doctest::Approx(expect));
  }
  SUBCASE("single flow with a unique walk") {
    std::istringstream in(
        "NODE a\nNODE s sdn\nNODE b\nLINK a s 1 10\nLINK s b 1 10\n");
    Topology t = parse_internal(in);
    Partition p = derive_partition(t, {t.find_node("s")});
    RoutingEntities ents = build_entities(t, p);
    LsaCatalog cat = enumerate_lsa_sets(t, p, LsaMode::kMetricOnly);
    auto table = lsa_param(cat, ents.paths);
    std::vector<Flow> inter{{t.find_node("a"), t.find_node("b"), 5.0}};
    std::vector<double> u(t.link_count(), 0.0);
    IlpModel model = build_hybrid_model(t, p, ents, cat, table, inter, u);
    Solution s = solve_exhaustive(model, t, p, ents, cat, table, inter, u);
    DecodeResult d = decode_and_validate(model, s, t, inter, u, &ents, &cat,
                                         &table);
    std::vector<NodeIndex> expect{t.find_node("a"), t.find_node("s"),
                                  t.find_node("b")};
    CHECK(d.walks[0].nodes == expect);
  }
  SUBCASE("size gate") {
    Fig3Instance inst;
    std::vector<Flow> many;
    for (int i = 0; i < 13; ++i) many.push_back(inst.inter[i % 8]);
    CHECK_THROWS_WITH_AS(
        solve_exhaustive(inst.model, inst.t, inst.p, inst.ents, inst.cat,
                         inst.table, many, inst.u),
        doctest::Contains("size gate"), InfeasibleError);
  }
}

TEST_CASE("oracle result is reproducible") {
  Fig3Instance inst;
  Solution a = inst.oracle();
  Solution b = inst.oracle();
  CHECK(a.values == b.values);
  CHECK(a.objective == b.objective);
}

TEST_CASE("decode rejects an inconsistent LSA selection") {
  Fig3Instance inst;
  Solution s = inst.oracle();
  // Find a selected LSA set backing a used gated path and swap it for one
  // that forbids the path.
  int used_path = -1, flow = -1;
  for (int v = 0; v < inst.model.var_count(); ++v) {
    const VarInfo& info = inst.model.var_info[v];
    if (info.kind != VarKind::kPathUse || s.values[v] < 0.5) continue;
    const OspfPath& p = inst.ents.paths[info.entity];
    const SubDomain& sd = inst.p.subdomains[p.subdomain];
    if (std::binary_search(sd.border_nodes.begin(), sd.border_nodes.end(),
                           p.target)) {
      used_path = info.entity;
      flow = info.flow;
      break;
    }
  }
  REQUIRE(used_path >= 0);
  NodeIndex dest = inst.inter[flow].dst;
  int subdomain = inst.ents.paths[used_path].subdomain;
  int forbidden = -1;
  for (int k : inst.cat.sets_of_subdomain[subdomain])
    if (!inst.table[k][used_path]) forbidden = k;
  REQUIRE(forbidden >= 0);
  for (int k : inst.cat.sets_of_subdomain[subdomain]) {
    int var = inst.model.find_var("LSA_k" + std::to_string(k) + "_d" +
                                  std::to_string(dest));
    if (var >= 0) s.values[var] = k == forbidden ? 1.0 : 0.0;
  }
  CHECK_THROWS_WITH_AS(
      decode_and_validate(inst.model, s, inst.t, inst.inter, inst.u,
                          &inst.ents, &inst.cat, &inst.table),
      doctest::Contains("inconsistent"), SolverError);
}

TEST_CASE("decode prunes a detached SDN cycle without changing the objective") {
  // a - s - b chain plus an SDN pair u=v hanging off s: the cycle u->v,
  // v->u is node-disjoint from the walk a-s-b.
  std::istringstream in(
      "NODE a\nNODE s sdn\nNODE b\nNODE u sdn\nNODE v sdn\n"
      "LINK a s 1 100\nLINK s b 1 100\nLINK s u 1 100\nLINK u v 1 100\n");
  Topology t = parse_internal(in);
  Partition p = derive_partition(
      t, {t.find_node("s"), t.find_node("u"), t.find_node("v")});
  RoutingEntities ents = build_entities(t, p);
  LsaCatalog cat = enumerate_lsa_sets(t, p, LsaMode::kMetricOnly);
  auto table = lsa_param(cat, ents.paths);
  std::vector<Flow> inter{{t.find_node("a"), t.find_node("b"), 5.0}};
  std::vector<double> u(t.link_count(), 0.0);
  IlpModel model = build_hybrid_model(t, p, ents, cat, table, inter, u);

  Solution s = solve_exhaustive(model, t, p, ents, cat, table, inter, u);
  double base_objective = s.objective;

  // Add the detached cycle and its utilization contribution.
  auto sdn_id = [&](const std::string& from, const std::string& to) {
    for (const SdnLink& l : ents.sdn_links)
      if (t.name(l.source) == from && t.name(l.target) == to) return l.id;
    return -1;
  };
  int uv = sdn_id("u", "v"), vu = sdn_id("v", "u");
  REQUIRE(uv >= 0);
  REQUIRE(vu >= 0);
  s.values[model.find_var("Rl_f0_l" + std::to_string(uv))] = 1.0;
  s.values[model.find_var("Rl_f0_l" + std::to_string(vu))] = 1.0;
  LinkIndex cyc = t.find_link(t.find_node("u"), t.find_node("v"));
  int uvar = model.find_var("U_l" + std::to_string(cyc));
  s.values[uvar] += 2 * 5.0 / 100.0;  // still far below the zero-cost knee
  REQUIRE(check_solution_feasible(model, s.values).empty());

  DecodeResult d =
      decode_and_validate(model, s, t, inter, u, &ents, &cat, &table);
  CHECK(d.walks[0].pruned_entities == 2);
  CHECK(d.objective == doctest::Approx(base_objective));
  std::vector<NodeIndex> expect{t.find_node("a"), t.find_node("s"),
                                t.find_node("b")};
  CHECK(d.walks[0].nodes == expect);
  REQUIRE(d.notes.size() == 1);
  CHECK(d.notes[0].find("pruned 2") != std::string::npos);
}

TEST_CASE("plain OSPF injection is feasible and bounds the optimum") {
  Fig3Instance inst;
  std::optional<Solution> injected = inject_plain_ospf(
      inst.model, inst.t, inst.p, inst.ents, inst.cat, inst.table, inst.inter,
      inst.u);
  REQUIRE(injected.has_value());
  CHECK(check_solution_feasible(inst.model, injected->values).empty());
  Solution oracle = inst.oracle();
  CHECK(oracle.objective <= injected->objective + 1e-6);
}

TEST_CASE("oracle equals external solver on random small instances") {
  int tested = 0;
  for (std::uint64_t seed = 1; seed <= 12 && tested < 4; ++seed) {
    Topology t = testutil::random_topology(seed, 6, 4);
    auto sdn = testutil::random_separator(t, seed * 13, 2);
    if (sdn.empty()) continue;
    Partition p = derive_partition(t, sdn);
    RoutingEntities ents = build_entities(t, p);
    LsaCatalog cat = enumerate_lsa_sets(t, p, LsaMode::kMetricOnly);
    if (cat.sets.size() > 64) continue;
    auto table = lsa_param(cat, ents.paths);
    auto flows = full_mesh_flows(t, seed * 7, 1.0, 7.0);
    auto [intra, inter] = classify_flows(p, flows);
    if (inter.empty() || inter.size() > 12) continue;
    std::vector<double> u = intra_utilization(t, p, intra);
    IlpModel model = build_hybrid_model(t, p, ents, cat, table, inter, u);
    Solution oracle =
        solve_exhaustive(model, t, p, ents, cat, table, inter, u);
    ExternalSolveResult ext =
        solve_external(model, testutil::solver_command(),
                       scratch_dir("rand" + std::to_string(seed)));
    REQUIRE_FALSE(ext.infeasible);
    CHECK(std::abs(oracle.objective - ext.solution.objective) <= 1e-6);
    ++tested;
  }
  CHECK(tested >= 2);
}

#include <catch2/catch_amalgamated.hpp>

#include "test_util.hpp"

using namespace mapfsat;

namespace {

MapfInstance corridor_with_pocket(int corridor_len, int pocket_at) {
  Graph g(corridor_len + 1);
  for (int i = 0; i + 1 < corridor_len; ++i) g.add_edge(i, i + 1);
  g.add_edge(pocket_at, corridor_len);
  return MapfInstance{g, {0, corridor_len - 1}, {corridor_len - 1, 0}};
}

}  // namespace

TEST_CASE("mdd_sat: all agents at goals solve with zero cost") {
  GridGraph gg = grid_to_graph(testutil::empty_grid_map(2, 2));
  MapfInstance inst{gg.graph,
                    {gg.vertex_at(0, 0), gg.vertex_at(1, 1)},
                    {gg.vertex_at(0, 0), gg.vertex_at(1, 1)}};
  auto out = mdd_sat(inst);
  REQUIRE(out.status == SolveStatus::Solved);
  CHECK(*out.xi == 0);
  CHECK(sum_of_costs(*out.solution) == 0);
}

TEST_CASE("mdd_sat: swap on a bare edge hits the xi cap") {
  MapfInstance inst{path_graph(2), {0, 1}, {1, 0}};
  auto oracle = joint_state_optimum(inst);
  REQUIRE_FALSE(oracle.solvable);  // no cycle to rotate through
  auto out = mdd_sat(inst);
  CHECK(out.status == SolveStatus::XiCapReached);
}

TEST_CASE("mdd_sat: unreachable goal is reported before encoding") {
  Graph g(4);
  g.add_edge(0, 1);
  g.add_edge(2, 3);
  MapfInstance inst{g, {0}, {3}};
  CHECK(mdd_sat(inst).status == SolveStatus::Unsolvable);
  CHECK(smt_cbs(inst).status == SolveStatus::Unsolvable);
  CHECK(dpll_mapf(inst, DpllConfig::preset("2/3")).status ==
        SolveStatus::Unsolvable);
}

TEST_CASE("mdd_sat matches the oracle on random 3x3 instances") {
  std::mt19937 rng(61);
  int checked = 0;
  while (checked < 15) {
    auto maybe = testutil::random_walk_instance(rng, 3, 2, 10);
    if (!maybe) continue;
    auto oracle = joint_state_optimum(*maybe, 4'000'000);
    REQUIRE(oracle.solvable);
    auto out = mdd_sat(*maybe);
    REQUIRE(out.status == SolveStatus::Solved);
    CHECK(*out.xi == oracle.optimal_soc);
    ++checked;
  }
}

TEST_CASE("smt_cbs: a single agent needs one consultation, no refinement") {
  MapfInstance inst{path_graph(4), {0}, {3}};
  auto out = smt_cbs(inst);
  REQUIRE(out.status == SolveStatus::Solved);
  CHECK(*out.xi == 3);
  CHECK(out.stats.sat_consultations == 1);
  CHECK(out.stats.conflicts_refined == 0);
}

TEST_CASE("smt_cbs: crossing agents force refinements, optimum preserved") {
  // Shared middle vertex: 0-1-2 path plus a bypass 0-3-2.
  Graph g(4);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  g.add_edge(0, 3);
  g.add_edge(3, 2);
  MapfInstance inst{g, {0, 2}, {2, 0}};
  auto eager = mdd_sat(inst);
  auto lazy = smt_cbs(inst);
  REQUIRE(eager.status == SolveStatus::Solved);
  REQUIRE(lazy.status == SolveStatus::Solved);
  CHECK(*eager.xi == *lazy.xi);
  CHECK(lazy.stats.conflicts_refined >= 1);
}

TEST_CASE("smt_cbs: sparse instances finish with a smaller formula") {
  GridGraph gg = grid_to_graph(testutil::empty_grid_map(8, 8));
  MapfInstance inst{gg.graph,
                    {gg.vertex_at(0, 0), gg.vertex_at(7, 0)},
                    {gg.vertex_at(7, 6), gg.vertex_at(0, 7)}};
  auto lazy = smt_cbs(inst);
  REQUIRE(lazy.status == SolveStatus::Solved);
  int xi0 = sum_of_costs_lower_bound(inst);
  BooleanModel eager =
      encode_complete(inst, build_mdds(inst, *lazy.xi - xi0), *lazy.xi);
  CHECK(lazy.stats.clauses_final < eager.clause_count());
}

TEST_CASE("dpll_mapf: single agent never consults the theory for clauses") {
  MapfInstance inst{path_graph(4), {0}, {3}};
  auto eager = mdd_sat(inst);
  auto integrated = dpll_mapf(inst, DpllConfig::preset("1/2 3/4"));
  REQUIRE(integrated.status == SolveStatus::Solved);
  CHECK(*integrated.xi == *eager.xi);
  CHECK(integrated.stats.conflicts_refined == 0);
  CHECK(integrated.stats.consistency_checks >= 1);  // final mandatory check
}

TEST_CASE("dpll_mapf: bottleneck refines on partial assignments") {
  MapfInstance inst = corridor_with_pocket(5, 2);
  DpllConfig half{"1/2", {0.5}};
  auto integrated = dpll_mapf(inst, half);
  auto lazy = smt_cbs(inst);
  REQUIRE(integrated.status == SolveStatus::Solved);
  REQUIRE(lazy.status == SolveStatus::Solved);
  CHECK(*integrated.xi == *lazy.xi);
  CHECK(integrated.stats.consistency_checks_partial >= 1);
  CHECK(integrated.stats.conflicts_refined_partial >= 1);
}

TEST_CASE("dpll presets agree on random instances") {
  std::mt19937 rng(73);
  int checked = 0;
  while (checked < 15) {
    auto maybe = testutil::random_walk_instance(rng, 4, 3, 15);
    if (!maybe) continue;
    auto a = dpll_mapf(*maybe, DpllConfig::preset("1/2 3/4"));
    auto b = dpll_mapf(*maybe, DpllConfig::preset("1/3 2/3"));
    auto c = dpll_mapf(*maybe, DpllConfig::preset("2/3"));
    REQUIRE(a.status == SolveStatus::Solved);
    CHECK(*a.xi == *b.xi);
    CHECK(*a.xi == *c.xi);
    ++checked;
  }
}

TEST_CASE("dpll with final-only checks matches smt_cbs optima") {
  std::mt19937 rng(79);
  int checked = 0;
  while (checked < 10) {
    auto maybe = testutil::random_walk_instance(rng, 4, 2, 15);
    if (!maybe) continue;
    auto final_only = dpll_mapf(*maybe, DpllConfig{"final-only", {}});
    auto lazy = smt_cbs(*maybe);
    REQUIRE(final_only.status == SolveStatus::Solved);
    CHECK(*final_only.xi == *lazy.xi);
    ++checked;
  }
}

TEST_CASE("refine-first-only mode still reaches the optimum") {
  MapfInstance inst = corridor_with_pocket(5, 2);
  SolverOptions opt;
  opt.refine_first_only = true;
  auto lazy = smt_cbs(inst, opt);
  auto reference = smt_cbs(inst);
  REQUIRE(lazy.status == SolveStatus::Solved);
  CHECK(*lazy.xi == *reference.xi);
}

TEST_CASE("solved outcomes carry valid solutions costing exactly xi") {
  std::mt19937 rng(83);
  int checked = 0;
  while (checked < 10) {
    auto maybe = testutil::random_walk_instance(rng, 4, 3, 20);
    if (!maybe) continue;
    for (auto out : {mdd_sat(*maybe), smt_cbs(*maybe),
                     dpll_mapf(*maybe, DpllConfig::preset("1/2 3/4"))}) {
      REQUIRE(out.status == SolveStatus::Solved);
      CHECK(is_valid_solution(*out.solution, *maybe));
      CHECK(sum_of_costs(*out.solution) == *out.xi);
    }
    ++checked;
  }
}

TEST_CASE("timeouts surface as Timeout with partial statistics") {
  GridGraph gg = grid_to_graph(testutil::empty_grid_map(8, 8));
  MapfInstance inst{gg.graph,
                    {gg.vertex_at(0, 0), gg.vertex_at(7, 0), gg.vertex_at(0, 7),
                     gg.vertex_at(7, 7)},
                    {gg.vertex_at(7, 7), gg.vertex_at(0, 7), gg.vertex_at(7, 0),
                     gg.vertex_at(0, 0)}};
  SolverOptions opt;
  opt.timeout_seconds = 1e-6;
  auto out = mdd_sat(inst, opt);
  CHECK(out.status == SolveStatus::Timeout);
}

TEST_CASE("cross_check: four-way agreement on a 6-vertex instance") {
  MapfInstance inst = corridor_with_pocket(5, 2);
  auto report = cross_check(inst);
  CHECK(report.agree);
  REQUIRE(report.oracle.has_value());
  CHECK(report.oracle->solvable);
  CHECK(*report.mddsat.xi == report.oracle->optimal_soc);
}

TEST_CASE("cross_check: adjacent start and goal cost one everywhere") {
  MapfInstance inst{path_graph(2), {0}, {1}};
  auto report = cross_check(inst);
  CHECK(report.agree);
  CHECK(*report.mddsat.xi == 1);
  CHECK(*report.smtcbs.xi == 1);
  for (auto& [name, outcome] : report.dpll) CHECK(*outcome.xi == 1);
}

TEST_CASE("cross_check: unsolvable instances stay unsolved everywhere") {
  MapfInstance inst{path_graph(3), {0, 2}, {2, 0}};
  auto report = cross_check(inst);
  CHECK(report.agree);
  REQUIRE(report.oracle.has_value());
  CHECK_FALSE(report.oracle->solvable);
  CHECK(report.mddsat.status == SolveStatus::XiCapReached);
  CHECK(report.smtcbs.status == SolveStatus::XiCapReached);
}

TEST_CASE("xi cap is configurable") {
  MapfInstance inst{path_graph(3), {0, 2}, {2, 0}};
  SolverOptions opt;
  opt.xi_cap = sum_of_costs_lower_bound(inst) + 1;
  auto out = mdd_sat(inst, opt);
  CHECK(out.status == SolveStatus::XiCapReached);
  CHECK(out.stats.sat_consultations == 2);  // xi0 and xi0+1
}

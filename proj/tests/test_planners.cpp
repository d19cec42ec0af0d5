#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "marrt/planners.hpp"
#include "support.hpp"

using namespace marrt;
using marrt::testing_support::make_instance;
using marrt::testing_support::validate_plan;

namespace {

JointPath line_path(std::vector<Cell> cells) {
  JointPath p;
  for (Cell c : cells) p.steps.push_back(JointState{c});
  return p;
}

PlannerConfig iters(std::int64_t n, std::uint64_t seed = 1) {
  PlannerConfig cfg;
  cfg.iteration_budget = n;
  cfg.seed = seed;
  return cfg;
}

void expect_monotone(const RunTrace &trace) {
  std::optional<Cost> prev;
  for (const TraceRecord &r : trace.records) {
    if (prev) {
      ASSERT_TRUE(r.best_cost.has_value());
      ASSERT_LE(*r.best_cost, *prev);
    }
    if (r.best_cost) prev = r.best_cost;
  }
}

std::string csv(const RunTrace &t) {
  std::ostringstream out;
  write_trace_csv(out, t, false);
  return out.str();
}

} // namespace

TEST(Extend, StraightLine) {
  GridMap m(10, 10);
  Tree t(JointState{{0, 0}}, JointState{{9, 9}});
  const ExtendOutcome out = extend(t, JointState{{0, 3}}, m, Cost{1000}, 6.0);
  EXPECT_EQ(out.status, ExtendStatus::Advanced);
  ASSERT_TRUE(out.new_node);
  EXPECT_EQ(t.node(*out.new_node).state, (JointState{{0, 3}}));
  EXPECT_EQ(t.node(*out.new_node).cost_to_root.value, 3);
}

TEST(Extend, ExistingStateAddsNothing) {
  GridMap m(10, 10);
  Tree t(JointState{{0, 0}}, JointState{{9, 9}});
  extend(t, JointState{{0, 3}}, m, Cost{1000}, 6.0);
  // The node holding x_rand is its own nearest node, so nothing is added.
  EXPECT_NE(extend(t, JointState{{0, 3}}, m, Cost{1000}, 6.0).status, ExtendStatus::Advanced);
  EXPECT_EQ(t.size(), 2u);
  // The root is its own nearest node, so the steer makes no progress.
  EXPECT_EQ(extend(t, JointState{{0, 0}}, m, Cost{1000}, 6.0).status, ExtendStatus::Trapped);
  EXPECT_EQ(t.size(), 2u);
}

TEST(Extend, RewireLowersCost) {
  GridMap m(10, 10);
  Tree t(JointState{{0, 0}}, JointState{{9, 9}});
  // root -> a by a six-step detour over the top.
  const NodeId a = t.add_node(JointState{{2, 0}}, t.root(),
                              line_path({{0, 0}, {0, 1}, {0, 2}, {1, 2}, {2, 2}, {2, 1}, {2, 0}}));
  ASSERT_EQ(t.node(a).cost_to_root.value, 6);
  // x_new = (1,1) hangs off the root at cost 2 and reaches a in 2 more steps.
  const ExtendOutcome out = extend(t, JointState{{1, 1}}, m, Cost{1000}, 6.0);
  ASSERT_EQ(out.status, ExtendStatus::Advanced);
  EXPECT_EQ(t.node(*out.new_node).cost_to_root.value, 2);
  EXPECT_EQ(t.node(a).cost_to_root.value, 4);
  EXPECT_EQ(t.node(a).parent, out.new_node);
  EXPECT_FALSE(out.removed_during_rewire);
}

TEST(Extend, RewireRemovesSingleChildParentAtCapacity) {
  GridMap m(10, 10);
  Tree t(JointState{{0, 0}}, JointState{{9, 9}}, 3);
  const NodeId p = t.add_node(JointState{{0, 2}}, t.root(), line_path({{0, 0}, {0, 1}, {0, 2}}));
  const NodeId a = t.add_node(JointState{{2, 0}}, p, line_path({{0, 2}, {1, 2}, {2, 2}, {2, 1}, {2, 0}}));
  const ExtendOutcome out = extend(t, JointState{{1, 1}}, m, Cost{1000}, 6.0);
  ASSERT_EQ(out.status, ExtendStatus::Advanced);
  EXPECT_TRUE(out.removed_during_rewire);
  EXPECT_FALSE(t.contains(p));
  EXPECT_EQ(t.size(), 3u);
  EXPECT_EQ(t.node(a).cost_to_root.value, 4);
}

TEST(Extend, NoRemovalBelowCapacity) {
  GridMap m(10, 10);
  Tree t(JointState{{0, 0}}, JointState{{9, 9}}, 10);
  const NodeId p = t.add_node(JointState{{0, 2}}, t.root(), line_path({{0, 0}, {0, 1}, {0, 2}}));
  t.add_node(JointState{{2, 0}}, p, line_path({{0, 2}, {1, 2}, {2, 2}, {2, 1}, {2, 0}}));
  const ExtendOutcome out = extend(t, JointState{{1, 1}}, m, Cost{1000}, 6.0);
  EXPECT_FALSE(out.removed_during_rewire);
  EXPECT_TRUE(t.contains(p));
  EXPECT_EQ(t.size(), 4u);
}

TEST(Extend, FallbackRemovesNewNode) {
  // Capacity 2, the goal is the only other node: nothing may be force-removed.
  GridMap m(10, 10);
  Tree t(JointState{{0, 0}}, JointState{{0, 1}}, 2);
  t.add_node(JointState{{0, 1}}, t.root(), line_path({{0, 0}, {0, 1}}));
  const ExtendOutcome out = extend(t, JointState{{3, 0}}, m, Cost{1000}, 6.0);
  ASSERT_EQ(out.status, ExtendStatus::Advanced);
  const NodeId keep[] = {*out.new_node};
  Rng rng(1);
  EXPECT_FALSE(force_removal(t, keep, rng).has_value());
  retract(t, out);
  EXPECT_EQ(t.size(), 2u);
  EXPECT_FALSE(t.find(JointState{{3, 0}}).has_value());
}

TEST(MaRrtStar, SingleAgentLowerBound) {
  const auto inst = make_instance(5, 5, {}, {{0, 0}}, {{4, 4}});
  PlannerConfig cfg = iters(2000);
  cfg.p_goal = 0.2;
  const PlannerResult r = ma_rrt_star(inst, cfg);
  ASSERT_TRUE(r.best);
  EXPECT_GE(r.best->cost.value, 8);
  EXPECT_EQ(validate_plan(inst, r.best->path), "");
  EXPECT_EQ(r.trace.records.size(), 2000u);
  expect_monotone(r.trace);
}

TEST(MaRrtStar, ZeroBudget) {
  const auto inst = make_instance(5, 5, {}, {{0, 0}}, {{4, 4}});
  const PlannerResult r = ma_rrt_star(inst, iters(0));
  EXPECT_FALSE(r.best);
  EXPECT_TRUE(r.trace.records.empty());
}

TEST(MaRrtStar, Deterministic) {
  const ProblemInstance inst = generate_instance(15, 15, 3, 0.1, 4);
  const PlannerResult a = ma_rrt_star(inst, iters(1500, 9));
  const PlannerResult b = ma_rrt_star(inst, iters(1500, 9));
  EXPECT_TRUE(same_progress(a.trace, b.trace));
  EXPECT_EQ(csv(a.trace), csv(b.trace));
}

TEST(MaRrtStar, SolutionBookkeeping) {
  const ProblemInstance inst = generate_instance(10, 10, 2, 0.1, 12);
  const PlannerResult r = ma_rrt_star(inst, iters(3000, 3));
  ASSERT_TRUE(r.best);
  ASSERT_FALSE(r.trace.events.empty());
  EXPECT_EQ(r.trace.events.back().cost, r.best->cost);
  EXPECT_EQ(r.trace.events.back().iteration, r.best->found_at_iteration);
  EXPECT_EQ(path_cost(r.best->path), r.best->cost);
  for (std::size_t i = 1; i < r.trace.events.size(); ++i)
    EXPECT_LT(r.trace.events[i].cost, r.trace.events[i - 1].cost);
  const TraceRecord &first = r.trace.records[r.trace.events.front().iteration - 1];
  EXPECT_EQ(first.best_cost, r.trace.events.front().cost);
}

TEST(MaRrtStarFn, CapacityHolds) {
  const ProblemInstance inst = generate_instance(20, 20, 3, 0.1, 2);
  PlannerConfig cfg = iters(3000, 5);
  cfg.capacity = 60;
  const PlannerResult r = ma_rrt_star_fn(inst, cfg);
  bool reached = false;
  for (const TraceRecord &rec : r.trace.records) {
    ASSERT_LE(rec.node_count, 60u);
    if (rec.node_count == 60u) reached = true;
    else ASSERT_FALSE(reached) << "node count dropped after reaching capacity";
  }
  EXPECT_TRUE(reached);
  expect_monotone(r.trace);
  if (r.best) EXPECT_EQ(validate_plan(inst, r.best->path), "");
}

TEST(MaRrtStarFn, LooseCapacityMatchesBase) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const ProblemInstance inst = generate_instance(12, 12, 2, 0.1, seed);
    PlannerConfig cfg = iters(800, seed);
    const PlannerResult base = ma_rrt_star(inst, cfg);
    cfg.capacity = 800;
    const PlannerResult fn = ma_rrt_star_fn(inst, cfg);
    EXPECT_EQ(csv(base.trace), csv(fn.trace));
  }
}

TEST(MaRrtStarFn, NeedsCapacity) {
  const ProblemInstance inst = generate_instance(5, 5, 1, 0.0, 1);
  EXPECT_THROW(ma_rrt_star_fn(inst, iters(10)), std::invalid_argument);
  PlannerConfig cfg = iters(10);
  cfg.capacity = 1;
  EXPECT_THROW(ma_rrt_star_fn(inst, cfg), std::invalid_argument);
}

TEST(GRrtStar, StartIsGoal) {
  GridMap m(5, 5);
  const PlannerResult r = g_rrt_star(m, {2, 2}, {2, 2}, iters(5));
  ASSERT_TRUE(r.best);
  EXPECT_EQ(r.best->cost.value, 0);
  EXPECT_EQ(r.best->found_at_iteration, 0);
}

TEST(GRrtStar, RowConvergesToManhattan) {
  GridMap m(10, 10);
  const PlannerResult r = g_rrt_star(m, {0, 0}, {9, 0}, iters(2000, 3));
  ASSERT_TRUE(r.best);
  EXPECT_EQ(r.best->cost.value, 9);
}

TEST(GRrtStar, WalledGoal) {
  GridMap m(6, 6, {{3, 3}, {3, 4}, {3, 5}, {4, 3}, {5, 3}});
  const PlannerResult r = g_rrt_star(m, {0, 0}, {5, 5}, iters(1000, 3));
  EXPECT_FALSE(r.best);
  EXPECT_EQ(r.trace.records.size(), 1000u);
}

TEST(Informed, ZeroWindowStaysOnPaths) {
  GridMap m(12, 12, {{5, 5}, {6, 6}});
  std::vector<std::vector<Cell>> paths = {{{0, 0}, {1, 0}, {2, 0}, {3, 0}},
                                          {{3, 0}, {3, 1}, {3, 2}},
                                          {{9, 9}}};
  Rng rng(4);
  for (int i = 0; i < 5000; ++i) {
    const JointState s = biased_sample(m, paths, 0, rng);
    ASSERT_TRUE(is_valid_state(m, s));
    for (std::size_t a = 0; a < 3; ++a) {
      // Agent 1 can only be displaced when agent 0 already holds (3,0).
      const bool on_path = std::find(paths[a].begin(), paths[a].end(), s[a]) != paths[a].end();
      if (!(a == 1 && s[0] == Cell{3, 0})) ASSERT_TRUE(on_path);
    }
  }
}

TEST(Informed, WindowBounds) {
  GridMap m(20, 20);
  std::vector<std::vector<Cell>> paths = {{{10, 10}}, {{0, 0}}};
  Rng rng(6);
  std::set<Cell> seen;
  for (int i = 0; i < 5000; ++i) {
    const JointState s = biased_sample(m, paths, 2, rng);
    ASSERT_LE(std::abs(s[0].x - 10), 2);
    ASSERT_LE(std::abs(s[0].y - 10), 2);
    ASSERT_LE(s[1].x, 2);
    ASSERT_LE(s[1].y, 2);
    seen.insert(s[0]);
  }
  EXPECT_EQ(seen.size(), 25u);
}

TEST(Informed, NoPathBiasMatchesBasePhaseTwo) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const ProblemInstance inst = generate_instance(12, 12, 3, 0.1, seed);
    PlannerConfig cfg = iters(1000, seed);
    cfg.p_path = 0.0;
    const PlannerResult inf = informed_variant(inst, cfg, PlannerKind::MaRrtStar);
    PlannerConfig base_cfg = cfg;
    base_cfg.iteration_budget = 1000 - inf.trace.prelude_iterations;
    const PlannerResult base = ma_rrt_star(inst, base_cfg);
    RunTrace stripped = inf.trace;
    stripped.prelude_iterations = 0;
    EXPECT_TRUE(same_progress(stripped, base.trace)) << "seed " << seed;
  }
}

TEST(Informed, BudgetAccounting) {
  const ProblemInstance inst = generate_instance(15, 15, 3, 0.1, 21);
  PlannerConfig cfg = iters(2000, 2);
  cfg.capacity = 200;
  const PlannerResult r = run_planner(PlannerKind::IsMaRrtStarFn, inst, cfg);
  EXPECT_GT(r.trace.prelude_iterations, 0);
  EXPECT_LE(r.trace.prelude_iterations, 400);
  EXPECT_EQ(static_cast<std::int64_t>(r.trace.records.size()) + r.trace.prelude_iterations, 2000);
  for (const TraceRecord &rec : r.trace.records) ASSERT_LE(rec.node_count, 200u);
  expect_monotone(r.trace);
  if (r.best) EXPECT_EQ(validate_plan(inst, r.best->path), "");
}

TEST(Informed, UnreachableAgentFallsBack) {
  // Agent 1 is sealed off, so phase 1 never finds its path.
  const auto inst = make_instance(6, 6, {{4, 5}, {4, 4}, {5, 4}}, {{0, 0}, {1, 1}}, {{3, 0}, {5, 5}});
  const PlannerResult r = informed_variant(inst, iters(500, 1), PlannerKind::MaRrtStar);
  EXPECT_FALSE(r.best);
  EXPECT_EQ(static_cast<std::int64_t>(r.trace.records.size()) + r.trace.prelude_iterations, 500);
}

TEST(Planners, RandomRunsAreValidAndMonotone) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const int n = 1 + static_cast<int>(seed % 4);
    const ProblemInstance inst = generate_instance(8 + static_cast<int>(seed), 8, n, 0.1, seed);
    for (PlannerKind k : kAllPlanners) {
      PlannerConfig cfg = iters(600, seed);
      if (is_fixed_node(k)) cfg.capacity = 50;
      const PlannerResult r = run_planner(k, inst, cfg);
      expect_monotone(r.trace);
      if (is_fixed_node(k))
        for (const TraceRecord &rec : r.trace.records) ASSERT_LE(rec.node_count, 50u);
      if (r.best) {
        EXPECT_EQ(validate_plan(inst, r.best->path), "") << planner_name(k) << " seed " << seed;
        EXPECT_FALSE(check_solution(inst, r.best->path).has_value());
      }
    }
  }
}

TEST(Planners, Names) {
  for (PlannerKind k : kAllPlanners) {
    EXPECT_EQ(parse_planner(planner_name(k)), k);
    EXPECT_EQ(parse_planner(planner_slug(k)), k);
  }
  EXPECT_EQ(parse_planner("ISMA-RRT*FN"), PlannerKind::IsMaRrtStarFn);
  EXPECT_FALSE(parse_planner("rrt"));
}

TEST(Planners, ConfigValidation) {
  PlannerConfig cfg = iters(10);
  EXPECT_NO_THROW(cfg.validate());
  cfg.p_goal = 1.5;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = iters(10);
  cfg.p_goal = 0.6;
  cfg.p_path = 0.6;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = PlannerConfig{};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = iters(-1);
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Planners, CheckSolution) {
  const auto inst = make_instance(3, 1, {}, {{0, 0}}, {{2, 0}});
  EXPECT_FALSE(check_solution(inst, line_path({{0, 0}, {1, 0}, {2, 0}})));
  EXPECT_TRUE(check_solution(inst, line_path({{0, 0}, {2, 0}})));
  EXPECT_TRUE(check_solution(inst, line_path({{0, 0}, {1, 0}})));
  EXPECT_TRUE(check_solution(inst, JointPath{}));
}

TEST(Planners, TraceCsvRoundTrip) {
  const ProblemInstance inst = generate_instance(10, 10, 2, 0.1, 3);
  const PlannerResult r = ma_rrt_star(inst, iters(500, 3));
  const std::string text = csv(r.trace);
  EXPECT_EQ(text.substr(0, text.find('\n')), "iteration,node_count,best_cost,elapsed_ms");
  std::istringstream in(text);
  const RunTrace back = read_trace_csv(in);
  EXPECT_EQ(csv(back), text);
  ASSERT_EQ(back.events.size(), r.trace.events.size());
  for (std::size_t i = 0; i < back.events.size(); ++i) {
    EXPECT_EQ(back.events[i].iteration, r.trace.events[i].iteration);
    EXPECT_EQ(back.events[i].cost, r.trace.events[i].cost);
  }
}

TEST(Planners, SolutionRoundTrip) {
  JointPath p;
  p.steps = {JointState{{0, 0}, {3, 1}}, JointState{{0, 1}, {3, 2}}};
  std::ostringstream out;
  write_solution(out, p);
  EXPECT_EQ(out.str(), "0:0,3:1\n0:1,3:2\n");
  std::istringstream in(out.str());
  EXPECT_EQ(read_solution(in), p);
}

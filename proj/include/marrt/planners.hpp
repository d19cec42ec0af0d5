#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "marrt/grid_world.hpp"
#include "marrt/joint_space.hpp"
#include "marrt/steering.hpp"
#include "marrt/tree.hpp"

namespace marrt {

enum class PlannerKind { MaRrtStar, MaRrtStarFn, IsMaRrtStar, IsMaRrtStarFn };

inline constexpr PlannerKind kAllPlanners[] = {PlannerKind::MaRrtStar, PlannerKind::MaRrtStarFn,
                                               PlannerKind::IsMaRrtStar,
                                               PlannerKind::IsMaRrtStarFn};

/// "MA-RRT*", "MA-RRT*FN", "isMA-RRT*", "isMA-RRT*FN".
std::string_view planner_name(PlannerKind kind);
/// Filename-safe form: ma_rrt_star, ma_rrt_star_fn, is_ma_rrt_star, is_ma_rrt_star_fn.
std::string_view planner_slug(PlannerKind kind);
/// Accepts either spelling, case-insensitively.
std::optional<PlannerKind> parse_planner(std::string_view text);
inline bool is_fixed_node(PlannerKind k) {
  return k == PlannerKind::MaRrtStarFn || k == PlannerKind::IsMaRrtStarFn;
}
inline bool is_informed(PlannerKind k) {
  return k == PlannerKind::IsMaRrtStar || k == PlannerKind::IsMaRrtStarFn;
}

struct PlannerConfig {
  double p_goal = 0.1;
  /// Edge budget for steering; defaults to default_c_max(map, n).
  std::optional<Cost> c_max;
  /// Node cap M for the fixed-node planners. Ignored by MA-RRT*.
  std::optional<std::size_t> capacity;
  double k_rrg = 6.0;
  /// Half-width of the offset window around single-agent paths.
  int bias_window = 2;
  double p_path = 0.5;
  std::optional<std::int64_t> iteration_budget;
  std::optional<std::chrono::milliseconds> time_budget;
  std::uint64_t seed = 0;
  /// Share of the budget spent on per-agent G-RRT* by the informed variants.
  double phase1_fraction = 0.2;

  /// Throws std::invalid_argument on a violated invariant.
  void validate() const;
};

struct Solution {
  JointPath path;
  Cost cost;
  std::int64_t found_at_iteration = 0;
  double found_at_ms = 0.0;
};

struct TraceRecord {
  std::int64_t iteration = 0;
  std::size_t node_count = 0;
  std::optional<Cost> best_cost;
  double elapsed_ms = 0.0;
};

struct SolutionEvent {
  std::int64_t iteration = 0;
  Cost cost;
  double elapsed_ms = 0.0;
};

/// Iterations count joint-space EXTEND steps. The informed variants spend part
/// of their budget on single-agent runs first; that spend is reported in
/// `prelude_iterations` and is not part of `records`.
struct RunTrace {
  std::vector<TraceRecord> records;
  std::vector<SolutionEvent> events;  ///< first solution, then each improvement
  std::int64_t prelude_iterations = 0;
};

/// Compares everything except wall-clock fields.
bool same_progress(const RunTrace &a, const RunTrace &b);

struct PlannerResult {
  std::optional<Solution> best;
  RunTrace trace;
};

enum class ExtendStatus { Advanced, Duplicate, Trapped };

struct ExtendOutcome {
  ExtendStatus status = ExtendStatus::Trapped;
  std::optional<NodeId> new_node;
  /// A single-child parent was removed during the rewiring pass.
  bool removed_during_rewire = false;

  struct Rewired {
    NodeId child;
    NodeId old_parent;
    JointPath old_edge;
  };
  /// Rewires performed, in order; lets a caller take x_new back out.
  std::vector<Rewired> rewired;
};

/// One tree-growth step toward `x_rand`: steer from the nearest node, choose
/// the cheapest parent among the near set, then rewire near nodes through the
/// new node. When the tree is over its capacity, a rewired node's parent that
/// is left childless is removed (once per call).
ExtendOutcome extend(Tree &tree, const JointState &x_rand, const GridMap &map, Cost c_max,
                     double k_rrg);

/// Undoes the rewires recorded in `outcome` and removes its new node.
void retract(Tree &tree, const ExtendOutcome &outcome);

PlannerResult ma_rrt_star(const ProblemInstance &instance, const PlannerConfig &cfg);
/// Requires cfg.capacity >= 2.
PlannerResult ma_rrt_star_fn(const ProblemInstance &instance, const PlannerConfig &cfg);
/// Single-agent MA-RRT*.
PlannerResult g_rrt_star(const GridMap &map, Cell start, Cell goal, const PlannerConfig &cfg);
/// Per-agent G-RRT* first, then `base` with samples biased toward the
/// single-agent paths. Falls back to unbiased `base` if any agent has no path.
PlannerResult informed_variant(const ProblemInstance &instance, const PlannerConfig &cfg,
                               PlannerKind base);

/// One sample per agent: a random waypoint of `paths[i]` shifted by an offset
/// in [-w, w]^2 and clamped to the map. Picks on obstacles or on an earlier
/// agent's pick are redrawn; after 64 redraws the agent gets a uniform free cell.
JointState biased_sample(const GridMap &map, const std::vector<std::vector<Cell>> &paths, int w,
                         Rng &rng);

PlannerResult run_planner(PlannerKind kind, const ProblemInstance &instance,
                          const PlannerConfig &cfg);

/// Nullopt if `path` is a valid solution of `instance`, else a description.
std::optional<std::string> check_solution(const ProblemInstance &instance, const JointPath &path);

/// `iteration,node_count,best_cost,elapsed_ms`. elapsed_ms is left empty unless
/// `with_timing`, so iteration-budgeted traces are reproducible byte for byte.
void write_trace_csv(std::ostream &out, const RunTrace &trace, bool with_timing);
/// Reads the records back; events are reconstructed from best_cost changes.
RunTrace read_trace_csv(std::istream &in);

/// One joint state per line, agents comma-separated as `x:y`.
void write_solution(std::ostream &out, const JointPath &path);
JointPath read_solution(std::istream &in);

} // namespace marrt

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "marrt/oracle.hpp"
#include "marrt/planners.hpp"

namespace marrt::bench {

struct Suite {
  std::vector<int> grid_sizes{10, 30, 50};
  std::vector<int> agent_counts{1, 2, 3, 4, 5};
  int instances_per_cell = 20;
  double obstacle_ratio = 0.1;
  std::optional<std::chrono::milliseconds> time_budget = std::chrono::milliseconds(5000);
  std::optional<std::int64_t> iteration_budget;
  std::vector<PlannerKind> planners{std::begin(kAllPlanners), std::end(kAllPlanners)};
  /// Node cap per fixed-node planner.
  std::map<PlannerKind, std::size_t> capacities{{PlannerKind::MaRrtStarFn, 200},
                                                {PlannerKind::IsMaRrtStarFn, 200}};
  std::uint64_t base_seed = 1;
  /// Template for p_goal, p_path, bias window, k_rrg and phase split.
  PlannerConfig planner_defaults;
  bool run_oracle = true;
  OracleLimits oracle_limits;
  int workers = 1;

  /// Throws std::invalid_argument on a violated invariant.
  void validate() const;
};

/// The full 5 sizes x 10 agent counts x 120 instances protocol.
Suite full_suite();

/// Line-oriented `key value...` config, `#` comments. Keys: grid_sizes,
/// agent_counts, instances_per_cell, obstacle_ratio, time_budget_ms,
/// iteration_budget (either may be `none`), planners, capacity <planner> <M>,
/// base_seed, p_goal, p_path, bias_window, k_rrg, phase1_fraction, c_max,
/// oracle on|off, oracle_max_cells, oracle_max_agents, oracle_max_expansions,
/// workers, preset full.
Suite parse_suite(std::istream &in);
Suite load_suite(const std::filesystem::path &path);
std::string format_suite(const Suite &suite);

struct GeneratedInstance {
  std::string id;  ///< e.g. g10_a3_i007
  int grid_size = 0;
  int agents = 0;
  ProblemInstance instance;
};

/// Instance k of every (size, agents) cell uses seed base_seed + k.
std::vector<GeneratedInstance> generate_instances(const Suite &suite);

/// Planner settings for one run; the rng stream depends only on the instance.
PlannerConfig config_for(const Suite &suite, PlannerKind planner, const GeneratedInstance &inst);

struct CellResult {
  std::string instance_id;
  int grid_size = 0;
  int agents = 0;
  std::uint64_t seed = 0;
  PlannerKind planner = PlannerKind::MaRrtStar;
  std::string status = "ok";  ///< "ok" or "error: ..."
  std::optional<std::int64_t> first_iteration;
  std::optional<double> first_solution_ms;
  std::optional<Cost> first_cost;
  std::optional<Cost> best_cost;
  std::size_t final_nodes = 0;
  std::size_t max_nodes = 0;
  std::optional<Cost> optimal_cost;  ///< from the oracle
  /// "oracle", "best_known" or "none"; filled by assign_suboptimality.
  std::string denominator = "none";
  std::optional<Cost> denominator_cost;
  std::optional<double> suboptimality_first;
  std::optional<double> suboptimality_best;
  std::optional<RunTrace> trace;  ///< in memory only
  bool solved() const { return first_cost.has_value(); }
};

/// Builds the raw result of one finished run (no suboptimality yet).
CellResult make_result(const GeneratedInstance &inst, PlannerKind planner,
                       const PlannerResult &run);

/// Fills denominator fields: the oracle optimum where known, otherwise the
/// best cost any planner reached on the instance. Throws
/// NegativeSuboptimality if a planner beat the oracle.
void assign_suboptimality(std::vector<CellResult> &results);

struct RunOptions {
  bool keep_traces = true;
  /// Called after each finished run, serialized.
  std::function<void(const CellResult &)> on_result;
};

/// Runs every planner on every instance, persisting to `out_dir` as it goes:
/// instances/<id>.txt, traces/<id>__<planner>.csv, runs.csv, oracle.csv.
/// Runs already listed in runs.csv are loaded instead of re-run.
std::vector<CellResult> run_suite(const Suite &suite, const std::filesystem::path &out_dir,
                                  const RunOptions &options = {});

struct PerfPoint {
  std::size_t rank = 0;
  double first_solution_ms = 0.0;
};

/// Solved runs of `planner` sorted by first-solution time (stable).
std::vector<PerfPoint> performance_curve(const std::vector<CellResult> &results,
                                         PlannerKind planner);
/// Solved / total runs of `planner`; 0 when there are none.
double solve_rate(const std::vector<CellResult> &results, PlannerKind planner);

struct ConvergencePoint {
  std::int64_t iteration = 0;
  std::optional<double> avg_min_cost;
  double avg_node_count = 0.0;
};

/// Average min-cost-so-far (instances not yet solved at t contribute their
/// first-solution cost; never-solved instances are left out) and average node
/// count per iteration. Uses CellResult::trace.
std::vector<ConvergencePoint> convergence_curves(const std::vector<CellResult> &results,
                                                 PlannerKind planner);

std::optional<double> median(std::vector<double> values);

std::string summary_text(const std::vector<CellResult> &results);

void write_results_csv(std::ostream &out, const std::vector<CellResult> &results);
std::vector<CellResult> read_results_csv(std::istream &in);

/// results.csv, perf_curve_<p>.csv, convergence_<p>.csv, summary.txt and
/// gnuplot .dat files (plot_perf_<p>, plot_suboptimality, plot_cost_<p>,
/// plot_nodes_<p>) for every planner present in `results`.
void emit_report(const std::vector<CellResult> &results, const std::filesystem::path &out_dir);

/// Reloads a suite directory written by run_suite (runs.csv, oracle.csv and
/// traces) and recomputes denominators.
std::vector<CellResult> load_suite_results(const std::filesystem::path &dir);

} // namespace marrt::bench

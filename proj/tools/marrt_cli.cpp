// marrt: instance generation, single runs, exact oracle and benchmark suites.
//
// Exit codes: 0 success, 1 usage or input error, 2 infeasible / no solution /
// limit reached, 3 internal invariant violation.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "marrt/bench.hpp"
#include "marrt/oracle.hpp"
#include "marrt/planners.hpp"

namespace fs = std::filesystem;
using namespace marrt;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kNoSolution = 2;
constexpr int kInvariant = 3;

struct InvariantViolation : std::logic_error {
  using std::logic_error::logic_error;
};

struct GenArgs {
  int width = 10;
  int height = 0;
  int agents = 1;
  double ratio = 0.1;
  std::uint64_t seed = 1;
  int count = 1;
  std::string out;
};

int cmd_gen(const GenArgs &a) {
  const int height = a.height > 0 ? a.height : a.width;
  if (a.count == 1 && fs::path(a.out).has_extension()) {
    save_instance(a.out, generate_instance(a.width, height, a.agents, a.ratio, a.seed));
    std::cout << a.out << '\n';
    return kOk;
  }
  fs::create_directories(a.out);
  for (int i = 0; i < a.count; ++i) {
    const std::uint64_t seed = a.seed + static_cast<std::uint64_t>(i);
    const fs::path p = fs::path(a.out) / ("instance_" + std::to_string(seed) + ".txt");
    save_instance(p, generate_instance(a.width, height, a.agents, a.ratio, seed));
    std::cout << p.string() << '\n';
  }
  return kOk;
}

struct SolveArgs {
  std::string instance;
  std::string planner = "ma_rrt_star";
  std::uint64_t seed = 1;
  std::int64_t iters = 0;
  std::int64_t time_ms = 0;
  std::size_t capacity = 0;
  double p_goal = 0.1;
  double p_path = 0.5;
  int bias_window = 2;
  std::int64_t c_max = 0;
  double k_rrg = 6.0;
  std::string trace;
  std::string solution;
  std::string tree_dump;
  bool timing = false;
};

int cmd_solve(const SolveArgs &a) {
  const auto kind = parse_planner(a.planner);
  if (!kind) {
    std::cerr << "unknown planner '" << a.planner << "'\n";
    return kUsage;
  }
  const ProblemInstance inst = load_instance(a.instance);
  PlannerConfig cfg;
  cfg.seed = a.seed;
  cfg.p_goal = a.p_goal;
  cfg.p_path = a.p_path;
  cfg.bias_window = a.bias_window;
  cfg.k_rrg = a.k_rrg;
  if (a.iters > 0) cfg.iteration_budget = a.iters;
  if (a.time_ms > 0) cfg.time_budget = std::chrono::milliseconds(a.time_ms);
  if (!cfg.iteration_budget && !cfg.time_budget) cfg.iteration_budget = 2000;
  if (a.capacity > 0) cfg.capacity = a.capacity;
  else if (is_fixed_node(*kind)) cfg.capacity = 200;
  if (a.c_max > 0) cfg.c_max = Cost{a.c_max};
  cfg.validate();

  const PlannerResult run = run_planner(*kind, inst, cfg);

  if (!a.trace.empty()) {
    std::ofstream f(a.trace, std::ios::binary);
    write_trace_csv(f, run.trace, a.timing || cfg.time_budget.has_value());
  }
  std::cout << "planner " << planner_name(*kind) << '\n';
  std::cout << "iterations " << run.trace.records.size() << '\n';
  std::cout << "final_nodes " << (run.trace.records.empty() ? 0 : run.trace.records.back().node_count)
            << '\n';
  if (!run.best) {
    std::cout << "solved no\n";
    return kNoSolution;
  }
  if (auto err = check_solution(inst, run.best->path)) throw InvariantViolation(*err);
  const SolutionEvent &first = run.trace.events.front();
  std::cout << "solved yes\n";
  std::cout << "first_iteration " << first.iteration << '\n';
  std::cout << "first_cost " << first.cost.value << '\n';
  std::cout << "best_cost " << run.best->cost.value << '\n';
  std::cout << "best_iteration " << run.best->found_at_iteration << '\n';
  if (!a.solution.empty()) {
    std::ofstream f(a.solution, std::ios::binary);
    write_solution(f, run.best->path);
  }
  return kOk;
}

struct OracleArgs {
  std::string instance;
  OracleLimits limits;
  std::string solution;
};

int cmd_oracle(const OracleArgs &a) {
  const ProblemInstance inst = load_instance(a.instance);
  const OracleResult res = optimal_cost(inst, a.limits);
  std::cout << "expansions " << res.expansions << '\n';
  switch (res.status) {
  case OracleStatus::Infeasible:
    std::cout << "status infeasible\n";
    return kNoSolution;
  case OracleStatus::LimitExceeded:
    std::cout << "status limit\n";
    return kNoSolution;
  case OracleStatus::Optimal:
    break;
  }
  if (auto err = check_solution(inst, *res.path)) throw InvariantViolation(*err);
  std::cout << "status optimal\ncost " << res.cost.value << '\n';
  if (!a.solution.empty()) {
    std::ofstream f(a.solution, std::ios::binary);
    write_solution(f, *res.path);
  }
  return kOk;
}

struct BenchArgs {
  std::string config;
  std::string out = "bench_out";
  int workers = 0;
  bool full = false;
};

int cmd_bench(const BenchArgs &a) {
  bench::Suite suite = a.config.empty() ? bench::Suite{} : bench::load_suite(a.config);
  if (a.full) {
    const bench::Suite full = bench::full_suite();
    suite.grid_sizes = full.grid_sizes;
    suite.agent_counts = full.agent_counts;
    suite.instances_per_cell = full.instances_per_cell;
  }
  if (a.workers > 0) suite.workers = a.workers;
  bench::RunOptions opts;
  std::size_t finished = 0;
  opts.on_result = [&](const bench::CellResult &r) {
    ++finished;
    std::cerr << '[' << finished << "] " << r.instance_id << ' ' << planner_name(r.planner) << ' '
              << (r.status != "ok" ? r.status
                                   : r.best_cost ? "cost " + std::to_string(r.best_cost->value)
                                                 : std::string("unsolved"))
              << '\n';
  };
  const auto results = bench::run_suite(suite, a.out, opts);
  bench::emit_report(results, a.out);
  std::cout << bench::summary_text(results);
  return kOk;
}

int cmd_report(const std::string &in, const std::string &out) {
  const auto results = bench::load_suite_results(in);
  bench::emit_report(results, out.empty() ? in : out);
  std::cout << bench::summary_text(results);
  return kOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Multi-agent RRT* planners with fixed node memory"};
  app.require_subcommand(1);

  GenArgs gen;
  auto *g = app.add_subcommand("gen", "Generate random instances");
  g->add_option("--width,--size", gen.width, "Grid width (and height unless --height)")->check(CLI::PositiveNumber);
  g->add_option("--height", gen.height, "Grid height");
  g->add_option("--agents", gen.agents, "Number of agents")->check(CLI::PositiveNumber);
  g->add_option("--ratio", gen.ratio, "Obstacle ratio")->check(CLI::Range(0.0, 1.0));
  g->add_option("--seed", gen.seed, "Seed of the first instance");
  g->add_option("--count", gen.count, "Number of instances (seeds seed..seed+count-1)")->check(CLI::PositiveNumber);
  g->add_option("--out", gen.out, "Output file (count 1) or directory")->required();

  SolveArgs solve;
  auto *s = app.add_subcommand("solve", "Run one planner on one instance");
  s->add_option("instance", solve.instance, "Instance file")->required()->check(CLI::ExistingFile);
  s->add_option("--planner", solve.planner, "ma_rrt_star | ma_rrt_star_fn | is_ma_rrt_star | is_ma_rrt_star_fn");
  s->add_option("--seed", solve.seed, "Planner seed");
  s->add_option("--iters", solve.iters, "Iteration budget");
  s->add_option("--time-ms", solve.time_ms, "Wall-clock budget in ms");
  s->add_option("--capacity", solve.capacity, "Node cap M (fixed-node planners, default 200)");
  s->add_option("--p-goal", solve.p_goal, "Goal sampling probability");
  s->add_option("--p-path", solve.p_path, "Path-biased sampling probability (informed planners)");
  s->add_option("--bias-window", solve.bias_window, "Offset window around single-agent paths");
  s->add_option("--c-max", solve.c_max, "Steering cost budget per edge");
  s->add_option("--k-rrg", solve.k_rrg, "Near-set constant");
  s->add_option("--trace", solve.trace, "Write the per-iteration trace CSV here");
  s->add_option("--solution", solve.solution, "Write the best solution here");
  s->add_flag("--timing", solve.timing, "Fill elapsed_ms in the trace even without a time budget");

  OracleArgs oracle;
  auto *o = app.add_subcommand("oracle", "Exact optimal cost for small instances");
  o->add_option("instance", oracle.instance, "Instance file")->required()->check(CLI::ExistingFile);
  o->add_option("--max-cells", oracle.limits.max_cells, "Largest map (cells) to attempt");
  o->add_option("--max-agents", oracle.limits.max_agents, "Most agents to attempt");
  o->add_option("--max-expansions", oracle.limits.max_expansions, "Expansion limit");
  o->add_option("--solution", oracle.solution, "Write an optimal solution here");

  BenchArgs bench_args;
  auto *b = app.add_subcommand("bench", "Run a benchmark suite and write the report");
  b->add_option("config", bench_args.config, "Suite config file (defaults to the desk-scale suite)");
  b->add_option("--out", bench_args.out, "Output directory");
  b->add_option("--workers", bench_args.workers, "Worker threads");
  b->add_flag("--full", bench_args.full, "Use the full 6000-instance grid");

  std::string report_in, report_out;
  auto *r = app.add_subcommand("report", "Rebuild the report from a suite directory");
  r->add_option("--in", report_in, "Suite output directory")->required()->check(CLI::ExistingDirectory);
  r->add_option("--out", report_out, "Report directory (defaults to --in)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*g) return cmd_gen(gen);
    if (*s) return cmd_solve(solve);
    if (*o) return cmd_oracle(oracle);
    if (*b) return cmd_bench(bench_args);
    if (*r) return cmd_report(report_in, report_out);
  } catch (const InvariantViolation &e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return kInvariant;
  } catch (const NegativeSuboptimality &e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return kInvariant;
  } catch (const InfeasibleInstanceParameters &e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kNoSolution;
  } catch (const std::invalid_argument &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError &e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::logic_error &e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return kInvariant;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

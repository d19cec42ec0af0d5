#include "marrt/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "line_reader.hpp"

namespace marrt::bench {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Suite configuration

void Suite::validate() const {
  auto bad = [](const std::string &what) { throw std::invalid_argument(what); };
  if (grid_sizes.empty() || agent_counts.empty() || planners.empty())
    bad("grid_sizes, agent_counts and planners must be nonempty");
  for (int s : grid_sizes)
    if (s <= 0) bad("grid sizes must be positive");
  for (int a : agent_counts)
    if (a <= 0) bad("agent counts must be positive");
  if (instances_per_cell <= 0) bad("instances_per_cell must be positive");
  if (!time_budget && !iteration_budget) bad("suite needs a time or iteration budget");
  if (time_budget && time_budget->count() <= 0) bad("time budget must be positive");
  if (iteration_budget && *iteration_budget <= 0) bad("iteration budget must be positive");
  if (workers <= 0) bad("workers must be positive");
  for (PlannerKind p : planners)
    if (is_fixed_node(p) && (!capacities.contains(p) || capacities.at(p) < 2))
      bad(std::string(planner_name(p)) + " needs a capacity of at least 2");
  PlannerConfig probe = planner_defaults;
  probe.iteration_budget = iteration_budget;
  probe.time_budget = time_budget;
  probe.validate();
}

Suite full_suite() {
  Suite s;
  s.grid_sizes = {10, 30, 50, 70, 90};
  s.agent_counts = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  s.instances_per_cell = 120;
  return s;
}

Suite parse_suite(std::istream &in) {
  using namespace detail;
  Suite s;
  for (const Line &line : tokenize_lines(in)) {
    const std::string &key = line.tokens[0];
    auto ints = [&] {
      if (line.tokens.size() < 2) throw ParseError(line.number, "'" + key + "' needs values");
      std::vector<int> v;
      for (std::size_t i = 1; i < line.tokens.size(); ++i)
        v.push_back(static_cast<int>(parse_integer(line, line.tokens[i])));
      return v;
    };
    auto single = [&]() -> const std::string & {
      expect_arity(line, 2);
      return line.tokens[1];
    };
    auto planner = [&](const std::string &tok) {
      auto p = parse_planner(tok);
      if (!p) throw ParseError(line.number, "unknown planner '" + tok + "'");
      return *p;
    };

    if (key == "preset") {
      if (single() != "full") throw ParseError(line.number, "unknown preset '" + line.tokens[1] + "'");
      const Suite full = full_suite();
      s.grid_sizes = full.grid_sizes;
      s.agent_counts = full.agent_counts;
      s.instances_per_cell = full.instances_per_cell;
    } else if (key == "grid_sizes") {
      s.grid_sizes = ints();
    } else if (key == "agent_counts") {
      s.agent_counts = ints();
    } else if (key == "instances_per_cell") {
      s.instances_per_cell = static_cast<int>(parse_integer(line, single()));
    } else if (key == "obstacle_ratio") {
      s.obstacle_ratio = parse_real(line, single());
    } else if (key == "time_budget_ms") {
      const auto &v = single();
      if (v == "none") s.time_budget.reset();
      else s.time_budget = std::chrono::milliseconds(parse_integer(line, v));
    } else if (key == "iteration_budget") {
      const auto &v = single();
      if (v == "none") s.iteration_budget.reset();
      else s.iteration_budget = parse_integer(line, v);
    } else if (key == "planners") {
      if (line.tokens.size() < 2) throw ParseError(line.number, "'planners' needs values");
      s.planners.clear();
      for (std::size_t i = 1; i < line.tokens.size(); ++i) s.planners.push_back(planner(line.tokens[i]));
    } else if (key == "capacity") {
      expect_arity(line, 3);
      s.capacities[planner(line.tokens[1])] =
          static_cast<std::size_t>(parse_unsigned(line, line.tokens[2]));
    } else if (key == "base_seed") {
      s.base_seed = parse_unsigned(line, single());
    } else if (key == "p_goal") {
      s.planner_defaults.p_goal = parse_real(line, single());
    } else if (key == "p_path") {
      s.planner_defaults.p_path = parse_real(line, single());
    } else if (key == "bias_window") {
      s.planner_defaults.bias_window = static_cast<int>(parse_integer(line, single()));
    } else if (key == "k_rrg") {
      s.planner_defaults.k_rrg = parse_real(line, single());
    } else if (key == "phase1_fraction") {
      s.planner_defaults.phase1_fraction = parse_real(line, single());
    } else if (key == "c_max") {
      s.planner_defaults.c_max = Cost{parse_integer(line, single())};
    } else if (key == "oracle") {
      const auto &v = single();
      if (v != "on" && v != "off") throw ParseError(line.number, "oracle expects on|off");
      s.run_oracle = v == "on";
    } else if (key == "oracle_max_cells") {
      s.oracle_limits.max_cells = static_cast<int>(parse_integer(line, single()));
    } else if (key == "oracle_max_agents") {
      s.oracle_limits.max_agents = static_cast<int>(parse_integer(line, single()));
    } else if (key == "oracle_max_expansions") {
      s.oracle_limits.max_expansions = parse_integer(line, single());
    } else if (key == "workers") {
      s.workers = static_cast<int>(parse_integer(line, single()));
    } else {
      throw ParseError(line.number, "unknown key '" + key + "'");
    }
  }
  try {
    s.validate();
  } catch (const std::invalid_argument &e) {
    throw ParseError(0, e.what());
  }
  return s;
}

Suite load_suite(const fs::path &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_suite(in);
}

std::string format_suite(const Suite &s) {
  std::ostringstream out;
  auto list = [&](const char *key, const std::vector<int> &v) {
    out << key;
    for (int x : v) out << ' ' << x;
    out << '\n';
  };
  list("grid_sizes", s.grid_sizes);
  list("agent_counts", s.agent_counts);
  out << "instances_per_cell " << s.instances_per_cell << '\n';
  out << "obstacle_ratio " << s.obstacle_ratio << '\n';
  out << "time_budget_ms " << (s.time_budget ? std::to_string(s.time_budget->count()) : "none") << '\n';
  out << "iteration_budget "
      << (s.iteration_budget ? std::to_string(*s.iteration_budget) : "none") << '\n';
  out << "planners";
  for (PlannerKind p : s.planners) out << ' ' << planner_slug(p);
  out << '\n';
  for (auto [p, m] : s.capacities) out << "capacity " << planner_slug(p) << ' ' << m << '\n';
  out << "base_seed " << s.base_seed << '\n';
  out << "p_goal " << s.planner_defaults.p_goal << '\n';
  out << "p_path " << s.planner_defaults.p_path << '\n';
  out << "bias_window " << s.planner_defaults.bias_window << '\n';
  out << "k_rrg " << s.planner_defaults.k_rrg << '\n';
  out << "phase1_fraction " << s.planner_defaults.phase1_fraction << '\n';
  if (s.planner_defaults.c_max) out << "c_max " << s.planner_defaults.c_max->value << '\n';
  out << "oracle " << (s.run_oracle ? "on" : "off") << '\n';
  out << "oracle_max_cells " << s.oracle_limits.max_cells << '\n';
  out << "oracle_max_agents " << s.oracle_limits.max_agents << '\n';
  out << "oracle_max_expansions " << s.oracle_limits.max_expansions << '\n';
  out << "workers " << s.workers << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Instances and runs

std::vector<GeneratedInstance> generate_instances(const Suite &suite) {
  std::vector<GeneratedInstance> out;
  for (int size : suite.grid_sizes)
    for (int agents : suite.agent_counts)
      for (int k = 0; k < suite.instances_per_cell; ++k) {
        std::ostringstream id;
        id << 'g' << size << "_a" << agents << "_i" << std::setw(3) << std::setfill('0') << k;
        out.push_back({id.str(), size, agents,
                       generate_instance(size, size, agents, suite.obstacle_ratio,
                                         suite.base_seed + static_cast<std::uint64_t>(k))});
      }
  return out;
}

PlannerConfig config_for(const Suite &suite, PlannerKind planner, const GeneratedInstance &inst) {
  PlannerConfig cfg = suite.planner_defaults;
  cfg.iteration_budget = suite.iteration_budget;
  cfg.time_budget = suite.time_budget;
  if (auto it = suite.capacities.find(planner); it != suite.capacities.end() && is_fixed_node(planner))
    cfg.capacity = it->second;
  // splitmix64 over (seed, size, agents): one stream per instance, shared by
  // all planners.
  std::uint64_t z = inst.instance.seed ^ (static_cast<std::uint64_t>(inst.grid_size) << 32) ^
                    static_cast<std::uint64_t>(inst.agents) * 0x9e3779b97f4a7c15ull;
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  cfg.seed = z ^ (z >> 31);
  return cfg;
}

namespace {

double round_to(double v, double scale) { return std::round(v * scale) / scale; }

} // namespace

CellResult make_result(const GeneratedInstance &inst, PlannerKind planner, const PlannerResult &run) {
  CellResult r;
  r.instance_id = inst.id;
  r.grid_size = inst.grid_size;
  r.agents = inst.agents;
  r.seed = inst.instance.seed;
  r.planner = planner;
  if (!run.trace.events.empty()) {
    const SolutionEvent &first = run.trace.events.front();
    r.first_iteration = first.iteration;
    r.first_solution_ms = round_to(first.elapsed_ms, 1e3);
    r.first_cost = first.cost;
  }
  if (run.best) r.best_cost = run.best->cost;
  if (!run.trace.records.empty()) r.final_nodes = run.trace.records.back().node_count;
  for (const TraceRecord &rec : run.trace.records) r.max_nodes = std::max(r.max_nodes, rec.node_count);
  r.trace = run.trace;
  return r;
}

void assign_suboptimality(std::vector<CellResult> &results) {
  std::map<std::string, Cost> best_known;
  for (const CellResult &r : results)
    if (r.best_cost) {
      auto [it, fresh] = best_known.try_emplace(r.instance_id, *r.best_cost);
      if (!fresh) it->second = std::min(it->second, *r.best_cost);
    }
  for (CellResult &r : results) {
    r.denominator = "none";
    r.denominator_cost.reset();
    r.suboptimality_first.reset();
    r.suboptimality_best.reset();
    if (r.optimal_cost) {
      r.denominator = "oracle";
      r.denominator_cost = r.optimal_cost;
    } else if (auto it = best_known.find(r.instance_id); it != best_known.end()) {
      r.denominator = "best_known";
      r.denominator_cost = it->second;
    }
    if (!r.denominator_cost || r.denominator_cost->value <= 0) {
      r.denominator = "none";
      r.denominator_cost.reset();
      continue;
    }
    if (r.first_cost) r.suboptimality_first = round_to(suboptimality(*r.first_cost, *r.denominator_cost), 1e6);
    if (r.best_cost) r.suboptimality_best = round_to(suboptimality(*r.best_cost, *r.denominator_cost), 1e6);
  }
}

// ---------------------------------------------------------------------------
// results.csv

namespace {

constexpr const char *kResultsHeader =
    "instance,grid,agents,seed,planner,status,first_iteration,first_time_ms,first_cost,"
    "best_cost,final_nodes,max_nodes,optimal_cost,denominator,denominator_cost,"
    "subopt_first,subopt_best";

std::string sanitize(std::string s) {
  for (char &c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

template <class T, class F>
std::string opt(const std::optional<T> &v, F &&fmt) {
  return v ? fmt(*v) : std::string();
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

void write_row(std::ostream &out, const CellResult &r) {
  auto cost = [](Cost c) { return std::to_string(c.value); };
  out << r.instance_id << ',' << r.grid_size << ',' << r.agents << ',' << r.seed << ','
      << planner_slug(r.planner) << ',' << sanitize(r.status) << ','
      << opt(r.first_iteration, [](std::int64_t v) { return std::to_string(v); }) << ','
      << opt(r.first_solution_ms, [](double v) { return fixed(v, 3); }) << ','
      << opt(r.first_cost, cost) << ',' << opt(r.best_cost, cost) << ',' << r.final_nodes << ','
      << r.max_nodes << ',' << opt(r.optimal_cost, cost) << ',' << r.denominator << ','
      << opt(r.denominator_cost, cost) << ','
      << opt(r.suboptimality_first, [](double v) { return fixed(v, 6); }) << ','
      << opt(r.suboptimality_best, [](double v) { return fixed(v, 6); }) << '\n';
}

std::vector<std::string> split_csv(const std::string &line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

CellResult parse_row(const std::vector<std::string> &f, int line) {
  if (f.size() != 17) throw ParseError(line, "expected 17 result fields");
  auto cost = [&](const std::string &s) -> std::optional<Cost> {
    if (s.empty()) return std::nullopt;
    return Cost{std::stoll(s)};
  };
  auto real = [&](const std::string &s) -> std::optional<double> {
    if (s.empty()) return std::nullopt;
    return std::stod(s);
  };
  try {
    CellResult r;
    r.instance_id = f[0];
    r.grid_size = std::stoi(f[1]);
    r.agents = std::stoi(f[2]);
    r.seed = std::stoull(f[3]);
    auto p = parse_planner(f[4]);
    if (!p) throw ParseError(line, "unknown planner '" + f[4] + "'");
    r.planner = *p;
    r.status = f[5];
    if (!f[6].empty()) r.first_iteration = std::stoll(f[6]);
    r.first_solution_ms = real(f[7]);
    r.first_cost = cost(f[8]);
    r.best_cost = cost(f[9]);
    r.final_nodes = std::stoull(f[10]);
    r.max_nodes = std::stoull(f[11]);
    r.optimal_cost = cost(f[12]);
    r.denominator = f[13].empty() ? "none" : f[13];
    r.denominator_cost = cost(f[14]);
    r.suboptimality_first = real(f[15]);
    r.suboptimality_best = real(f[16]);
    return r;
  } catch (const std::logic_error &) {
    throw ParseError(line, "malformed result row");
  }
}

std::vector<CellResult> read_rows(std::istream &in, bool lenient) {
  std::vector<CellResult> out;
  std::string line;
  int number = 0;
  if (!std::getline(in, line)) return out;
  ++number;
  if (line != kResultsHeader) {
    if (lenient) return out;
    throw ParseError(number, "unexpected results header");
  }
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    // Rows are written newline-terminated, so an unterminated last line is a
    // run killed mid-write.
    if (lenient && in.eof()) break;
    try {
      out.push_back(parse_row(split_csv(line), number));
    } catch (const ParseError &) {
      if (!lenient) throw;
    }
  }
  return out;
}

} // namespace

void write_results_csv(std::ostream &out, const std::vector<CellResult> &results) {
  out << kResultsHeader << '\n';
  for (const CellResult &r : results) write_row(out, r);
}

std::vector<CellResult> read_results_csv(std::istream &in) { return read_rows(in, false); }

// ---------------------------------------------------------------------------
// Suite execution

namespace {

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)> &body) {
  std::atomic<std::size_t> next{0};
  auto drain = [&] {
    for (std::size_t i = next++; i < count; i = next++) body(i);
  };
  const int extra = std::max(0, std::min<int>(workers, static_cast<int>(count)) - 1);
  std::vector<std::thread> pool;
  for (int w = 0; w < extra; ++w) pool.emplace_back(drain);
  drain();
  for (auto &t : pool) t.join();
}

std::ofstream open_append(const fs::path &path, const char *header) {
  const bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
  bool torn = false;
  if (!fresh) {
    std::ifstream in(path, std::ios::binary);
    in.seekg(-1, std::ios::end);
    torn = in.get() != '\n';
  }
  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  if (fresh) out << header << '\n' << std::flush;
  if (torn) out << '\n' << std::flush;
  return out;
}

fs::path trace_path(const fs::path &dir, const std::string &id, PlannerKind p) {
  return dir / "traces" / (id + "__" + std::string(planner_slug(p)) + ".csv");
}

constexpr const char *kOracleHeader = "instance,status,cost,expansions";

std::map<std::string, std::optional<Cost>> read_oracle_csv(const fs::path &path) {
  std::map<std::string, std::optional<Cost>> out;
  std::ifstream in(path);
  std::string line;
  if (!in || !std::getline(in, line) || line != kOracleHeader) return out;
  while (std::getline(in, line) && !in.eof()) {
    auto f = split_csv(line);
    if (f.size() != 4) continue;
    try {
      out[f[0]] = f[1] == "optimal" ? std::optional(Cost{std::stoll(f[2])}) : std::nullopt;
    } catch (const std::logic_error &) {
    }
  }
  return out;
}

std::optional<RunTrace> load_trace(const fs::path &path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  return read_trace_csv(in);
}

} // namespace

std::vector<CellResult> run_suite(const Suite &suite, const fs::path &out_dir,
                                  const RunOptions &options) {
  suite.validate();
  fs::create_directories(out_dir / "instances");
  fs::create_directories(out_dir / "traces");
  {
    std::ofstream cfg(out_dir / "suite.cfg");
    cfg << format_suite(suite);
  }

  const auto instances = generate_instances(suite);
  for (const auto &gi : instances) save_instance(out_dir / "instances" / (gi.id + ".txt"), gi.instance);

  // Oracle pass.
  auto oracle = read_oracle_csv(out_dir / "oracle.csv");
  if (suite.run_oracle) {
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < instances.size(); ++i)
      if (!oracle.contains(instances[i].id)) todo.push_back(i);
    std::ofstream log = open_append(out_dir / "oracle.csv", kOracleHeader);
    std::mutex mu;
    parallel_for(todo.size(), suite.workers, [&](std::size_t k) {
      const auto &gi = instances[todo[k]];
      const OracleResult res = optimal_cost(gi.instance, suite.oracle_limits);
      const char *status = res.status == OracleStatus::Optimal      ? "optimal"
                           : res.status == OracleStatus::Infeasible ? "infeasible"
                                                                    : "limit";
      std::lock_guard lock(mu);
      oracle[gi.id] = res.status == OracleStatus::Optimal ? std::optional(res.cost) : std::nullopt;
      log << gi.id << ',' << status << ','
          << (res.status == OracleStatus::Optimal ? std::to_string(res.cost.value) : "") << ','
          << res.expansions << '\n'
          << std::flush;
    });
  }

  // Planner runs; anything already in runs.csv is reused.
  std::map<std::pair<std::string, PlannerKind>, CellResult> done;
  {
    std::ifstream in(out_dir / "runs.csv");
    if (in)
      for (CellResult &r : read_rows(in, true)) done[{r.instance_id, r.planner}] = std::move(r);
  }
  std::vector<std::pair<std::size_t, PlannerKind>> jobs;
  for (std::size_t i = 0; i < instances.size(); ++i)
    for (PlannerKind p : suite.planners)
      if (!done.contains({instances[i].id, p})) jobs.emplace_back(i, p);

  {
    std::ofstream log = open_append(out_dir / "runs.csv", kResultsHeader);
    std::mutex mu;
    parallel_for(jobs.size(), suite.workers, [&](std::size_t k) {
      const auto &[idx, planner] = jobs[k];
      const auto &gi = instances[idx];
      CellResult r;
      try {
        const PlannerResult run = run_planner(planner, gi.instance, config_for(suite, planner, gi));
        if (run.best) {
          if (auto err = check_solution(gi.instance, run.best->path))
            throw std::logic_error("invalid solution: " + *err);
        }
        r = make_result(gi, planner, run);
        std::ofstream tf(trace_path(out_dir, gi.id, planner), std::ios::binary);
        write_trace_csv(tf, run.trace, suite.time_budget.has_value());
      } catch (const std::exception &e) {
        r = CellResult{};
        r.instance_id = gi.id;
        r.grid_size = gi.grid_size;
        r.agents = gi.agents;
        r.seed = gi.instance.seed;
        r.planner = planner;
        r.status = std::string("error: ") + e.what();
      }
      if (!options.keep_traces) r.trace.reset();
      std::lock_guard lock(mu);
      write_row(log, r);
      log.flush();
      if (options.on_result) options.on_result(r);
      done[{gi.id, planner}] = std::move(r);
    });
  }

  std::vector<CellResult> results;
  for (const auto &gi : instances)
    for (PlannerKind p : suite.planners) {
      auto it = done.find({gi.id, p});
      if (it == done.end()) continue;
      CellResult r = std::move(it->second);
      if (options.keep_traces && !r.trace && r.status == "ok")
        r.trace = load_trace(trace_path(out_dir, gi.id, p));
      if (auto o = oracle.find(gi.id); o != oracle.end()) r.optimal_cost = o->second;
      results.push_back(std::move(r));
    }
  assign_suboptimality(results);
  return results;
}

std::vector<CellResult> load_suite_results(const fs::path &dir) {
  std::ifstream in(dir / "runs.csv");
  if (!in) throw std::runtime_error("cannot open " + (dir / "runs.csv").string());
  std::vector<CellResult> results = read_rows(in, true);
  const auto oracle = read_oracle_csv(dir / "oracle.csv");
  for (CellResult &r : results) {
    if (auto o = oracle.find(r.instance_id); o != oracle.end()) r.optimal_cost = o->second;
    if (r.status == "ok") r.trace = load_trace(trace_path(dir, r.instance_id, r.planner));
  }
  assign_suboptimality(results);
  return results;
}

// ---------------------------------------------------------------------------
// Metrics

std::vector<PerfPoint> performance_curve(const std::vector<CellResult> &results, PlannerKind planner) {
  std::vector<double> times;
  for (const CellResult &r : results)
    if (r.planner == planner && r.first_solution_ms) times.push_back(*r.first_solution_ms);
  std::stable_sort(times.begin(), times.end());
  std::vector<PerfPoint> curve;
  for (std::size_t i = 0; i < times.size(); ++i) curve.push_back({i + 1, times[i]});
  return curve;
}

double solve_rate(const std::vector<CellResult> &results, PlannerKind planner) {
  std::size_t total = 0, solved = 0;
  for (const CellResult &r : results)
    if (r.planner == planner) {
      ++total;
      solved += r.first_solution_ms.has_value() ? 1 : 0;
    }
  return total ? static_cast<double>(solved) / static_cast<double>(total) : 0.0;
}

std::vector<ConvergencePoint> convergence_curves(const std::vector<CellResult> &results,
                                                 PlannerKind planner) {
  std::vector<const RunTrace *> traces;
  for (const CellResult &r : results)
    if (r.planner == planner && r.trace) traces.push_back(&*r.trace);
  std::size_t length = 0;
  for (const RunTrace *t : traces) length = std::max(length, t->records.size());

  std::vector<ConvergencePoint> curve;
  for (std::size_t step = 0; step < length; ++step) {
    double cost_sum = 0.0, node_sum = 0.0;
    std::size_t cost_n = 0, node_n = 0;
    std::int64_t iteration = static_cast<std::int64_t>(step) + 1;
    for (const RunTrace *t : traces) {
      if (step >= t->records.size()) continue;
      const TraceRecord &rec = t->records[step];
      iteration = rec.iteration;
      node_sum += static_cast<double>(rec.node_count);
      ++node_n;
      if (t->events.empty()) continue;
      const Cost c = rec.best_cost ? *rec.best_cost : t->events.front().cost;
      cost_sum += static_cast<double>(c.value);
      ++cost_n;
    }
    ConvergencePoint p;
    p.iteration = iteration;
    if (cost_n) p.avg_min_cost = cost_sum / static_cast<double>(cost_n);
    p.avg_node_count = node_n ? node_sum / static_cast<double>(node_n) : 0.0;
    curve.push_back(p);
  }
  return curve;
}

std::optional<double> median(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : (values[mid - 1] + values[mid]) / 2.0;
}

namespace {

std::vector<PlannerKind> planners_in(const std::vector<CellResult> &results) {
  std::set<PlannerKind> seen;
  for (const CellResult &r : results) seen.insert(r.planner);
  return {seen.begin(), seen.end()};
}

} // namespace

std::string summary_text(const std::vector<CellResult> &results) {
  std::ostringstream out;
  std::set<std::string> instances;
  for (const CellResult &r : results) instances.insert(r.instance_id);
  const auto planners = planners_in(results);
  out << "instances " << instances.size() << '\n';
  out << "runs " << results.size() << '\n';
  out << "planners " << planners.size() << '\n';
  auto show = [&](const std::optional<double> &v, int digits) {
    return v ? fixed(*v, digits) : std::string("n/a");
  };
  for (PlannerKind p : planners) {
    std::size_t runs = 0, solved = 0, errors = 0, oracle_n = 0, known_n = 0;
    std::vector<double> iters, times, sub_first, sub_best;
    for (const CellResult &r : results) {
      if (r.planner != p) continue;
      ++runs;
      if (r.status != "ok") ++errors;
      if (r.solved()) {
        ++solved;
        if (r.first_iteration) iters.push_back(static_cast<double>(*r.first_iteration));
        if (r.first_solution_ms) times.push_back(*r.first_solution_ms);
      }
      if (r.suboptimality_first) sub_first.push_back(*r.suboptimality_first);
      if (r.suboptimality_best) {
        sub_best.push_back(*r.suboptimality_best);
        (r.denominator == "oracle" ? oracle_n : known_n) += 1;
      }
    }
    out << '\n' << "[" << planner_name(p) << "]\n";
    out << "runs " << runs << '\n';
    out << "errors " << errors << '\n';
    out << "solved " << solved << '\n';
    out << "solve_rate " << fixed(runs ? static_cast<double>(solved) / runs : 0.0, 4) << '\n';
    out << "median_first_iteration " << show(median(iters), 1) << '\n';
    out << "median_first_time_ms " << show(median(times), 3) << '\n';
    out << "median_suboptimality_first " << show(median(sub_first), 4) << '\n';
    out << "median_suboptimality_best " << show(median(sub_best), 4) << '\n';
    out << "suboptimality_denominators oracle=" << oracle_n << " best_known=" << known_n << '\n';
  }
  return out.str();
}

void emit_report(const std::vector<CellResult> &results, const fs::path &out_dir) {
  fs::create_directories(out_dir);
  auto open = [&](const std::string &name) {
    std::ofstream f(out_dir / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (out_dir / name).string());
    return f;
  };
  {
    auto f = open("results.csv");
    write_results_csv(f, results);
  }
  {
    auto f = open("summary.txt");
    f << summary_text(results);
  }
  auto sub = open("plot_suboptimality.dat");
  sub << "# index planner median_subopt_first median_subopt_best\n";
  int index = 0;
  for (PlannerKind p : planners_in(results)) {
    const std::string slug(planner_slug(p));
    const auto perf = performance_curve(results, p);
    auto pc = open("perf_curve_" + slug + ".csv");
    auto pd = open("plot_perf_" + slug + ".dat");
    pc << "rank,first_time_ms\n";
    pd << "# rank first_time_ms (" << planner_name(p) << ")\n";
    for (const PerfPoint &pt : perf) {
      pc << pt.rank << ',' << fixed(pt.first_solution_ms, 3) << '\n';
      pd << pt.rank << ' ' << fixed(pt.first_solution_ms, 3) << '\n';
    }

    const auto conv = convergence_curves(results, p);
    auto cc = open("convergence_" + slug + ".csv");
    auto cd = open("plot_cost_" + slug + ".dat");
    auto nd = open("plot_nodes_" + slug + ".dat");
    cc << "iteration,avg_min_cost,avg_node_count\n";
    cd << "# iteration avg_min_cost (" << planner_name(p) << ")\n";
    nd << "# iteration avg_node_count (" << planner_name(p) << ")\n";
    for (const ConvergencePoint &pt : conv) {
      cc << pt.iteration << ',' << (pt.avg_min_cost ? fixed(*pt.avg_min_cost, 4) : "") << ','
         << fixed(pt.avg_node_count, 4) << '\n';
      if (pt.avg_min_cost) cd << pt.iteration << ' ' << fixed(*pt.avg_min_cost, 4) << '\n';
      nd << pt.iteration << ' ' << fixed(pt.avg_node_count, 4) << '\n';
    }

    std::vector<double> first, best;
    for (const CellResult &r : results) {
      if (r.planner != p) continue;
      if (r.suboptimality_first) first.push_back(*r.suboptimality_first);
      if (r.suboptimality_best) best.push_back(*r.suboptimality_best);
    }
    auto m = [](const std::optional<double> &v) { return v ? fixed(*v, 4) : std::string("nan"); };
    sub << index++ << " \"" << planner_name(p) << "\" " << m(median(first)) << ' '
        << m(median(best)) << '\n';
  }
}

} // namespace marrt::bench

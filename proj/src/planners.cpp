#include "marrt/planners.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>

namespace marrt {

using Clock = std::chrono::steady_clock;

std::string_view planner_name(PlannerKind kind) {
  switch (kind) {
  case PlannerKind::MaRrtStar: return "MA-RRT*";
  case PlannerKind::MaRrtStarFn: return "MA-RRT*FN";
  case PlannerKind::IsMaRrtStar: return "isMA-RRT*";
  case PlannerKind::IsMaRrtStarFn: return "isMA-RRT*FN";
  }
  return "?";
}

std::string_view planner_slug(PlannerKind kind) {
  switch (kind) {
  case PlannerKind::MaRrtStar: return "ma_rrt_star";
  case PlannerKind::MaRrtStarFn: return "ma_rrt_star_fn";
  case PlannerKind::IsMaRrtStar: return "is_ma_rrt_star";
  case PlannerKind::IsMaRrtStarFn: return "is_ma_rrt_star_fn";
  }
  return "?";
}

std::optional<PlannerKind> parse_planner(std::string_view text) {
  auto lower = [](std::string_view s) {
    std::string out(s);
    for (char &c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
  };
  const std::string t = lower(text);
  for (PlannerKind k : kAllPlanners)
    if (t == lower(planner_name(k)) || t == planner_slug(k)) return k;
  return std::nullopt;
}

void PlannerConfig::validate() const {
  auto bad = [](const char *what) { throw std::invalid_argument(what); };
  if (!(p_goal >= 0.0 && p_goal <= 1.0)) bad("p_goal must lie in [0, 1]");
  if (!(p_path >= 0.0 && p_path <= 1.0)) bad("p_path must lie in [0, 1]");
  if (p_goal + p_path > 1.0 + 1e-12) bad("p_goal + p_path must not exceed 1");
  if (c_max && c_max->value <= 0) bad("c_max must be positive");
  if (capacity && *capacity == 0) bad("capacity must be positive");
  if (!(k_rrg > 0.0)) bad("k_rrg must be positive");
  if (bias_window < 0) bad("bias window must be nonnegative");
  if (!iteration_budget && !time_budget) bad("at least one budget must be finite");
  if (iteration_budget && *iteration_budget < 0) bad("iteration budget must be nonnegative");
  if (time_budget && time_budget->count() < 0) bad("time budget must be nonnegative");
  if (!(phase1_fraction >= 0.0 && phase1_fraction <= 1.0)) bad("phase-1 fraction must lie in [0, 1]");
}

bool same_progress(const RunTrace &a, const RunTrace &b) {
  if (a.records.size() != b.records.size() || a.events.size() != b.events.size() ||
      a.prelude_iterations != b.prelude_iterations)
    return false;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    const auto &x = a.records[i];
    const auto &y = b.records[i];
    if (x.iteration != y.iteration || x.node_count != y.node_count || x.best_cost != y.best_cost)
      return false;
  }
  for (std::size_t i = 0; i < a.events.size(); ++i)
    if (a.events[i].iteration != b.events[i].iteration || a.events[i].cost != b.events[i].cost)
      return false;
  return true;
}

// ---------------------------------------------------------------------------
// EXTEND

ExtendOutcome extend(Tree &tree, const JointState &x_rand, const GridMap &map, Cost c_max,
                     double k_rrg) {
  ExtendOutcome out;
  const NodeId x_nearest = nearest(tree, x_rand);
  SteerResult steer = greedy(map, tree.node(x_nearest).state, x_rand, c_max);
  if (steer.path.transitions() == 0) return out;
  if (tree.find(steer.reached)) {
    out.status = ExtendStatus::Duplicate;
    return out;
  }

  const JointState &x_state = steer.reached;
  const std::vector<NodeId> x_near = near_set(tree, x_state, k_rrg);

  // Choose the parent. A near node only qualifies if its own steer lands
  // exactly on the new state.
  NodeId x_min = x_nearest;
  Cost c_min = tree.node(x_nearest).cost_to_root + steer.cost;
  for (NodeId id : x_near) {
    if (id == x_nearest) continue;
    const Node &cand = tree.node(id);
    if (cand.cost_to_root + edge_lower_bound(cand.state, x_state) >= c_min) continue;
    // Only edges strictly cheaper than the incumbent matter, so the steer
    // budget can be tightened without changing the outcome.
    const Cost limit = std::min(c_max, c_min - cand.cost_to_root - Cost{1});
    if (auto c = greedy_edge_cost(map, cand.state, x_state, limit);
        c && cand.cost_to_root + *c < c_min) {
      x_min = id;
      c_min = cand.cost_to_root + *c;
    }
  }
  JointPath edge = x_min == x_nearest ? std::move(steer.path)
                                      : greedy(map, tree.node(x_min).state, x_state, c_max).path;

  const NodeId x_new = tree.add_node(x_state, x_min, std::move(edge));
  out.status = ExtendStatus::Advanced;
  out.new_node = x_new;

  // Rewire near nodes through x_new.
  for (NodeId id : x_near) {
    if (id == x_min || id == tree.root() || !tree.contains(id)) continue;
    const Node &near = tree.node(id);
    const Node &fresh = tree.node(x_new);
    if (fresh.cost_to_root + edge_lower_bound(fresh.state, near.state) >= near.cost_to_root)
      continue;
    const Cost limit = std::min(c_max, near.cost_to_root - fresh.cost_to_root - Cost{1});
    auto c = greedy_edge_cost(map, fresh.state, near.state, limit);
    if (!c || fresh.cost_to_root + *c >= near.cost_to_root) continue;
    // Consistent costs rule this out; guard anyway since rewire would throw.
    if (tree.is_ancestor(id, x_new)) continue;

    const NodeId old_parent = *near.parent;
    const bool over_capacity = tree.capacity() && tree.size() > *tree.capacity();
    const bool drop_parent = over_capacity && !out.removed_during_rewire &&
                             tree.node(old_parent).child_count() == 1 &&
                             old_parent != tree.root() &&
                             std::find(tree.goal_nodes().begin(), tree.goal_nodes().end(),
                                       old_parent) == tree.goal_nodes().end();

    JointPath old_edge = near.edge_from_parent;
    tree.rewire(id, x_new, greedy(map, fresh.state, near.state, c_max).path);
    if (drop_parent) {
      // The old parent only existed to carry `id`; rewiring left it childless.
      tree.remove_childless(old_parent);
      out.removed_during_rewire = true;
    } else {
      out.rewired.push_back({id, old_parent, std::move(old_edge)});
    }
  }
  return out;
}

void retract(Tree &tree, const ExtendOutcome &outcome) {
  for (auto it = outcome.rewired.rbegin(); it != outcome.rewired.rend(); ++it)
    tree.rewire(it->child, it->old_parent, it->old_edge);
  if (outcome.new_node) tree.remove_childless(*outcome.new_node);
}

// ---------------------------------------------------------------------------
// Planner loop shared by every variant.

namespace {

struct RunContext {
  Clock::time_point start = Clock::now();
  std::optional<Clock::time_point> deadline;
  std::optional<std::int64_t> iterations;
  /// Stop as soon as the best cost drops to this value.
  std::optional<Cost> stop_at;
};

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

template <class Sampler>
PlannerResult grow(const GridMap &map, const JointState &start, const JointState &goal,
                   const PlannerConfig &cfg, std::optional<std::size_t> capacity,
                   const RunContext &ctx, Rng &rng, Sampler &&sample) {
  PlannerResult result;
  Tree tree(start, goal, capacity);
  const Cost c_max = cfg.c_max.value_or(default_c_max(map, start.size()));

  auto note_solution = [&](std::int64_t iteration) {
    if (tree.goal_nodes().empty()) return;
    const NodeId g = tree.goal_nodes().front();
    const Cost c = tree.node(g).cost_to_root;
    if (result.best && c >= result.best->cost) return;
    const double t = ms_since(ctx.start);
    result.best = Solution{tree.root_path(g), c, iteration, t};
    result.trace.events.push_back({iteration, c, t});
  };
  note_solution(0);

  for (std::int64_t it = 1; !ctx.iterations || it <= *ctx.iterations; ++it) {
    if (ctx.deadline && Clock::now() >= *ctx.deadline) break;
    if (ctx.stop_at && result.best && result.best->cost <= *ctx.stop_at) break;

    const JointState x_rand = sample(rng);
    ExtendOutcome ext = extend(tree, x_rand, map, c_max, cfg.k_rrg);
    if (ext.status == ExtendStatus::Advanced && capacity && tree.size() > *capacity &&
        !ext.removed_during_rewire) {
      const NodeId keep[] = {*ext.new_node};
      if (!force_removal(tree, keep, rng)) retract(tree, ext);
    }

    note_solution(it);
    result.trace.records.push_back(
        {it, tree.size(), result.best ? std::optional(result.best->cost) : std::nullopt,
         ms_since(ctx.start)});
  }
  return result;
}

RunContext context_for(const PlannerConfig &cfg) {
  RunContext ctx;
  ctx.iterations = cfg.iteration_budget;
  if (cfg.time_budget) ctx.deadline = ctx.start + *cfg.time_budget;
  return ctx;
}

JointState joint(const std::vector<Cell> &cells) { return JointState(cells); }

PlannerResult base_run(const ProblemInstance &instance, const PlannerConfig &cfg,
                       std::optional<std::size_t> capacity, const RunContext &ctx) {
  validate_instance(instance);
  const JointState start = joint(instance.starts);
  const JointState goal = joint(instance.goals);
  const std::size_t n = instance.agent_count();
  Rng rng(cfg.seed);
  return grow(instance.map, start, goal, cfg, capacity, ctx, rng,
              [&](Rng &r) { return sample_free(instance.map, n, goal, cfg.p_goal, r); });
}

std::optional<std::size_t> fn_capacity(const PlannerConfig &cfg) {
  if (!cfg.capacity || *cfg.capacity < 2)
    throw std::invalid_argument("fixed-node planners need a capacity of at least 2");
  return cfg.capacity;
}

// Single-agent shortest path length by BFS; nullopt if unreachable.
std::optional<int> bfs_distance(const GridMap &map, Cell from, Cell to) {
  std::vector<int> dist(static_cast<std::size_t>(map.cell_count()), -1);
  std::queue<Cell> frontier;
  dist[map.index(from)] = 0;
  frontier.push(from);
  while (!frontier.empty()) {
    Cell c = frontier.front();
    frontier.pop();
    if (c == to) return dist[map.index(c)];
    for (Cell nb : neighbors4(map, c)) {
      if (dist[map.index(nb)] >= 0) continue;
      dist[map.index(nb)] = dist[map.index(c)] + 1;
      frontier.push(nb);
    }
  }
  return std::nullopt;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

} // namespace

JointState biased_sample(const GridMap &map, const std::vector<std::vector<Cell>> &paths, int w,
                         Rng &rng) {
  constexpr int kRedraws = 64;
  std::vector<Cell> picks;
  picks.reserve(paths.size());
  auto taken = [&](Cell c) { return std::find(picks.begin(), picks.end(), c) != picks.end(); };
  std::uniform_int_distribution<int> offset(-w, w);
  for (const auto &path : paths) {
    std::uniform_int_distribution<std::size_t> waypoint(0, path.size() - 1);
    std::optional<Cell> pick;
    for (int attempt = 0; attempt < kRedraws && !pick; ++attempt) {
      Cell c = path[waypoint(rng)];
      c.x = std::clamp(c.x + offset(rng), 0, map.width() - 1);
      c.y = std::clamp(c.y + offset(rng), 0, map.height() - 1);
      if (is_free(map, c) && !taken(c)) pick = c;
    }
    if (!pick) {
      const auto &free = map.free_cells();
      std::uniform_int_distribution<std::size_t> any(0, free.size() - 1);
      do pick = free[any(rng)];
      while (taken(*pick));
    }
    picks.push_back(*pick);
  }
  return JointState(std::move(picks));
}

PlannerResult ma_rrt_star(const ProblemInstance &instance, const PlannerConfig &cfg) {
  cfg.validate();
  return base_run(instance, cfg, std::nullopt, context_for(cfg));
}

PlannerResult ma_rrt_star_fn(const ProblemInstance &instance, const PlannerConfig &cfg) {
  cfg.validate();
  return base_run(instance, cfg, fn_capacity(cfg), context_for(cfg));
}

PlannerResult g_rrt_star(const GridMap &map, Cell start, Cell goal, const PlannerConfig &cfg) {
  cfg.validate();
  ProblemInstance single{map, {start}, {goal}, cfg.seed};
  return base_run(single, cfg, std::nullopt, context_for(cfg));
}

PlannerResult informed_variant(const ProblemInstance &instance, const PlannerConfig &cfg,
                               PlannerKind base) {
  cfg.validate();
  validate_instance(instance);
  if (is_informed(base)) throw std::invalid_argument("informed base must be MA-RRT* or MA-RRT*FN");
  const std::optional<std::size_t> capacity =
      is_fixed_node(base) ? fn_capacity(cfg) : std::optional<std::size_t>{};
  const std::size_t n = instance.agent_count();
  const GridMap &map = instance.map;

  const RunContext overall = context_for(cfg);

  // Phase 1: G-RRT* per agent on an equal share of what is left of the
  // phase-1 budget. A run stops early once it matches the BFS optimum, which
  // hands the unused iterations to the agents after it.
  std::optional<std::int64_t> phase1_iters;
  if (cfg.iteration_budget)
    phase1_iters = static_cast<std::int64_t>(
        std::floor(static_cast<double>(*cfg.iteration_budget) * cfg.phase1_fraction));
  std::optional<Clock::time_point> phase1_deadline;
  if (cfg.time_budget)
    phase1_deadline =
        overall.start + std::chrono::duration_cast<Clock::duration>(
                            std::chrono::duration<double, std::milli>(
                                static_cast<double>(cfg.time_budget->count()) * cfg.phase1_fraction));

  std::int64_t used = 0;
  std::vector<std::optional<std::vector<Cell>>> agent_paths(n);
  auto run_agent = [&](std::size_t i, std::size_t agents_left, std::uint64_t stream) {
    RunContext ctx;
    ctx.start = overall.start;
    if (phase1_iters) ctx.iterations = (*phase1_iters - used) / static_cast<std::int64_t>(agents_left);
    if (phase1_deadline) {
      const auto remaining = *phase1_deadline - Clock::now();
      ctx.deadline = Clock::now() + remaining / static_cast<long>(agents_left);
    }
    if (auto d = bfs_distance(map, instance.starts[i], instance.goals[i])) ctx.stop_at = Cost{*d};
    PlannerConfig sub = cfg;
    sub.seed = derive_seed(cfg.seed, stream);
    ProblemInstance single{map, {instance.starts[i]}, {instance.goals[i]}, instance.seed};
    PlannerResult r = base_run(single, sub, capacity, ctx);
    used += static_cast<std::int64_t>(r.trace.records.size());
    if (r.best) {
      std::vector<Cell> cells;
      for (const JointState &s : r.best->path.steps) cells.push_back(s[0]);
      agent_paths[i] = std::move(cells);
    }
  };
  for (std::size_t i = 0; i < n; ++i) run_agent(i, n - i, i + 1);

  // Retry agents that came back empty while phase-1 budget remains.
  auto phase1_left = [&] {
    const bool iters = !phase1_iters || used < *phase1_iters;
    const bool time = !phase1_deadline || Clock::now() < *phase1_deadline;
    return iters && time;
  };
  for (std::uint64_t round = 1; phase1_left(); ++round) {
    std::vector<std::size_t> failed;
    for (std::size_t i = 0; i < n; ++i)
      if (!agent_paths[i]) failed.push_back(i);
    if (failed.empty()) break;
    for (std::size_t k = 0; k < failed.size() && phase1_left(); ++k)
      run_agent(failed[k], failed.size() - k, round * n + failed[k] + 1);
  }

  const bool all_found =
      std::all_of(agent_paths.begin(), agent_paths.end(), [](const auto &p) { return p.has_value(); });

  // Phase 2: the base planner on whatever budget remains.
  RunContext ctx;
  ctx.start = overall.start;
  ctx.deadline = overall.deadline;
  if (cfg.iteration_budget) ctx.iterations = std::max<std::int64_t>(0, *cfg.iteration_budget - used);

  PlannerResult phase2;
  if (all_found) {
    std::vector<std::vector<Cell>> paths;
    for (auto &p : agent_paths) paths.push_back(std::move(*p));
    const JointState start = joint(instance.starts);
    const JointState goal = joint(instance.goals);
    Rng rng(cfg.seed);
    phase2 = grow(map, start, goal, cfg, capacity, ctx, rng, [&](Rng &r) {
      const double u = unit_draw(r);
      if (u < cfg.p_goal) return goal;
      if (u < cfg.p_goal + cfg.p_path) return biased_sample(map, paths, cfg.bias_window, r);
      return uniform_joint_state(map, n, r);
    });
  } else {
    phase2 = base_run(instance, cfg, capacity, ctx);
  }

  phase2.trace.prelude_iterations = used;
  return phase2;
}

PlannerResult run_planner(PlannerKind kind, const ProblemInstance &instance,
                          const PlannerConfig &cfg) {
  switch (kind) {
  case PlannerKind::MaRrtStar: return ma_rrt_star(instance, cfg);
  case PlannerKind::MaRrtStarFn: return ma_rrt_star_fn(instance, cfg);
  case PlannerKind::IsMaRrtStar: return informed_variant(instance, cfg, PlannerKind::MaRrtStar);
  case PlannerKind::IsMaRrtStarFn: return informed_variant(instance, cfg, PlannerKind::MaRrtStarFn);
  }
  throw std::invalid_argument("unknown planner");
}

std::optional<std::string> check_solution(const ProblemInstance &instance, const JointPath &path) {
  if (path.steps.empty()) return "empty path";
  if (!(path.steps.front() == joint(instance.starts))) return "path does not start at the starts";
  if (!(path.steps.back() == joint(instance.goals))) return "path does not end at the goals";
  for (std::size_t t = 0; t < path.steps.size(); ++t) {
    if (path.steps[t].size() != instance.agent_count())
      return "wrong agent count at step " + std::to_string(t);
    if (!is_valid_state(instance.map, path.steps[t]))
      return "invalid joint state at step " + std::to_string(t);
    if (t > 0 && !is_transition_valid(path.steps[t - 1], path.steps[t]))
      return "invalid transition into step " + std::to_string(t);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Trace and solution files

void write_trace_csv(std::ostream &out, const RunTrace &trace, bool with_timing) {
  out << "iteration,node_count,best_cost,elapsed_ms\n";
  for (const TraceRecord &r : trace.records) {
    out << r.iteration << ',' << r.node_count << ',';
    if (r.best_cost) out << r.best_cost->value;
    out << ',';
    if (with_timing) out << std::fixed << std::setprecision(3) << r.elapsed_ms << std::defaultfloat;
    out << '\n';
  }
}

RunTrace read_trace_csv(std::istream &in) {
  RunTrace trace;
  std::string line;
  int number = 0;
  if (!std::getline(in, line)) return trace;
  ++number;
  if (line.rfind("iteration,node_count,best_cost", 0) != 0)
    throw ParseError(number, "missing trace header");
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    if (line.back() == ',') fields.emplace_back();
    if (fields.size() != 4) throw ParseError(number, "expected 4 trace fields");
    try {
      TraceRecord r;
      r.iteration = std::stoll(fields[0]);
      r.node_count = std::stoull(fields[1]);
      if (!fields[2].empty()) r.best_cost = Cost{std::stoll(fields[2])};
      if (!fields[3].empty()) r.elapsed_ms = std::stod(fields[3]);
      const bool improved =
          r.best_cost && (trace.events.empty() || *r.best_cost < trace.events.back().cost);
      if (improved) trace.events.push_back({r.iteration, *r.best_cost, r.elapsed_ms});
      trace.records.push_back(r);
    } catch (const std::logic_error &) {
      throw ParseError(number, "malformed trace row");
    }
  }
  return trace;
}

void write_solution(std::ostream &out, const JointPath &path) {
  for (const JointState &s : path.steps) {
    for (std::size_t i = 0; i < s.size(); ++i)
      out << (i ? "," : "") << s[i].x << ':' << s[i].y;
    out << '\n';
  }
}

JointPath read_solution(std::istream &in) {
  JointPath path;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    std::vector<Cell> cells;
    std::stringstream ss(line);
    for (std::string tok; std::getline(ss, tok, ',');) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) throw ParseError(number, "expected x:y");
      try {
        cells.push_back({std::stoi(tok.substr(0, colon)), std::stoi(tok.substr(colon + 1))});
      } catch (const std::logic_error &) {
        throw ParseError(number, "malformed cell '" + tok + "'");
      }
    }
    path.steps.emplace_back(std::move(cells));
  }
  return path;
}

} // namespace marrt

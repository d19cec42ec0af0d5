#include "marrt/oracle.hpp"

#include <algorithm>
#include <bit>
#include <queue>
#include <string>
#include <unordered_map>

namespace marrt {
namespace {

// Joint states packed as fixed-width linear cell indices.
class Codec {
public:
  Codec(const GridMap &map, std::size_t n)
      : map_(map), n_(n),
        bits_(std::max(1, static_cast<int>(std::bit_width(static_cast<unsigned>(map.cell_count()))))) {}

  bool fits() const { return static_cast<std::size_t>(bits_) * n_ <= 64; }

  std::uint64_t encode(std::span<const int> cells) const {
    std::uint64_t key = 0;
    for (int c : cells) key = (key << bits_) | static_cast<std::uint64_t>(c);
    return key;
  }
  void decode(std::uint64_t key, std::vector<int> &cells) const {
    cells.resize(n_);
    const std::uint64_t mask = (std::uint64_t{1} << bits_) - 1;
    for (std::size_t i = n_; i-- > 0;) {
      cells[i] = static_cast<int>(key & mask);
      key >>= bits_;
    }
  }
  JointState state(std::uint64_t key) const {
    std::vector<int> idx;
    decode(key, idx);
    std::vector<Cell> cells;
    for (int i : idx) cells.push_back(map_.cell_at(i));
    return JointState(std::move(cells));
  }

private:
  const GridMap &map_;
  std::size_t n_;
  int bits_;
};

struct Entry {
  std::int64_t f;
  std::int64_t g;
  std::uint64_t key;
  // Lowest f first, then deepest g.
  bool operator<(const Entry &o) const { return f != o.f ? f > o.f : g < o.g; }
};

} // namespace

OracleResult optimal_cost(const ProblemInstance &instance, const OracleLimits &limits,
                          bool use_heuristic) {
  validate_instance(instance);
  OracleResult result;
  const GridMap &map = instance.map;
  const std::size_t n = instance.agent_count();
  if (map.cell_count() > limits.max_cells || static_cast<int>(n) > limits.max_agents) return result;
  const Codec codec(map, n);
  if (!codec.fits()) return result;

  std::vector<int> goal_idx(n);
  std::vector<int> start_idx(n);
  for (std::size_t i = 0; i < n; ++i) {
    goal_idx[i] = map.index(instance.goals[i]);
    start_idx[i] = map.index(instance.starts[i]);
  }
  const std::uint64_t goal_key = codec.encode(goal_idx);
  const auto heuristic = [&](std::span<const int> cells) -> std::int64_t {
    if (!use_heuristic) return 0;
    int worst = 0;
    for (std::size_t i = 0; i < n; ++i)
      worst = std::max(worst, manhattan(map.cell_at(cells[i]), instance.goals[i]));
    return static_cast<std::int64_t>(n) * worst;
  };

  // Per-cell options: stay first, then free neighbors.
  std::vector<std::vector<int>> options(static_cast<std::size_t>(map.cell_count()));
  for (Cell c : map.free_cells()) {
    auto &opt = options[map.index(c)];
    opt.push_back(map.index(c));
    for (Cell nb : neighbors4(map, c)) opt.push_back(map.index(nb));
  }

  struct Info {
    std::int64_t g;
    std::uint64_t parent;
    bool closed;
  };
  std::unordered_map<std::uint64_t, Info> info;
  std::priority_queue<Entry> open;
  const std::uint64_t start_key = codec.encode(start_idx);
  info[start_key] = {0, start_key, false};
  open.push({heuristic(start_idx), 0, start_key});

  const auto step_cost = static_cast<std::int64_t>(n);
  std::vector<int> cur, next(n), choice(n);
  while (!open.empty()) {
    const Entry top = open.top();
    open.pop();
    Info &here = info[top.key];
    if (here.closed || top.g != here.g) continue;
    here.closed = true;

    if (top.key == goal_key) {
      result.status = OracleStatus::Optimal;
      result.cost = Cost{top.g};
      JointPath path;
      for (std::uint64_t k = top.key;; k = info[k].parent) {
        path.steps.push_back(codec.state(k));
        if (k == start_key) break;
      }
      std::reverse(path.steps.begin(), path.steps.end());
      result.path = std::move(path);
      return result;
    }
    if (++result.expansions > limits.max_expansions) {
      result.status = OracleStatus::LimitExceeded;
      return result;
    }

    codec.decode(top.key, cur);
    // Odometer over the per-agent option lists, pruning conflicts as agents
    // are assigned.
    std::fill(choice.begin(), choice.end(), 0);
    std::size_t depth = 0;
    while (true) {
      const auto &opts = options[cur[depth]];
      if (choice[depth] >= static_cast<int>(opts.size())) {
        if (depth == 0) break;
        choice[depth] = 0;
        ++choice[--depth];
        continue;
      }
      next[depth] = opts[choice[depth]];
      bool ok = true;
      for (std::size_t j = 0; j < depth && ok; ++j)
        ok = next[j] != next[depth] && !(next[j] == cur[depth] && next[depth] == cur[j]);
      if (!ok) {
        ++choice[depth];
        continue;
      }
      if (depth + 1 < n) {
        ++depth;
        continue;
      }
      const std::uint64_t key = codec.encode(next);
      const std::int64_t g = top.g + step_cost;
      auto [it, inserted] = info.try_emplace(key, Info{g, top.key, false});
      if (inserted || (!it->second.closed && g < it->second.g)) {
        it->second = {g, top.key, false};
        open.push({g + heuristic(next), g, key});
      }
      ++choice[depth];
    }
  }
  result.status = OracleStatus::Infeasible;
  return result;
}

double suboptimality(Cost returned, Cost optimal) {
  if (optimal.value <= 0) throw std::invalid_argument("suboptimality needs a positive optimum");
  if (returned < optimal)
    throw NegativeSuboptimality("returned cost " + std::to_string(returned.value) +
                                " is below the optimum " + std::to_string(optimal.value));
  return (static_cast<double>(returned.value) / static_cast<double>(optimal.value) - 1.0) * 100.0;
}

} // namespace marrt

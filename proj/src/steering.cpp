#include "marrt/steering.hpp"

#include <algorithm>

namespace marrt {
namespace {

int squared_distance(Cell a, Cell b) {
  const int dx = a.x - b.x;
  const int dy = a.y - b.y;
  return dx * dx + dy * dy;
}

Cell greedy_move(const GridMap &map, Cell at, Cell target) {
  if (at == target) return at;
  // Candidate order [up, right, down, left, stay]; the first strict minimum
  // wins. A move can never tie with staying: the squared distances differ by
  // an odd amount.
  Cell best = at;
  int best_d = squared_distance(at, target);
  for (Cell delta : kMoves) {
    Cell next = step(at, delta);
    if (!is_free(map, next)) continue;
    if (int d = squared_distance(next, target); d < best_d) {
      best = next;
      best_d = d;
    }
  }
  return best;
}

// Runs the stepping loop, handing every committed state to `commit`.
// Returns (reached, transitions).
template <class Commit>
std::pair<JointState, std::size_t> run(const GridMap &map, const JointState &origin,
                                       const JointState &target, Cost c_max,
                                       Commit &&commit) {
  const std::size_t n = origin.size();
  JointState x = origin;
  JointState next = origin;
  std::size_t transitions = 0;
  Cost spent{0};
  while (!(x == target) && spent <= c_max) {
    bool moved = false;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = greedy_move(map, x[i], target[i]);
      moved = moved || !(next[i] == x[i]);
    }
    spent += transition_cost(n, 1);
    // Nobody can move: the state is a fixed point of the step rule, so any
    // further iterations would only append waits.
    if (!moved) break;
    if (!is_transition_valid(x, next)) break;
    x = next;
    ++transitions;
    commit(x);
  }
  return {std::move(x), transitions};
}

} // namespace

SteerResult greedy(const GridMap &map, const JointState &origin, const JointState &target,
                   Cost c_max) {
  SteerResult out;
  out.path.steps.push_back(origin);
  auto [reached, transitions] =
      run(map, origin, target, c_max, [&](const JointState &s) { out.path.steps.push_back(s); });
  out.cost = transition_cost(origin.size(), transitions);
  out.hit_target = reached == target;
  out.reached = std::move(reached);
  return out;
}

std::optional<Cost> greedy_edge_cost(const GridMap &map, const JointState &origin,
                                     const JointState &target, Cost c_max) {
  auto [reached, transitions] = run(map, origin, target, c_max, [](const JointState &) {});
  if (!(reached == target)) return std::nullopt;
  return transition_cost(origin.size(), transitions);
}

Cost edge_lower_bound(const JointState &a, const JointState &b) {
  int worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, manhattan(a[i], b[i]));
  return transition_cost(a.size(), static_cast<std::size_t>(worst));
}

} // namespace marrt

#include "marrt/joint_space.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace marrt {

bool is_valid_state(const GridMap &map, const JointState &s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!is_free(map, s[i])) return false;
    for (std::size_t j = 0; j < i; ++j)
      if (s[i] == s[j]) return false;
  }
  return true;
}

bool is_transition_valid(const JointState &from, const JointState &to) {
  const std::size_t n = from.size();
  if (to.size() != n) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (manhattan(from[i], to[i]) > 1) return false;
    for (std::size_t j = 0; j < i; ++j) {
      if (to[i] == to[j]) return false;
      if (to[i] == from[j] && to[j] == from[i]) return false;
    }
  }
  return true;
}

Cost path_cost(const JointPath &p) {
  if (p.steps.empty()) return {0};
  return transition_cost(p.steps.front().size(), p.transitions());
}

void append_path(JointPath &head, const JointPath &tail) {
  if (tail.steps.empty()) return;
  if (head.steps.empty()) {
    head = tail;
    return;
  }
  if (!(head.steps.back() == tail.steps.front()))
    throw std::invalid_argument("append_path: paths do not share an endpoint");
  head.steps.insert(head.steps.end(), tail.steps.begin() + 1, tail.steps.end());
}

double euclidean(Cell a, Cell b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

double joint_distance(const JointState &a, const JointState &b) {
  assert(a.size() == b.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += euclidean(a[i], b[i]);
  return d;
}

JointState uniform_joint_state(const GridMap &map, std::size_t n, Rng &rng) {
  const auto &free = map.free_cells();
  if (free.size() < n) throw std::invalid_argument("not enough free cells to sample");
  // Draw rank r among the still-unchosen indices, then shift it past the
  // already chosen (sorted) ones. Exact sampling without replacement.
  std::vector<std::size_t> chosen_sorted;
  chosen_sorted.reserve(n);
  std::vector<Cell> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t r = std::uniform_int_distribution<std::size_t>(0, free.size() - k - 1)(rng);
    for (std::size_t c : chosen_sorted) {
      if (c <= r) ++r;
      else break;
    }
    chosen_sorted.insert(std::upper_bound(chosen_sorted.begin(), chosen_sorted.end(), r), r);
    out.push_back(free[r]);
  }
  return JointState(std::move(out));
}

JointState sample_free(const GridMap &map, std::size_t n, const JointState &goal,
                       double p_goal, Rng &rng) {
  if (unit_draw(rng) < p_goal) return goal;
  return uniform_joint_state(map, n, rng);
}

} // namespace marrt

#pragma once

// Test-only helpers. Nothing here calls into the steering or transition code
// of the library, so the checks stay independent of what they check.

#include <cstdlib>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "marrt/grid_world.hpp"
#include "marrt/joint_space.hpp"

namespace marrt::testing_support {

inline bool blocked(const ProblemInstance &inst, Cell c) {
  if (c.x < 0 || c.y < 0 || c.x >= inst.map.width() || c.y >= inst.map.height()) return true;
  for (Cell o : inst.map.obstacles())
    if (o.x == c.x && o.y == c.y) return true;
  return false;
}

/// Empty string when `steps` is a valid solution, else the first problem.
inline std::string validate_plan(const ProblemInstance &inst, const std::vector<std::vector<Cell>> &steps) {
  const std::size_t n = inst.starts.size();
  if (steps.empty()) return "empty path";
  for (std::size_t t = 0; t < steps.size(); ++t) {
    if (steps[t].size() != n) return "wrong agent count at t=" + std::to_string(t);
    for (std::size_t i = 0; i < n; ++i) {
      if (blocked(inst, steps[t][i])) return "blocked cell at t=" + std::to_string(t);
      for (std::size_t j = i + 1; j < n; ++j)
        if (steps[t][i] == steps[t][j]) return "vertex conflict at t=" + std::to_string(t);
    }
    if (t == 0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const Cell a = steps[t - 1][i], b = steps[t][i];
      if (std::abs(a.x - b.x) + std::abs(a.y - b.y) > 1) return "jump at t=" + std::to_string(t);
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && b == steps[t - 1][j] && steps[t][j] == a && !(a == b))
          return "swap at t=" + std::to_string(t);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(steps.front()[i] == inst.starts[i])) return "does not start at the starts";
    if (!(steps.back()[i] == inst.goals[i])) return "does not end at the goals";
  }
  return {};
}

inline std::string validate_plan(const ProblemInstance &inst, const JointPath &path) {
  std::vector<std::vector<Cell>> steps;
  for (const JointState &s : path.steps) steps.emplace_back(s.begin(), s.end());
  return validate_plan(inst, steps);
}

inline ProblemInstance make_instance(int w, int h, std::vector<Cell> obstacles,
                                     std::vector<Cell> starts, std::vector<Cell> goals) {
  ProblemInstance p;
  p.map = GridMap(w, h, obstacles);
  p.starts = std::move(starts);
  p.goals = std::move(goals);
  return p;
}

} // namespace marrt::testing_support

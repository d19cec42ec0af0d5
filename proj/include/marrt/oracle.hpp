#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

#include "marrt/grid_world.hpp"
#include "marrt/joint_space.hpp"

namespace marrt {

struct OracleLimits {
  int max_cells = 100;
  int max_agents = 3;
  std::int64_t max_expansions = 10'000'000;
};

enum class OracleStatus { Optimal, Infeasible, LimitExceeded };

struct OracleResult {
  OracleStatus status = OracleStatus::LimitExceeded;
  Cost cost;                     ///< meaningful only when Optimal
  std::optional<JointPath> path; ///< an optimal path when Optimal
  std::int64_t expansions = 0;
};

/// Exact minimum n*T cost over the joint state space via A*. Branching is
/// every combination of {stay, 4 moves} per agent that passes
/// is_transition_valid. The heuristic n * max_i manhattan(x_i, goal_i) is
/// consistent for this cost; pass use_heuristic = false for plain Dijkstra.
OracleResult optimal_cost(const ProblemInstance &instance, const OracleLimits &limits = {},
                          bool use_heuristic = true);

class NegativeSuboptimality : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// (returned / optimal - 1) * 100. Throws NegativeSuboptimality when
/// returned < optimal, std::invalid_argument when optimal <= 0.
double suboptimality(Cost returned, Cost optimal);

} // namespace marrt

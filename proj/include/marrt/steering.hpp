#pragma once

#include <optional>

#include "marrt/grid_world.hpp"
#include "marrt/joint_space.hpp"

namespace marrt {

struct SteerResult {
  JointState reached;
  JointPath path;
  Cost cost;
  bool hit_target = false;
};

/// Myopic joint steering. Every timestep each agent independently takes the
/// free move (or stay) that minimizes its Euclidean distance to its component
/// of `target`; the joint transition is checked afterwards and the whole step
/// is dropped on conflict. Stops on reaching `target`, once the accumulated
/// cost exceeds `c_max`, on conflict, or when no agent can move any more.
SteerResult greedy(const GridMap &map, const JointState &origin, const JointState &target,
                   Cost c_max);

/// Cost of the edge `greedy` would produce if it reaches `target` within
/// `c_max`, without materializing the path.
std::optional<Cost> greedy_edge_cost(const GridMap &map, const JointState &origin,
                                     const JointState &target, Cost c_max);

/// Lower bound on any edge between the two states: n * max_i manhattan.
Cost edge_lower_bound(const JointState &a, const JointState &b);

/// Default edge budget 2 * n * (width + height).
inline Cost default_c_max(const GridMap &map, std::size_t n_agents) {
  return {static_cast<std::int64_t>(2 * n_agents * (map.width() + map.height()))};
}

} // namespace marrt

#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "marrt/grid_world.hpp"

namespace marrt {

using Rng = std::mt19937_64;

/// Agent-timesteps. Every agent accrues one unit per timestep, waiting or not.
struct Cost {
  std::int64_t value = 0;

  friend constexpr auto operator<=>(const Cost &, const Cost &) = default;
  friend constexpr Cost operator+(Cost a, Cost b) { return {a.value + b.value}; }
  friend constexpr Cost operator-(Cost a, Cost b) { return {a.value - b.value}; }
  constexpr Cost &operator+=(Cost o) {
    value += o.value;
    return *this;
  }
};

/// One position per agent; index i is agent i.
class JointState {
public:
  JointState() = default;
  explicit JointState(std::vector<Cell> positions) : positions_(std::move(positions)) {}
  JointState(std::initializer_list<Cell> positions) : positions_(positions) {}

  std::size_t size() const { return positions_.size(); }
  Cell operator[](std::size_t i) const { return positions_[i]; }
  Cell &operator[](std::size_t i) { return positions_[i]; }
  auto begin() const { return positions_.begin(); }
  auto end() const { return positions_.end(); }
  std::span<const Cell> cells() const { return positions_; }

  friend bool operator==(const JointState &, const JointState &) = default;

private:
  std::vector<Cell> positions_;
};

struct JointStateHash {
  std::size_t operator()(const JointState &s) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (Cell c : s) {
      std::uint64_t v = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.x)) << 32) |
                        static_cast<std::uint32_t>(c.y);
      h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

/// Timestep-indexed joint states; steps[0] is the origin.
struct JointPath {
  std::vector<JointState> steps;

  std::size_t transitions() const { return steps.empty() ? 0 : steps.size() - 1; }
  friend bool operator==(const JointPath &, const JointPath &) = default;
};

/// Distinct positions, each statically free.
bool is_valid_state(const GridMap &map, const JointState &s);

/// Stay-or-4-neighbor per agent, no vertex conflict in `to`, no swap between
/// any pair. An agent entering a cell vacated by a non-swapping agent is fine.
bool is_transition_valid(const JointState &from, const JointState &to);

/// n * T for a path with T transitions.
Cost path_cost(const JointPath &p);
inline Cost transition_cost(std::size_t n_agents, std::size_t transitions) {
  return {static_cast<std::int64_t>(n_agents * transitions)};
}

/// Appends `tail` to `head`; tail.steps[0] must equal head's last state.
void append_path(JointPath &head, const JointPath &tail);

double euclidean(Cell a, Cell b);
inline int manhattan(Cell a, Cell b) {
  return (a.x > b.x ? a.x - b.x : b.x - a.x) + (a.y > b.y ? a.y - b.y : b.y - a.y);
}

/// Sum of per-agent Euclidean distances.
double joint_distance(const JointState &a, const JointState &b);

/// n distinct free cells, uniform over ordered tuples.
JointState uniform_joint_state(const GridMap &map, std::size_t n, Rng &rng);

/// With probability p_goal returns `goal`, else a uniform joint state.
/// Always draws one uniform real first so callers can layer extra branches on
/// the same stream.
JointState sample_free(const GridMap &map, std::size_t n, const JointState &goal,
                       double p_goal, Rng &rng);

inline double unit_draw(Rng &rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

} // namespace marrt

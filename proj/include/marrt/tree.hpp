#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "marrt/joint_space.hpp"

namespace marrt {

/// Stable node handle. Handles are issued in insertion order and never reused
/// within one tree.
enum class NodeId : std::uint32_t {};

inline std::uint32_t to_index(NodeId id) { return static_cast<std::uint32_t>(id); }

struct Node {
  NodeId id{};
  JointState state;
  std::optional<NodeId> parent;
  Cost cost_to_root{0};
  std::vector<NodeId> children;
  JointPath edge_from_parent;  ///< empty for the root

  std::size_t child_count() const { return children.size(); }
};

class DuplicateState : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};
class CycleError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};
class HasChildren : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};
class IsRoot : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Search tree over joint states with an optional node cap. At most one node
/// per joint state. Costs are kept exact: rewiring pushes the cost change down
/// the whole subtree immediately.
class Tree {
public:
  /// `goal` marks which state is recorded in goal_nodes(). `capacity` is the
  /// cap enforced by the planners (the tree itself never refuses an insert).
  Tree(JointState root, JointState goal, std::optional<std::size_t> capacity = std::nullopt);

  NodeId root() const { return root_; }
  std::size_t size() const { return live_.size(); }
  std::optional<std::size_t> capacity() const { return capacity_; }
  /// True when the node count has reached or passed the cap.
  bool at_capacity() const { return capacity_ && size() >= *capacity_; }

  bool contains(NodeId id) const;
  const Node &node(NodeId id) const;
  std::optional<NodeId> find(const JointState &state) const;

  /// Live node ids in insertion order.
  std::span<const NodeId> ids() const { return live_; }
  std::span<const NodeId> goal_nodes() const { return goal_nodes_; }
  const JointState &goal_state() const { return goal_; }

  NodeId add_node(JointState state, NodeId parent, JointPath edge);
  void rewire(NodeId child, NodeId new_parent, JointPath edge);
  void remove_childless(NodeId id);

  /// True if `ancestor` lies on the root path of `id` (or equals it).
  bool is_ancestor(NodeId ancestor, NodeId id) const;

  /// Concatenated edges from the root to `id`.
  JointPath root_path(NodeId id) const;

  /// One node per line: `id parent_id cost x,y x,y ...`; the root's parent is -1.
  void dump(std::ostream &out) const;

private:
  Node &mut(NodeId id);
  void shift_subtree_cost(NodeId id, Cost delta);

  std::vector<Node> slots_;
  std::vector<bool> alive_;
  std::vector<NodeId> live_;
  std::unordered_map<JointState, NodeId, JointStateHash> index_;
  std::vector<NodeId> goal_nodes_;
  JointState goal_;
  NodeId root_{};
  std::optional<std::size_t> capacity_;
};

/// Node minimizing joint_distance to `x`; ties go to the earliest insertion.
NodeId nearest(const Tree &tree, const JointState &x);

/// k nearest nodes, k = min(|V|, ceil(k_rrg * ln(|V| + 1))), sorted by
/// (distance, insertion order). The first element is nearest(tree, x).
std::vector<NodeId> near_set(const Tree &tree, const JointState &x, double k_rrg);
std::size_t near_set_size(std::size_t node_count, double k_rrg);

/// Removes one childless node picked uniformly among those that are not the
/// root, not a goal node and not in `protect`. Returns the removed id.
std::optional<NodeId> force_removal(Tree &tree, std::span<const NodeId> protect, Rng &rng);

} // namespace marrt

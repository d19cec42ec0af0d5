#include "marrt/tree.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace marrt {

Tree::Tree(JointState root, JointState goal, std::optional<std::size_t> capacity)
    : goal_(std::move(goal)), capacity_(capacity) {
  Node n;
  n.id = NodeId{0};
  n.state = std::move(root);
  slots_.push_back(std::move(n));
  alive_.push_back(true);
  live_.push_back(NodeId{0});
  index_.emplace(slots_[0].state, NodeId{0});
  if (slots_[0].state == goal_) goal_nodes_.push_back(NodeId{0});
}

bool Tree::contains(NodeId id) const {
  return to_index(id) < alive_.size() && alive_[to_index(id)];
}

const Node &Tree::node(NodeId id) const {
  if (!contains(id)) throw std::out_of_range("no live node " + std::to_string(to_index(id)));
  return slots_[to_index(id)];
}

Node &Tree::mut(NodeId id) { return const_cast<Node &>(std::as_const(*this).node(id)); }

std::optional<NodeId> Tree::find(const JointState &state) const {
  if (auto it = index_.find(state); it != index_.end()) return it->second;
  return std::nullopt;
}

NodeId Tree::add_node(JointState state, NodeId parent, JointPath edge) {
  if (index_.contains(state)) throw DuplicateState("state already present in tree");
  const Node &p = node(parent);
  if (edge.steps.empty() || !(edge.steps.front() == p.state) || !(edge.steps.back() == state))
    throw std::invalid_argument("edge does not connect parent to new state");

  const NodeId id{static_cast<std::uint32_t>(slots_.size())};
  Node n;
  n.id = id;
  n.parent = parent;
  n.cost_to_root = p.cost_to_root + path_cost(edge);
  n.edge_from_parent = std::move(edge);
  n.state = std::move(state);
  mut(parent).children.push_back(id);
  index_.emplace(n.state, id);
  if (n.state == goal_) goal_nodes_.push_back(id);
  slots_.push_back(std::move(n));
  alive_.push_back(true);
  live_.push_back(id);
  return id;
}

bool Tree::is_ancestor(NodeId ancestor, NodeId id) const {
  std::optional<NodeId> cur = id;
  while (cur) {
    if (*cur == ancestor) return true;
    cur = node(*cur).parent;
  }
  return false;
}

void Tree::shift_subtree_cost(NodeId id, Cost delta) {
  std::vector<NodeId> stack{id};
  while (!stack.empty()) {
    Node &n = mut(stack.back());
    stack.pop_back();
    n.cost_to_root += delta;
    stack.insert(stack.end(), n.children.begin(), n.children.end());
  }
}

void Tree::rewire(NodeId child, NodeId new_parent, JointPath edge) {
  if (child == root_) throw CycleError("cannot give the root a parent");
  if (is_ancestor(child, new_parent)) throw CycleError("new parent is a descendant of the child");
  Node &c = mut(child);
  const Node &np = node(new_parent);
  if (edge.steps.empty() || !(edge.steps.front() == np.state) ||
      !(edge.steps.back() == c.state))
    throw std::invalid_argument("edge does not connect new parent to child");

  auto &siblings = mut(*c.parent).children;
  siblings.erase(std::find(siblings.begin(), siblings.end(), child));
  mut(new_parent).children.push_back(child);

  const Cost updated = np.cost_to_root + path_cost(edge);
  const Cost delta = updated - c.cost_to_root;
  c.parent = new_parent;
  c.edge_from_parent = std::move(edge);
  shift_subtree_cost(child, delta);
}

void Tree::remove_childless(NodeId id) {
  if (id == root_) throw IsRoot("cannot remove the root");
  Node &n = mut(id);
  if (!n.children.empty()) throw HasChildren("node still has children");

  auto &siblings = mut(*n.parent).children;
  siblings.erase(std::find(siblings.begin(), siblings.end(), id));
  index_.erase(n.state);
  if (auto g = std::find(goal_nodes_.begin(), goal_nodes_.end(), id); g != goal_nodes_.end())
    goal_nodes_.erase(g);
  live_.erase(std::lower_bound(live_.begin(), live_.end(), id));
  alive_[to_index(id)] = false;
  n = Node{};
  n.id = id;
}

JointPath Tree::root_path(NodeId id) const {
  std::vector<const Node *> chain;
  for (std::optional<NodeId> cur = id; cur; cur = node(*cur).parent) chain.push_back(&node(*cur));
  JointPath out;
  out.steps.push_back(chain.back()->state);
  for (auto it = chain.rbegin() + 1; it != chain.rend(); ++it)
    append_path(out, (*it)->edge_from_parent);
  return out;
}

void Tree::dump(std::ostream &out) const {
  for (NodeId id : live_) {
    const Node &n = node(id);
    out << to_index(id) << ' ' << (n.parent ? static_cast<long long>(to_index(*n.parent)) : -1LL)
        << ' ' << n.cost_to_root.value;
    for (Cell c : n.state) out << ' ' << c.x << ',' << c.y;
    out << '\n';
  }
}

NodeId nearest(const Tree &tree, const JointState &x) {
  NodeId best = tree.root();
  double best_d = std::numeric_limits<double>::infinity();
  for (NodeId id : tree.ids()) {
    double d = joint_distance(tree.node(id).state, x);
    if (d < best_d) {
      best_d = d;
      best = id;
    }
  }
  return best;
}

std::size_t near_set_size(std::size_t node_count, double k_rrg) {
  const auto k = static_cast<std::size_t>(
      std::ceil(k_rrg * std::log(static_cast<double>(node_count) + 1.0)));
  return std::clamp<std::size_t>(k, 1, node_count);
}

std::vector<NodeId> near_set(const Tree &tree, const JointState &x, double k_rrg) {
  std::vector<std::pair<double, NodeId>> scored;
  scored.reserve(tree.size());
  for (NodeId id : tree.ids()) scored.emplace_back(joint_distance(tree.node(id).state, x), id);
  const std::size_t k = near_set_size(scored.size(), k_rrg);
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end());
  std::vector<NodeId> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(scored[i].second);
  return out;
}

std::optional<NodeId> force_removal(Tree &tree, std::span<const NodeId> protect, Rng &rng) {
  auto excluded = [&](NodeId id) {
    return id == tree.root() ||
           std::find(protect.begin(), protect.end(), id) != protect.end() ||
           std::find(tree.goal_nodes().begin(), tree.goal_nodes().end(), id) !=
               tree.goal_nodes().end();
  };
  std::vector<NodeId> leaves;
  for (NodeId id : tree.ids())
    if (tree.node(id).children.empty() && !excluded(id)) leaves.push_back(id);
  if (leaves.empty()) return std::nullopt;
  const NodeId victim =
      leaves[std::uniform_int_distribution<std::size_t>(0, leaves.size() - 1)(rng)];
  tree.remove_childless(victim);
  return victim;
}

} // namespace marrt

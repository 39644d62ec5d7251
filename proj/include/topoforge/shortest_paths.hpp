#pragma once

// Deterministic shortest-path primitives.
//
// Dijkstra pops nodes by (distance, node id). A node's parent arc is the
// smallest arc id among the equal-distance candidates relaxed from nodes
// popped before it. With strictly positive weights that is every
// equal-distance parent; with zero-weight arcs the pop order decides.
//
// A reverse tree is rooted at a destination and follows arcs backwards, so
// parent_arc[v] is the next hop out of v toward the root. Hop-by-hop
// forwarding on a topology is modelled with these trees.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "topoforge/error.hpp"
#include "topoforge/network.hpp"

namespace topoforge {

enum class Direction { kForward, kReverse };

inline constexpr std::size_t kDefaultPathCap = 1000;

template <typename W>
struct SpTree {
  NodeId root = 0;
  Direction direction = Direction::kForward;
  std::vector<ArcId> parent_arc;
  std::vector<std::optional<W>> dist;

  bool reached(NodeId v) const { return dist[v].has_value(); }

  // Node on the root side of v's parent arc, or -1 for the root and
  // unreached nodes.
  NodeId parent(const Network& net, NodeId v) const {
    const ArcId a = parent_arc[v];
    if (a == kNoArc) return -1;
    return direction == Direction::kForward ? net.arc(a).tail
                                            : net.arc(a).head;
  }

  bool is_tree_arc(const Network& net, ArcId a) const {
    const Arc& arc = net.arc(a);
    const NodeId child =
        direction == Direction::kForward ? arc.head : arc.tail;
    return parent_arc[child] == a;
  }
};

template <typename W>
SpTree<W> shortest_path_tree(const Network& net, std::span<const W> w,
                             NodeId root,
                             Direction dir = Direction::kForward) {
  if (!net.has_node(root)) throw InvalidInputError("unknown root node");
  if (w.size() != net.num_arcs()) {
    throw InvalidInputError("weight vector length differs from arc count");
  }
  const std::size_t n = net.num_nodes();
  SpTree<W> tree;
  tree.root = root;
  tree.direction = dir;
  tree.parent_arc.assign(n, kNoArc);
  tree.dist.assign(n, std::nullopt);

  using Entry = std::pair<W, NodeId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
  std::vector<char> done(n, 0);
  tree.dist[root] = W{};
  heap.emplace(W{}, root);
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (done[u]) continue;
    done[u] = 1;
    const auto arcs = dir == Direction::kForward ? net.out_arcs(u)
                                                 : net.in_arcs(u);
    for (ArcId a : arcs) {
      const Arc& arc = net.arc(a);
      const NodeId v = dir == Direction::kForward ? arc.head : arc.tail;
      if (done[v]) continue;
      W nd = d + w[a];
      auto& dv = tree.dist[v];
      if (!dv || nd < *dv) {
        dv = nd;
        tree.parent_arc[v] = a;
        heap.emplace(std::move(nd), v);
      } else if (nd == *dv && a < tree.parent_arc[v]) {
        tree.parent_arc[v] = a;
      }
    }
  }
  return tree;
}

template <typename W>
SpTree<W> shortest_path_tree(const Network& net, const std::vector<W>& w,
                             NodeId root,
                             Direction dir = Direction::kForward) {
  return shortest_path_tree(net, std::span<const W>(w), root, dir);
}

// Follows next hops of a destination-rooted tree from src.
template <typename W>
Path route_from_tree(const Network& net, const SpTree<W>& to_dst,
                     NodeId src) {
  if (to_dst.direction != Direction::kReverse) {
    throw InvalidInputError("route_from_tree needs a destination-rooted tree");
  }
  if (!to_dst.reached(src)) {
    throw UnreachableError("node " + std::to_string(src) +
                           " cannot reach node " +
                           std::to_string(to_dst.root));
  }
  Path p{src, to_dst.root, {}};
  NodeId at = src;
  while (at != to_dst.root) {
    const ArcId a = to_dst.parent_arc[at];
    p.arcs.push_back(a);
    at = net.arc(a).head;
  }
  return p;
}

template <typename W>
Path route_for_demand(const Network& net, std::span<const W> w, NodeId src,
                      NodeId dst) {
  if (!net.has_node(src) || !net.has_node(dst)) {
    throw InvalidInputError("unknown demand endpoint");
  }
  return route_from_tree(net,
                         shortest_path_tree(net, w, dst, Direction::kReverse),
                         src);
}

template <typename W>
Path route_for_demand(const Network& net, const std::vector<W>& w, NodeId src,
                      NodeId dst) {
  return route_for_demand(net, std::span<const W>(w), src, dst);
}

// Every minimum-weight src->dst path, in lexicographic arc-id order.
template <typename W>
std::vector<Path> all_shortest_paths(const Network& net, std::span<const W> w,
                                     NodeId src, NodeId dst,
                                     std::size_t cap = kDefaultPathCap) {
  if (cap < 1) throw InvalidInputError("path cap must be at least 1");
  const SpTree<W> to_dst = shortest_path_tree(net, w, dst, Direction::kReverse);
  if (!to_dst.reached(src)) {
    throw UnreachableError("node " + std::to_string(src) +
                           " cannot reach node " + std::to_string(dst));
  }
  std::vector<Path> out;
  std::vector<ArcId> stack;
  std::vector<char> on_path(net.num_nodes(), 0);

  // Arc a = (u, v) is tight when it lies on some shortest path toward dst.
  auto tight = [&](ArcId a) {
    const Arc& arc = net.arc(a);
    const auto& du = to_dst.dist[arc.tail];
    const auto& dv = to_dst.dist[arc.head];
    return du && dv && *dv + w[a] == *du;
  };

  std::function<void(NodeId)> dfs = [&](NodeId u) {
    if (u == dst) {
      if (out.size() == cap) {
        throw CapExceededError(cap, "more than " + std::to_string(cap) +
                                        " shortest paths from " +
                                        std::to_string(src) + " to " +
                                        std::to_string(dst));
      }
      out.push_back(Path{src, dst, stack});
      return;
    }
    on_path[u] = 1;
    for (ArcId a : net.out_arcs(u)) {
      const NodeId v = net.arc(a).head;
      if (on_path[v] || !tight(a)) continue;
      stack.push_back(a);
      dfs(v);
      stack.pop_back();
    }
    on_path[u] = 0;
  };
  dfs(src);
  return out;
}

template <typename W>
std::vector<Path> all_shortest_paths(const Network& net,
                                     const std::vector<W>& w, NodeId src,
                                     NodeId dst,
                                     std::size_t cap = kDefaultPathCap) {
  return all_shortest_paths(net, std::span<const W>(w), src, dst, cap);
}

template <typename W>
std::size_t tree_depth(const Network& net, const SpTree<W>& tree, NodeId v) {
  std::size_t depth = 0;
  for (NodeId at = v; at != tree.root; at = tree.parent(net, at)) ++depth;
  return depth;
}

template <typename W>
NodeId lowest_common_ancestor(const Network& net, const SpTree<W>& tree,
                              NodeId u, NodeId v) {
  if (!net.has_node(u) || !net.has_node(v) || !tree.reached(u) ||
      !tree.reached(v)) {
    throw NotInTreeError("LCA query on a node outside the tree");
  }
  std::size_t du = tree_depth(net, tree, u);
  std::size_t dv = tree_depth(net, tree, v);
  while (du > dv) {
    u = tree.parent(net, u);
    --du;
  }
  while (dv > du) {
    v = tree.parent(net, v);
    --dv;
  }
  while (u != v) {
    u = tree.parent(net, u);
    v = tree.parent(net, v);
  }
  return u;
}

}  // namespace topoforge

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "topoforge/error.hpp"

namespace topoforge {

using NodeId = std::int32_t;
using ArcId = std::int32_t;
using DemandId = std::int32_t;

inline constexpr ArcId kNoArc = -1;

struct Node {
  NodeId id = 0;
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Node&) const = default;
};

struct Arc {
  ArcId id = 0;
  NodeId tail = 0;
  NodeId head = 0;
  double capacity = 0.0;

  bool operator==(const Arc&) const = default;
};

// Directed graph with dense ids. Immutable once built; adjacency lists are
// sorted by arc id so every traversal order is deterministic.
class Network {
 public:
  Network() = default;

  Network(std::vector<Node> nodes, std::vector<Arc> arcs)
      : nodes_(std::move(nodes)), arcs_(std::move(arcs)) {
    const auto n = static_cast<NodeId>(nodes_.size());
    for (NodeId v = 0; v < n; ++v) {
      if (nodes_[v].id != v) {
        throw InvalidInputError("node ids must be dense 0..|V|-1 (got " +
                                std::to_string(nodes_[v].id) + " at " +
                                std::to_string(v) + ")");
      }
    }
    out_.resize(nodes_.size());
    in_.resize(nodes_.size());
    for (ArcId a = 0; a < static_cast<ArcId>(arcs_.size()); ++a) {
      const Arc& arc = arcs_[a];
      if (arc.id != a) {
        throw InvalidInputError("arc ids must be dense 0..|A|-1");
      }
      if (arc.tail < 0 || arc.tail >= n || arc.head < 0 || arc.head >= n) {
        throw InvalidInputError("arc " + std::to_string(a) +
                                " references an unknown node");
      }
      if (arc.tail == arc.head) {
        throw InvalidInputError("arc " + std::to_string(a) + " is a self-loop");
      }
      if (!(arc.capacity > 0.0) || !std::isfinite(arc.capacity)) {
        throw InvalidInputError("arc " + std::to_string(a) +
                                " needs a positive capacity");
      }
      out_[arc.tail].push_back(a);
      in_[arc.head].push_back(a);
    }
  }

  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_arcs() const { return arcs_.size(); }

  const Node& node(NodeId v) const { return nodes_.at(v); }
  const Arc& arc(ArcId a) const { return arcs_.at(a); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Arc>& arcs() const { return arcs_; }

  std::span<const ArcId> out_arcs(NodeId v) const { return out_.at(v); }
  std::span<const ArcId> in_arcs(NodeId v) const { return in_.at(v); }

  bool has_node(NodeId v) const {
    return v >= 0 && v < static_cast<NodeId>(nodes_.size());
  }

  bool operator==(const Network& other) const {
    return nodes_ == other.nodes_ && arcs_ == other.arcs_;
  }

 private:
  std::vector<Node> nodes_;
  std::vector<Arc> arcs_;
  std::vector<std::vector<ArcId>> out_;
  std::vector<std::vector<ArcId>> in_;
};

struct Path {
  NodeId src = 0;
  NodeId dst = 0;
  std::vector<ArcId> arcs;

  bool operator==(const Path&) const = default;
  auto operator<=>(const Path&) const = default;
};

inline std::vector<NodeId> path_nodes(const Network& net, const Path& p) {
  std::vector<NodeId> nodes{p.src};
  for (ArcId a : p.arcs) nodes.push_back(net.arc(a).head);
  return nodes;
}

// Chains head->tail from src to dst without revisiting a node.
inline bool is_simple_path(const Network& net, const Path& p) {
  std::vector<char> seen(net.num_nodes(), 0);
  NodeId at = p.src;
  if (!net.has_node(at)) return false;
  seen[at] = 1;
  for (ArcId a : p.arcs) {
    if (a < 0 || a >= static_cast<ArcId>(net.num_arcs())) return false;
    const Arc& arc = net.arc(a);
    if (arc.tail != at || seen[arc.head]) return false;
    at = arc.head;
    seen[at] = 1;
  }
  return at == p.dst;
}

template <typename W>
W path_resource(const Path& p, std::span<const W> metric) {
  W total{};
  for (ArcId a : p.arcs) total += metric[a];
  return total;
}

template <typename W>
W path_resource(const Path& p, const std::vector<W>& metric) {
  return path_resource(p, std::span<const W>(metric));
}

}  // namespace topoforge

#pragma once

// Shared fixtures, random generators and brute-force oracles for the tests.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "topoforge/topoforge.hpp"

namespace tf_test {

using namespace topoforge;

inline Network make_network(int n, const std::vector<std::pair<int, int>>& arcs,
                            double capacity = 40.0) {
  std::vector<Node> nodes;
  for (int v = 0; v < n; ++v) nodes.push_back({v, static_cast<double>(v), 0.0});
  std::vector<Arc> list;
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    list.push_back({static_cast<ArcId>(a), arcs[a].first, arcs[a].second, capacity});
  }
  return Network(std::move(nodes), std::move(list));
}

// Canonical 4-node instance, 0-based: 0->1->3 is fast and lossy, 0->2->3 slow
// and clean, 0->3 a compromise.
struct FixtureD {
  Network net = make_network(4, {{0, 1}, {1, 3}, {0, 2}, {2, 3}, {0, 3}});
  MetricSet ms{{"delay", "loss"}, {{1, 1, 10, 10, 5}, {10, 10, 1, 1, 5}}};
  Demand k0 = make_demand(0, 0, 3, {9.0, 9.0});

  static constexpr ArcId kFastA = 0, kFastB = 1, kCleanA = 2, kCleanB = 3,
                         kDirect = 4;

  InstanceSpec instance() const {
    InstanceSpec inst;
    inst.network = net;
    inst.metrics = ms;
    inst.demands = {k0};
    inst.provenance.source = "D";
    return inst;
  }
};

// Two Pareto-incomparable routes A(1,10) and B(10,1) plus a compromise
// C(6,6). With bounds (6,6) only C is feasible, but the feasible multiplier
// range collapses to the single point where A and B tie.
struct FixtureGap {
  Network net = make_network(5, {{0, 1}, {1, 4}, {0, 2}, {2, 4}, {0, 3}, {3, 4}});
  MetricSet ms{{"delay", "loss"}, {{0.5, 0.5, 5, 5, 3, 3}, {5, 5, 0.5, 0.5, 3, 3}}};
  Demand k = make_demand(0, 0, 4, {6.0, 6.0});
};

// Exactly two incomparable routes and no compromise: infeasible under tight
// cross bounds.
struct FixtureNoCompromise {
  Network net = make_network(4, {{0, 1}, {1, 3}, {0, 2}, {2, 3}});
  MetricSet ms{{"delay", "loss"}, {{1, 1, 10, 10}, {10, 10, 1, 1}}};
};

// ----------------------------------------------------------- generators

struct RandomInstance {
  Network net;
  MetricSet ms;
  std::vector<Demand> demands;
};

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline double unit(std::mt19937_64& rng) {
  return std::ldexp(static_cast<double>(rng() >> 11), -53);
}

// Random digraph with optional parallel arcs. Integer metric values keep
// exact ties frequent, which is where tie handling breaks.
inline Network random_digraph(std::mt19937_64& rng, int n, double density,
                              bool parallel_arcs = true) {
  std::vector<std::pair<int, int>> arcs;
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      if (u == v) continue;
      if (unit(rng) < density) arcs.push_back({u, v});
      if (parallel_arcs && unit(rng) < density * 0.1) arcs.push_back({u, v});
    }
  }
  std::shuffle(arcs.begin(), arcs.end(), rng);
  return make_network(n, arcs);
}

inline MetricSet random_metrics(std::mt19937_64& rng, std::size_t num_arcs,
                                int lo = 0, int hi = 20) {
  std::vector<double> delay(num_arcs), loss(num_arcs);
  for (auto& d : delay) d = uniform_int(rng, lo, hi);
  for (auto& l : loss) l = uniform_int(rng, lo, hi);
  return MetricSet({"delay", "loss"}, {delay, loss});
}

// ------------------------------------------------------------- oracles

// Every simple path src -> dst, by plain DFS over the arc list.
inline std::vector<Path> enumerate_simple_paths(const Network& net, NodeId src,
                                                NodeId dst) {
  std::vector<Path> out;
  std::vector<char> on_path(net.num_nodes(), 0);
  std::vector<ArcId> arcs;
  std::function<void(NodeId)> dfs = [&](NodeId v) {
    if (v == dst) {
      out.push_back({src, dst, arcs});
      return;
    }
    on_path[v] = 1;
    for (const Arc& a : net.arcs()) {
      if (a.tail != v || on_path[a.head]) continue;
      arcs.push_back(a.id);
      dfs(a.head);
      arcs.pop_back();
    }
    on_path[v] = 0;
  };
  if (src != dst) dfs(src);
  return out;
}

inline Ticks sum_ticks(const Path& p, const std::vector<Ticks>& m) {
  Ticks s = 0;
  for (ArcId a : p.arcs) s += m[a];
  return s;
}

inline bool feasible_by_oracle(const Path& p, const MetricSet& ms, const Demand& k) {
  for (std::size_t t = 0; t < ms.size(); ++t) {
    if (sum_ticks(p, ms.ticks(t)) > k.bounds[t]) return false;
  }
  return true;
}

// Minimum metric-0 cost over feasible simple paths.
inline std::optional<Ticks> csp_optimum_by_oracle(const Network& net,
                                                  const MetricSet& ms,
                                                  const Demand& k) {
  std::optional<Ticks> best;
  for (const Path& p : enumerate_simple_paths(net, k.src, k.dst)) {
    if (!feasible_by_oracle(p, ms, k)) continue;
    const Ticks c = sum_ticks(p, ms.ticks(0));
    if (!best || c < *best) best = c;
  }
  return best;
}

// Distances from every node to root by Bellman-Ford, independent of Dijkstra.
inline std::vector<std::optional<std::int64_t>> distances_by_oracle(
    const Network& net, const std::vector<std::int64_t>& w, NodeId root,
    bool forward) {
  std::vector<std::optional<std::int64_t>> dist(net.num_nodes());
  dist[root] = 0;
  for (std::size_t round = 0; round < net.num_nodes(); ++round) {
    for (const Arc& a : net.arcs()) {
      const NodeId from = forward ? a.tail : a.head;
      const NodeId to = forward ? a.head : a.tail;
      if (dist[from] && (!dist[to] || *dist[from] + w[a.id] < *dist[to])) {
        dist[to] = *dist[from] + w[a.id];
      }
    }
  }
  return dist;
}

// Picks bounds between the extremes of the pair's simple paths so that random
// demands mix feasible and infeasible cases.
inline std::optional<Demand> random_demand(std::mt19937_64& rng, const Network& net,
                                           const MetricSet& ms, DemandId id) {
  const int n = static_cast<int>(net.num_nodes());
  if (n < 2) return std::nullopt;
  const NodeId src = uniform_int(rng, 0, n - 1);
  NodeId dst = uniform_int(rng, 0, n - 2);
  if (dst >= src) ++dst;
  const auto paths = enumerate_simple_paths(net, src, dst);
  if (paths.empty()) return std::nullopt;
  Demand k{id, src, dst, {}};
  for (std::size_t t = 0; t < ms.size(); ++t) {
    Ticks lo = kUnboundedTicks, hi = 0;
    for (const Path& p : paths) {
      lo = std::min(lo, sum_ticks(p, ms.ticks(t)));
      hi = std::max(hi, sum_ticks(p, ms.ticks(t)));
    }
    // Squared draw skews toward tight bounds so infeasible demands are common.
    const double f = unit(rng) * unit(rng);
    k.bounds.push_back(lo + static_cast<Ticks>(f * static_cast<double>(hi - lo)));
  }
  return k;
}

// Demands with a nonempty feasible set, strongly tied to the tested routines.
inline std::vector<Demand> feasible_random_demands(std::mt19937_64& rng,
                                                   const Network& net,
                                                   const MetricSet& ms, int count) {
  std::vector<Demand> out;
  for (int tries = 0; tries < count * 20 && static_cast<int>(out.size()) < count; ++tries) {
    auto k = random_demand(rng, net, ms, static_cast<DemandId>(out.size()));
    if (k && csp_optimum_by_oracle(net, ms, *k)) out.push_back(*k);
  }
  return out;
}

// Unit-square geometric digraph that is strongly connected, for designers.
inline Network connected_geometric(std::mt19937_64& rng, int n) {
  for (;;) {
    try {
      return synth_network(n, 0.45 + 0.3 * unit(rng), rng());
    } catch (const DisconnectedError&) {
    }
  }
}

}  // namespace tf_test

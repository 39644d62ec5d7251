#pragma once

// Greedy multi-topology weight design: random restarts refined by a local
// search whose neighbourhood is built from delta-weights, the smallest
// single-arc weight changes that alter some shortest path tree.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "topoforge/csp.hpp"
#include "topoforge/error.hpp"
#include "topoforge/metrics.hpp"
#include "topoforge/network.hpp"
#include "topoforge/parallel.hpp"
#include "topoforge/shortest_paths.hpp"

namespace topoforge {

using WeightVector = std::vector<std::int64_t>;

inline constexpr std::int64_t kMaxIgpWeight = 65535;

struct SearchConfig {
  int max_iterations = 50;
  std::uint64_t rng_seed = 1;
  std::int64_t weight_min = 0;
  std::int64_t weight_max = kMaxIgpWeight;
  std::int64_t step_epsilon = 1;
  std::size_t tamcra_paths = kDefaultTamcraPaths;
  // Apply the down delta-weight as an increase, as the pseudo-code prints it.
  bool literal_down_sign = false;
  // Fill off-path arcs of a fallback path with fresh random weights instead
  // of the maximum weight.
  bool literal_fallback_weights = false;
};

struct RealTopology {
  WeightVector weights;
  std::vector<DemandId> assigned;

  bool operator==(const RealTopology&) const = default;
};

struct DeltaWeights {
  std::vector<std::optional<std::int64_t>> up;    // nullopt = infinite
  std::vector<std::optional<std::int64_t>> down;  // nullopt = infinite
};

// Demands whose hop-by-hop route under w meets every bound, sorted by id.
inline std::vector<DemandId> accepted_demands(const Network& net,
                                              const MetricSet& ms,
                                              const WeightVector& w,
                                              const std::vector<Demand>& demands) {
  std::map<NodeId, std::vector<const Demand*>> by_dst;
  for (const Demand& k : demands) by_dst[k.dst].push_back(&k);
  std::vector<DemandId> accepted;
  for (const auto& [dst, group] : by_dst) {
    const auto tree = shortest_path_tree(net, w, dst, Direction::kReverse);
    for (const Demand* k : group) {
      if (!tree.reached(k->src)) continue;
      std::vector<Ticks> used(ms.size(), 0);
      for (NodeId at = k->src; at != dst;) {
        const ArcId a = tree.parent_arc[at];
        for (std::size_t t = 0; t < ms.size(); ++t) used[t] += ms.ticks(t)[a];
        at = net.arc(a).head;
      }
      bool ok = true;
      for (std::size_t t = 0; t < ms.size(); ++t) {
        if (used[t] > k->bounds[t]) ok = false;
      }
      if (ok) accepted.push_back(k->id);
    }
  }
  std::sort(accepted.begin(), accepted.end());
  return accepted;
}

inline DeltaWeights compute_delta_weights(const Network& net,
                                          const WeightVector& w) {
  const std::size_t n = net.num_nodes();
  DeltaWeights deltas;
  deltas.up.assign(net.num_arcs(), std::nullopt);
  deltas.down.assign(net.num_arcs(), std::nullopt);
  auto relax = [](std::optional<std::int64_t>& slot, std::int64_t v) {
    if (!slot || v < *slot) slot = v;
  };

  for (NodeId root = 0; root < static_cast<NodeId>(n); ++root) {
    const auto tree = shortest_path_tree(net, w, root);
    std::vector<int> depth(n, -1);
    depth[root] = 0;
    auto depth_of = [&](NodeId v) {
      std::vector<NodeId> chain;
      while (depth[v] < 0) {
        chain.push_back(v);
        v = tree.parent(net, v);
      }
      for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
        depth[*it] = depth[tree.parent(net, *it)] + 1;
      }
    };
    for (NodeId v = 0; v < static_cast<NodeId>(n); ++v) {
      if (tree.reached(v)) depth_of(v);
    }

    for (const Arc& arc : net.arcs()) {
      const NodeId s = arc.tail;
      const NodeId t = arc.head;
      // Arcs into the root can never join its tree.
      if (!tree.reached(s) || t == root || tree.parent_arc[t] == arc.id) {
        continue;
      }
      const std::int64_t slack = *tree.dist[s] + w[arc.id] - *tree.dist[t];
      relax(deltas.down[arc.id], slack);
      NodeId a = s;
      NodeId b = t;
      while (depth[a] > depth[b]) {
        relax(deltas.down[tree.parent_arc[a]], slack);
        a = tree.parent(net, a);
      }
      while (depth[b] > depth[a]) {
        relax(deltas.up[tree.parent_arc[b]], slack);
        b = tree.parent(net, b);
      }
      while (a != b) {
        relax(deltas.down[tree.parent_arc[a]], slack);
        relax(deltas.up[tree.parent_arc[b]], slack);
        a = tree.parent(net, a);
        b = tree.parent(net, b);
      }
    }
  }
  return deltas;
}

// Single-arc moves past each delta threshold: for every arc, the lowered
// vector then the raised one. Moves clamped back onto w are dropped.
inline std::vector<WeightVector> generate_neighborhood(
    const Network& net, const WeightVector& w, const DeltaWeights& deltas,
    const SearchConfig& cfg) {
  std::vector<WeightVector> out;
  auto clamp = [&](std::int64_t v) {
    return std::clamp(v, cfg.weight_min, cfg.weight_max);
  };
  for (ArcId a = 0; a < static_cast<ArcId>(net.num_arcs()); ++a) {
    if (const auto& d = deltas.down[a]) {
      const std::int64_t moved =
          cfg.literal_down_sign ? clamp(w[a] + *d)
                                : clamp(w[a] - *d - cfg.step_epsilon);
      if (moved != w[a]) {
        out.push_back(w);
        out.back()[a] = moved;
      }
    }
    if (const auto& u = deltas.up[a]) {
      const std::int64_t moved = clamp(w[a] + *u + cfg.step_epsilon);
      if (moved != w[a]) {
        out.push_back(w);
        out.back()[a] = moved;
      }
    }
  }
  return out;
}

// Returns the best vector visited; the walk always moves to the best
// neighbour, even when it is worse than the current one.
inline WeightVector local_search(const Network& net, const MetricSet& ms,
                                 const WeightVector& w0,
                                 const std::vector<Demand>& demands,
                                 const SearchConfig& cfg) {
  if (cfg.max_iterations < 1) {
    throw InvalidInputError("max_iterations must be at least 1");
  }
  WeightVector best = w0;
  std::size_t best_count = accepted_demands(net, ms, w0, demands).size();
  WeightVector current = w0;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    if (best_count == demands.size()) break;
    const auto neighbours = generate_neighborhood(
        net, current, compute_delta_weights(net, current), cfg);
    if (neighbours.empty()) break;
    std::vector<std::size_t> counts(neighbours.size());
    parallel_for(neighbours.size(), [&](std::size_t i) {
      counts[i] = accepted_demands(net, ms, neighbours[i], demands).size();
    });
    const auto pick = static_cast<std::size_t>(
        std::max_element(counts.begin(), counts.end()) - counts.begin());
    current = neighbours[pick];
    if (counts[pick] > best_count) {
      best_count = counts[pick];
      best = current;
    }
  }
  return best;
}

inline WeightVector random_weights(std::size_t num_arcs,
                                   std::mt19937_64& rng) {
  WeightVector w(num_arcs);
  for (auto& x : w) x = static_cast<std::int64_t>(rng() & 0xFFFF);
  return w;
}

// Path arcs get weight 1 and every other arc the maximum weight, making p
// the unique shortest route between its endpoints.
inline WeightVector seed_from_path(const Network& net, const Path& p) {
  if (!is_simple_path(net, p)) {
    throw InvalidInputError("seed_from_path needs a simple path");
  }
  WeightVector w(net.num_arcs(), kMaxIgpWeight);
  for (ArcId a : p.arcs) w[a] = 1;
  return w;
}

inline WeightVector seed_from_path(const Network& net, const Path& p,
                                   std::mt19937_64& rng) {
  if (!is_simple_path(net, p)) {
    throw InvalidInputError("seed_from_path needs a simple path");
  }
  WeightVector w = random_weights(net.num_arcs(), rng);
  for (ArcId a : p.arcs) w[a] = 1;
  return w;
}

inline std::vector<RealTopology> greedy_mtr(const Network& net,
                                            const MetricSet& ms,
                                            std::vector<Demand> demands,
                                            const SearchConfig& cfg) {
  check_metrics_match(net, ms);
  std::sort(demands.begin(), demands.end(),
            [](const Demand& a, const Demand& b) { return a.id < b.id; });
  std::mt19937_64 rng(cfg.rng_seed);
  std::vector<RealTopology> plan;

  while (!demands.empty()) {
    WeightVector w = random_weights(net.num_arcs(), rng);
    w = local_search(net, ms, w, demands, cfg);
    auto accepted = accepted_demands(net, ms, w, demands);
    if (accepted.empty()) {
      const Demand& k = demands.front();
      auto p = tamcra(net, ms, k, cfg.tamcra_paths);
      if (!p) p = exact_csp(net, ms, k);
      if (!p) {
        throw InfeasibleDemandError("demand " + std::to_string(k.id) +
                                    " has no path meeting its bounds");
      }
      if (cfg.literal_fallback_weights) {
        // Random off-path weights may route k elsewhere; redraw a bounded
        // number of times before pinning the path.
        for (int attempt = 0; attempt < 16 && accepted.empty(); ++attempt) {
          w = seed_from_path(net, *p, rng);
          accepted = accepted_demands(net, ms, w, demands);
        }
      }
      if (accepted.empty()) {
        w = seed_from_path(net, *p);
        accepted = accepted_demands(net, ms, w, demands);
      }
      if (accepted.empty()) {
        throw InfeasibleDemandError("fallback path for demand " +
                                    std::to_string(k.id) +
                                    " was not accepted");
      }
    }
    const std::set<DemandId> taken(accepted.begin(), accepted.end());
    std::erase_if(demands,
                  [&](const Demand& k) { return taken.contains(k.id); });
    plan.push_back({std::move(w), std::move(accepted)});
  }
  return plan;
}

}  // namespace topoforge

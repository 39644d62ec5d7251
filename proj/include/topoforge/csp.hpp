#pragma once

// Constrained shortest path solvers over a MetricSet.
//
//   exact_csp   Pareto label-setting search; the reference answer.
//   larac       Lagrangian relaxation with exact rational multipliers.
//   tamcra      k-label multi-constraint heuristic with the nonlinear length
//               max_t(used_t / bound_t).

#include <algorithm>
#include <compare>
#include <cstddef>
#include <optional>
#include <queue>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "topoforge/error.hpp"
#include "topoforge/metrics.hpp"
#include "topoforge/network.hpp"
#include "topoforge/quantity.hpp"
#include "topoforge/shortest_paths.hpp"

namespace topoforge {

// Lexicographic pair weight: shortest on `first`, ties broken by `second`.
struct Lex2 {
  Ticks first = 0;
  Ticks second = 0;

  Lex2& operator+=(const Lex2& o) {
    first += o.first;
    second += o.second;
    return *this;
  }
  friend Lex2 operator+(Lex2 a, const Lex2& b) { return a += b; }
  friend auto operator<=>(const Lex2&, const Lex2&) = default;
};

inline std::vector<Lex2> lex_weights(const MetricSet& ms, std::size_t primary,
                                     std::size_t secondary) {
  const auto& p = ms.ticks(primary);
  const auto& s = ms.ticks(secondary);
  std::vector<Lex2> w(p.size());
  for (std::size_t a = 0; a < p.size(); ++a) w[a] = {p[a], s[a]};
  return w;
}

// Integer arc weights ordered like metric[base] + lam * metric[other]: the
// multiplier's denominator is cleared, so comparisons stay exact.
inline std::vector<BigInt> scaled_combined_weights(const MetricSet& ms,
                                                   std::size_t base,
                                                   std::size_t other,
                                                   const Rational& lam) {
  if (lam < 0) throw InvalidInputError("multiplier must be nonnegative");
  const BigInt num = boost::multiprecision::numerator(lam);
  const BigInt den = boost::multiprecision::denominator(lam);
  const auto& b = ms.ticks(base);
  const auto& o = ms.ticks(other);
  std::vector<BigInt> w(b.size());
  for (std::size_t a = 0; a < b.size(); ++a) {
    w[a] = den * b[a] + num * o[a];
  }
  return w;
}

// ---------------------------------------------------------------------------
// Exact CSP

namespace detail {

struct ParetoLabel {
  NodeId node;
  std::vector<Ticks> cost;
  int parent;  // label index, -1 at the source
  ArcId via;
  bool alive = true;
};

inline std::vector<ArcId> label_arcs(const std::vector<ParetoLabel>& labels,
                                     int idx) {
  std::vector<ArcId> arcs;
  for (int at = idx; labels[at].parent >= 0; at = labels[at].parent) {
    arcs.push_back(labels[at].via);
  }
  std::reverse(arcs.begin(), arcs.end());
  return arcs;
}

inline bool label_visits(const std::vector<ParetoLabel>& labels, int idx,
                         NodeId v) {
  for (int at = idx; at >= 0; at = labels[at].parent) {
    if (labels[at].node == v) return true;
  }
  return false;
}

// a dominates b: componentwise <=, and either strictly better somewhere or
// equal with a lexicographically smaller-or-equal arc sequence.
inline bool label_dominates(const std::vector<ParetoLabel>& labels, int a,
                            int b) {
  const auto& ca = labels[a].cost;
  const auto& cb = labels[b].cost;
  bool strict = false;
  for (std::size_t t = 0; t < ca.size(); ++t) {
    if (ca[t] > cb[t]) return false;
    if (ca[t] < cb[t]) strict = true;
  }
  if (strict) return true;
  return label_arcs(labels, a) <= label_arcs(labels, b);
}

}  // namespace detail

// Path meeting every bound of k that minimizes metric 0, then metric 1, ...,
// then the arc-id sequence. Empty when no path satisfies all bounds.
inline std::optional<Path> exact_csp(const Network& net, const MetricSet& ms,
                                     const Demand& k) {
  check_metrics_match(net, ms);
  if (k.bounds.size() != ms.size()) {
    throw InvalidInputError("demand bound count differs from metric count");
  }
  using detail::ParetoLabel;
  std::vector<ParetoLabel> labels;
  std::vector<std::vector<int>> at_node(net.num_nodes());

  using Key = std::pair<std::vector<Ticks>, int>;
  std::priority_queue<Key, std::vector<Key>, std::greater<Key>> queue;

  labels.push_back({k.src, std::vector<Ticks>(ms.size(), 0), -1, kNoArc});
  at_node[k.src].push_back(0);
  queue.emplace(labels[0].cost, 0);

  while (!queue.empty()) {
    const int idx = queue.top().second;
    queue.pop();
    if (!labels[idx].alive) continue;
    const NodeId u = labels[idx].node;
    if (u == k.dst) {
      return Path{k.src, k.dst, detail::label_arcs(labels, idx)};
    }
    for (ArcId a : net.out_arcs(u)) {
      const NodeId v = net.arc(a).head;
      if (detail::label_visits(labels, idx, v)) continue;
      std::vector<Ticks> cost = labels[idx].cost;
      bool within = true;
      for (std::size_t t = 0; t < cost.size(); ++t) {
        cost[t] += ms.ticks(t)[a];
        if (cost[t] > k.bounds[t]) within = false;
      }
      if (!within) continue;
      const int fresh = static_cast<int>(labels.size());
      labels.push_back({v, std::move(cost), idx, a});
      bool dominated = false;
      for (int other : at_node[v]) {
        if (labels[other].alive &&
            detail::label_dominates(labels, other, fresh)) {
          dominated = true;
          break;
        }
      }
      if (dominated) {
        labels.pop_back();
        continue;
      }
      auto& bucket = at_node[v];
      for (int other : bucket) {
        if (labels[other].alive &&
            detail::label_dominates(labels, fresh, other)) {
          labels[other].alive = false;
        }
      }
      std::erase_if(bucket, [&](int i) { return !labels[i].alive; });
      bucket.push_back(fresh);
      queue.emplace(labels[fresh].cost, fresh);
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// LARAC

struct LaracResult {
  Rational lambda_star = 0;  // meaningful only when feasible
  std::optional<Path> path;
  bool feasible = false;
  int iterations = 0;
};

// Minimizes metric cost_idx subject to sum(metric constr_idx) <= bound.
inline LaracResult larac(const Network& net, const MetricSet& ms,
                         std::size_t cost_idx, std::size_t constr_idx,
                         Ticks bound, NodeId src, NodeId dst) {
  check_metrics_match(net, ms);
  if (cost_idx == constr_idx || cost_idx >= ms.size() ||
      constr_idx >= ms.size()) {
    throw InvalidInputError("LARAC needs two distinct metric indices");
  }
  const auto& cost = ms.ticks(cost_idx);
  const auto& constr = ms.ticks(constr_idx);

  LaracResult result;
  Path pc = route_for_demand(net, lex_weights(ms, cost_idx, constr_idx), src,
                             dst);
  if (path_resource(pc, constr) <= bound) {
    result.lambda_star = 0;
    result.path = std::move(pc);
    result.feasible = true;
    return result;
  }
  Path pd = route_for_demand(net, lex_weights(ms, constr_idx, cost_idx), src,
                             dst);
  if (path_resource(pd, constr) > bound) {
    result.feasible = false;
    return result;
  }

  const std::size_t limit = std::max<std::size_t>(10 * net.num_arcs(), 10);
  for (std::size_t it = 1; it <= limit; ++it) {
    const Ticks c_pc = path_resource(pc, cost);
    const Ticks c_pd = path_resource(pd, cost);
    const Ticks d_pc = path_resource(pc, constr);
    const Ticks d_pd = path_resource(pd, constr);
    const Rational lam(BigInt(c_pd) - c_pc, BigInt(d_pc) - d_pd);
    const auto w = scaled_combined_weights(ms, cost_idx, constr_idx, lam);
    Path r = route_for_demand(net, w, src, dst);
    result.iterations = static_cast<int>(it);
    if (path_resource(r, w) == path_resource(pc, w)) {
      result.lambda_star = lam;
      result.path = std::move(pd);
      result.feasible = true;
      return result;
    }
    if (path_resource(r, constr) <= bound) {
      pd = std::move(r);
    } else {
      pc = std::move(r);
    }
  }
  throw IterationLimitError("LARAC did not converge within " +
                            std::to_string(limit) + " iterations for " +
                            std::to_string(src) + "->" + std::to_string(dst));
}

// Lagrangian dual value min_p [cost(p) + lam * (constr(p) - bound)], evaluated
// with one shortest-path computation.
inline Rational lagrangian_dual(const Network& net, const MetricSet& ms,
                                std::size_t cost_idx, std::size_t constr_idx,
                                Ticks bound, NodeId src, NodeId dst,
                                const Rational& lam) {
  const auto w = scaled_combined_weights(ms, cost_idx, constr_idx, lam);
  const Path p = route_for_demand(net, w, src, dst);
  const Rational c = path_resource(p, ms.ticks(cost_idx));
  const Rational d = path_resource(p, ms.ticks(constr_idx));
  return (c + lam * (d - bound)) / (BigInt(1) << kTickBits);
}

// All shortest paths under metric 0 + lam * metric 1.
inline std::vector<Path> lambda_shortest(const Network& net,
                                         const MetricSet& ms,
                                         const Rational& lam, NodeId src,
                                         NodeId dst,
                                         std::size_t cap = kDefaultPathCap) {
  check_metrics_match(net, ms);
  if (ms.size() < 2) throw InvalidInputError("need two metrics");
  return all_shortest_paths(net, scaled_combined_weights(ms, 0, 1, lam), src,
                            dst, cap);
}

// ---------------------------------------------------------------------------
// TAMCRA

inline constexpr std::size_t kDefaultTamcraPaths = 8;

namespace detail {

// Compares max_t(a_t / bound_t) between two consumption vectors exactly.
struct NonlinearLength {
  Ticks num = 0;
  Ticks den = 1;

  static NonlinearLength of(const std::vector<Ticks>& used,
                            const std::vector<Ticks>& bounds) {
    NonlinearLength best{0, 1};
    for (std::size_t t = 0; t < used.size(); ++t) {
      const NonlinearLength cand{used[t], bounds[t]};
      if (best < cand) best = cand;
    }
    return best;
  }
  friend bool operator<(const NonlinearLength& a, const NonlinearLength& b) {
    return static_cast<__int128>(a.num) * b.den <
           static_cast<__int128>(b.num) * a.den;
  }
};

}  // namespace detail

inline std::optional<Path> tamcra(const Network& net, const MetricSet& ms,
                                  const Demand& k,
                                  std::size_t k_paths = kDefaultTamcraPaths) {
  check_metrics_match(net, ms);
  if (k_paths < 1) throw InvalidInputError("TAMCRA needs k_paths >= 1");
  if (k.bounds.size() != ms.size()) {
    throw InvalidInputError("demand bound count differs from metric count");
  }
  using detail::NonlinearLength;
  using detail::ParetoLabel;
  std::vector<ParetoLabel> labels;
  std::vector<NonlinearLength> length;
  std::vector<std::vector<int>> at_node(net.num_nodes());

  auto cmp = [&](int a, int b) {
    // min-heap on (length, label index)
    if (length[b] < length[a]) return true;
    if (length[a] < length[b]) return false;
    return a > b;
  };
  std::priority_queue<int, std::vector<int>, decltype(cmp)> queue(cmp);

  auto dominates = [&](int a, int b) {
    bool strict = false;
    for (std::size_t t = 0; t < ms.size(); ++t) {
      if (labels[a].cost[t] > labels[b].cost[t]) return false;
      if (labels[a].cost[t] < labels[b].cost[t]) strict = true;
    }
    return strict;
  };

  labels.push_back({k.src, std::vector<Ticks>(ms.size(), 0), -1, kNoArc});
  length.push_back({0, 1});
  at_node[k.src].push_back(0);
  queue.push(0);
  while (!queue.empty()) {
    const int idx = queue.top();
    queue.pop();
    const NodeId u = labels[idx].node;
    if (u == k.dst) {
      return Path{k.src, k.dst, detail::label_arcs(labels, idx)};
    }
    for (ArcId a : net.out_arcs(u)) {
      const NodeId v = net.arc(a).head;
      if (detail::label_visits(labels, idx, v)) continue;
      std::vector<Ticks> cost = labels[idx].cost;
      bool within = true;
      for (std::size_t t = 0; t < cost.size(); ++t) {
        cost[t] += ms.ticks(t)[a];
        if (cost[t] > k.bounds[t]) within = false;
      }
      if (!within) continue;
      auto& bucket = at_node[v];
      if (bucket.size() >= k_paths) continue;
      const int fresh = static_cast<int>(labels.size());
      labels.push_back({v, std::move(cost), idx, a});
      length.push_back(NonlinearLength::of(labels[fresh].cost, k.bounds));
      const bool dominated = std::any_of(
          bucket.begin(), bucket.end(),
          [&](int other) { return dominates(other, fresh); });
      if (dominated) {
        labels.pop_back();
        length.pop_back();
        continue;
      }
      bucket.push_back(fresh);
      queue.push(fresh);
    }
  }
  return std::nullopt;
}

}  // namespace topoforge

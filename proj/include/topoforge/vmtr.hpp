#pragma once

// Virtual topology design over two base metrics.
//
// A virtual topology routes on r1 + lambda * r2. For each demand the
// multipliers whose shortest paths meet both bounds form one interval
// [lambda_min, lambda_max], obtained from two LARAC runs. A minimum set of
// stabbing points over those intervals gives the virtual topologies; demands
// without a usable interval fall back to the greedy MTR designer.

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "topoforge/csp.hpp"
#include "topoforge/error.hpp"
#include "topoforge/metrics.hpp"
#include "topoforge/mtr.hpp"
#include "topoforge/network.hpp"
#include "topoforge/parallel.hpp"
#include "topoforge/quantity.hpp"

namespace topoforge {

struct FeasibleInterval {
  DemandId demand = 0;
  Rational lambda_min = 0;
  std::optional<Rational> lambda_max;  // nullopt = +infinity

  bool contains(const Rational& lam) const {
    return lambda_min <= lam && (!lambda_max || lam <= *lambda_max);
  }
  bool operator==(const FeasibleInterval&) const = default;
};

struct VirtualTopology {
  std::vector<Rational> lambda;  // coefficients over the base metrics
  Rational stab_point = 0;       // cover point the group was built around
  std::vector<DemandId> assigned;

  bool operator==(const VirtualTopology&) const = default;
};

// Designed topologies of either kind. An MTR-only design leaves the virtual
// list empty.
struct DesignPlan {
  std::vector<VirtualTopology> virtual_topologies;
  std::vector<RealTopology> real_topologies;
  std::vector<DemandId> discarded_to_mtr;

  std::size_t num_topologies() const {
    return virtual_topologies.size() + real_topologies.size();
  }
  bool operator==(const DesignPlan&) const = default;
};
using VmtrPlan = DesignPlan;

enum class LambdaPlacement { kMax, kMidpoint };

struct VmtrConfig {
  LambdaPlacement placement = LambdaPlacement::kMax;
  SearchConfig mtr;  // used for the discarded pool
};

struct VmtrStats {
  double intervals_s = 0.0;
  double cover_s = 0.0;
  double mtr_s = 0.0;
  std::size_t intervals = 0;
  std::size_t demoted = 0;  // had an interval but failed tie validation
};

inline constexpr int kPerturbationSteps = 64;
inline constexpr int kPerturbationBits = 20;

inline void check_two_metrics(const MetricSet& ms) {
  if (ms.size() != 2) {
    throw InvalidInputError(
        "virtual topology design supports exactly two base metrics; three or "
        "more turn the multiplier cover into an NP-hard boxicity-2 clique "
        "cover (got " +
        std::to_string(ms.size()) + ")");
  }
}

// Exact per-arc weights sum_t coeffs[t] * r_t.
inline std::vector<Rational> virtual_weights(const MetricSet& ms,
                                             const std::vector<Rational>& coeffs) {
  if (coeffs.size() != ms.size()) {
    throw InvalidInputError("one multiplier per base metric is required");
  }
  bool any_positive = false;
  for (const auto& c : coeffs) {
    if (c < 0) throw InvalidInputError("multipliers must be nonnegative");
    if (c > 0) any_positive = true;
  }
  if (!any_positive) throw InvalidInputError("multipliers are all zero");
  const Rational unit = Rational(BigInt(1) << kTickBits);
  std::vector<Rational> w(ms.num_arcs(), Rational(0));
  for (std::size_t t = 0; t < ms.size(); ++t) {
    if (coeffs[t] == 0) continue;
    const auto& q = ms.ticks(t);
    for (std::size_t a = 0; a < w.size(); ++a) {
      w[a] += coeffs[t] * q[a] / unit;
    }
  }
  return w;
}

// Integer weights proportional to virtual_weights (denominators cleared), for
// exact routing.
inline std::vector<BigInt> scaled_virtual_weights(
    const MetricSet& ms, const std::vector<Rational>& coeffs) {
  if (coeffs.size() != ms.size()) {
    throw InvalidInputError("one multiplier per base metric is required");
  }
  BigInt common = 1;
  for (const auto& c : coeffs) {
    if (c < 0) throw InvalidInputError("multipliers must be nonnegative");
    common = boost::multiprecision::lcm(
        common, boost::multiprecision::denominator(c));
  }
  std::vector<BigInt> w(ms.num_arcs(), BigInt(0));
  for (std::size_t t = 0; t < ms.size(); ++t) {
    const BigInt factor = boost::multiprecision::numerator(coeffs[t]) *
                          (common / boost::multiprecision::denominator(coeffs[t]));
    if (factor == 0) continue;
    const auto& q = ms.ticks(t);
    for (std::size_t a = 0; a < w.size(); ++a) w[a] += factor * q[a];
  }
  return w;
}

inline std::vector<Rational> lambda_coefficients(const Rational& lam) {
  return {Rational(1), lam};
}

// Interval of multipliers feasible for k: [lambda2*, 1 / lambda1*], where
// lambda2* minimizes metric 0 under the metric-1 bound and lambda1* minimizes
// metric 1 under the metric-0 bound. Empty when either LARAC run is
// infeasible or the interval is inverted.
inline std::optional<FeasibleInterval> feasible_interval(const Network& net,
                                                         const MetricSet& ms,
                                                         const Demand& k) {
  check_two_metrics(ms);
  const LaracResult lower = larac(net, ms, 0, 1, k.bounds[1], k.src, k.dst);
  if (!lower.feasible) return std::nullopt;
  const LaracResult upper = larac(net, ms, 1, 0, k.bounds[0], k.src, k.dst);
  if (!upper.feasible) return std::nullopt;
  FeasibleInterval iv{k.id, lower.lambda_star, std::nullopt};
  if (upper.lambda_star != 0) {
    iv.lambda_max = Rational(1) / upper.lambda_star;
    if (iv.lambda_min > *iv.lambda_max) return std::nullopt;
  }
  return iv;
}

// True when every shortest path under r1 + lam * r2 meets k's bounds.
inline bool lambda_serves(const Network& net, const MetricSet& ms,
                          const Demand& k, const Rational& lam) {
  try {
    const auto paths = lambda_shortest(net, ms, lam, k.src, k.dst);
    return std::all_of(paths.begin(), paths.end(), [&](const Path& p) {
      return path_meets_bounds(p, ms, k);
    });
  } catch (const CapExceededError&) {
    return false;
  } catch (const UnreachableError&) {
    return false;
  }
}

inline Rational perturbation_step(const Rational& lam) {
  const Rational scale = lam > 1 ? lam : Rational(1);
  return scale / Rational(BigInt(1) << kPerturbationBits);
}

// Returns the first lambda-shortest path once every shortest path at
// lam + j * eps is valid (j = 0..64, direction sets the sign of the step).
inline std::optional<Path> check_lambda(const Network& net, const MetricSet& ms,
                                        const Demand& k, const Rational& lam,
                                        int direction = +1) {
  check_two_metrics(ms);
  if (lam < 0) throw InvalidInputError("multiplier must be nonnegative");
  const Rational eps = perturbation_step(lam);
  for (int j = 0; j <= kPerturbationSteps; ++j) {
    const Rational cur = lam + (direction >= 0 ? eps : -eps) * j;
    if (cur < 0) break;
    std::vector<Path> paths;
    try {
      paths = lambda_shortest(net, ms, cur, k.src, k.dst);
    } catch (const CapExceededError&) {
      continue;
    }
    const bool all_valid =
        std::all_of(paths.begin(), paths.end(), [&](const Path& p) {
          return path_meets_bounds(p, ms, k);
        });
    if (all_valid) return paths.front();
  }
  return std::nullopt;
}

struct MultiplierCover {
  std::vector<Rational> points;
  std::vector<std::vector<DemandId>> covered;  // parallel to points
  std::vector<DemandId> anchors;  // demand whose deadline fixed each point
};

// Earliest-deadline stabbing: the uncovered interval with the smallest
// lambda_max fixes the next point, which covers every uncovered interval
// containing it. Unbounded intervals come last and share one point at the
// largest remaining lambda_min.
inline MultiplierCover min_multiplier_cover(
    const std::vector<FeasibleInterval>& intervals) {
  for (const auto& iv : intervals) {
    if (iv.lambda_max && iv.lambda_min > *iv.lambda_max) {
      throw InvalidInputError("inverted interval for demand " +
                              std::to_string(iv.demand));
    }
  }
  std::vector<std::size_t> order(intervals.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = intervals[a];
    const auto& y = intervals[b];
    if (x.lambda_max.has_value() != y.lambda_max.has_value()) {
      return x.lambda_max.has_value();
    }
    if (x.lambda_max && *x.lambda_max != *y.lambda_max) {
      return *x.lambda_max < *y.lambda_max;
    }
    return x.demand < y.demand;
  });

  MultiplierCover cover;
  std::vector<char> done(intervals.size(), 0);
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const std::size_t anchor = order[pos];
    if (done[anchor]) continue;
    Rational point;
    if (intervals[anchor].lambda_max) {
      point = *intervals[anchor].lambda_max;
    } else {
      point = intervals[anchor].lambda_min;
      for (std::size_t rest = pos; rest < order.size(); ++rest) {
        if (!done[order[rest]]) {
          point = std::max(point, intervals[order[rest]].lambda_min);
        }
      }
    }
    std::vector<DemandId> group;
    for (std::size_t rest = pos; rest < order.size(); ++rest) {
      const std::size_t i = order[rest];
      if (!done[i] && intervals[i].contains(point)) {
        done[i] = 1;
        group.push_back(intervals[i].demand);
      }
    }
    std::sort(group.begin(), group.end());
    cover.points.push_back(point);
    cover.covered.push_back(std::move(group));
    cover.anchors.push_back(intervals[anchor].demand);
  }
  return cover;
}

namespace detail {

// Multipliers tried for one group, in order: the placement point, then up to
// 64 perturbation steps moving into the group's common interval.
inline std::vector<Rational> placement_candidates(const Rational& lo,
                                                  const std::optional<Rational>& hi,
                                                  LambdaPlacement placement) {
  Rational start;
  int direction = +1;
  if (!hi) {
    start = lo;
  } else if (placement == LambdaPlacement::kMidpoint && lo < *hi) {
    start = (lo + *hi) / 2;
  } else {
    start = *hi;
    direction = -1;
  }
  std::vector<Rational> out{start};
  const Rational eps = perturbation_step(start);
  for (int j = 1; j <= kPerturbationSteps; ++j) {
    Rational cur = start + (direction > 0 ? eps : -eps) * j;
    if (cur < 0) break;
    bool overshoot = false;
    if (hi && lo < *hi) {
      if (direction < 0 && cur <= lo) overshoot = true;
      if (direction > 0 && cur >= *hi) overshoot = true;
    }
    if (overshoot) {
      out.push_back((lo + *hi) / 2);
      break;
    }
    out.push_back(std::move(cur));
  }
  return out;
}

}  // namespace detail

inline DesignPlan design_vmtr(const Network& net, const MetricSet& ms,
                              std::vector<Demand> demands,
                              const VmtrConfig& cfg,
                              VmtrStats* stats = nullptr) {
  check_metrics_match(net, ms);
  check_two_metrics(ms);
  using Clock = std::chrono::steady_clock;
  auto seconds_since = [](Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
  };
  VmtrStats local_stats;
  VmtrStats& st = stats ? *stats : local_stats;
  st = VmtrStats{};

  std::sort(demands.begin(), demands.end(),
            [](const Demand& a, const Demand& b) { return a.id < b.id; });
  std::map<DemandId, const Demand*> by_id;
  for (const Demand& k : demands) by_id[k.id] = &k;

  auto t0 = Clock::now();
  std::vector<std::optional<FeasibleInterval>> slots(demands.size());
  parallel_for(demands.size(), [&](std::size_t i) {
    slots[i] = feasible_interval(net, ms, demands[i]);
  });
  std::vector<FeasibleInterval> remaining;
  std::set<DemandId> pool;
  for (std::size_t i = 0; i < demands.size(); ++i) {
    if (slots[i]) {
      remaining.push_back(*slots[i]);
    } else {
      pool.insert(demands[i].id);
    }
  }
  st.intervals = remaining.size();
  st.intervals_s = seconds_since(t0);

  t0 = Clock::now();
  DesignPlan plan;
  while (!remaining.empty()) {
    const MultiplierCover cover = min_multiplier_cover(remaining);
    const Rational& point = cover.points.front();
    const auto& group = cover.covered.front();
    const DemandId anchor = cover.anchors.front();

    Rational lo = 0;
    std::optional<Rational> hi;
    for (const auto& iv : remaining) {
      if (!std::binary_search(group.begin(), group.end(), iv.demand)) continue;
      lo = std::max(lo, iv.lambda_min);
      if (iv.lambda_max) hi = hi ? std::min(*hi, *iv.lambda_max) : *iv.lambda_max;
    }
    if (hi && *hi < point) hi = point;

    std::vector<DemandId> best_served;
    Rational best_lambda = point;
    for (const Rational& lam :
         detail::placement_candidates(lo, hi, cfg.placement)) {
      std::vector<char> ok(group.size(), 0);
      parallel_for(group.size(), [&](std::size_t i) {
        ok[i] = lambda_serves(net, ms, *by_id.at(group[i]), lam);
      });
      std::vector<DemandId> served;
      for (std::size_t i = 0; i < group.size(); ++i) {
        if (ok[i]) served.push_back(group[i]);
      }
      if (served.size() > best_served.size()) {
        best_served = std::move(served);
        best_lambda = lam;
      }
      if (best_served.size() == group.size()) break;
    }

    std::set<DemandId> drop(best_served.begin(), best_served.end());
    if (!drop.contains(anchor)) {
      pool.insert(anchor);
      drop.insert(anchor);
      ++st.demoted;
    }
    if (!best_served.empty()) {
      plan.virtual_topologies.push_back(
          {lambda_coefficients(best_lambda), point, best_served});
    }
    std::erase_if(remaining, [&](const FeasibleInterval& iv) {
      return drop.contains(iv.demand);
    });
  }
  st.cover_s = seconds_since(t0);

  t0 = Clock::now();
  plan.discarded_to_mtr.assign(pool.begin(), pool.end());
  std::vector<Demand> leftovers;
  for (DemandId id : plan.discarded_to_mtr) leftovers.push_back(*by_id.at(id));
  plan.real_topologies = greedy_mtr(net, ms, std::move(leftovers), cfg.mtr);
  st.mtr_s = seconds_since(t0);
  return plan;
}

}  // namespace topoforge

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "topoforge/error.hpp"
#include "topoforge/network.hpp"
#include "topoforge/quantity.hpp"

namespace topoforge {

// Per-arc additive resources, one vector per base topology. By convention
// metric 0 is delay and metric 1 is additive loss.
class MetricSet {
 public:
  MetricSet() = default;

  MetricSet(std::vector<std::string> names,
            std::vector<std::vector<double>> values)
      : names_(std::move(names)), values_(std::move(values)) {
    if (names_.size() != values_.size()) {
      throw InvalidInputError("metric names and value vectors differ in count");
    }
    ticks_.reserve(values_.size());
    for (std::size_t t = 0; t < values_.size(); ++t) {
      if (values_[t].size() != values_.front().size()) {
        throw InvalidInputError("metric vectors differ in length");
      }
      std::vector<Ticks> q;
      q.reserve(values_[t].size());
      for (double v : values_[t]) q.push_back(value_to_ticks(v));
      ticks_.push_back(std::move(q));
    }
  }

  std::size_t size() const { return values_.size(); }
  std::size_t num_arcs() const {
    return values_.empty() ? 0 : values_.front().size();
  }
  const std::string& name(std::size_t t) const { return names_.at(t); }
  const std::vector<std::string>& names() const { return names_; }

  const std::vector<double>& values(std::size_t t) const {
    return values_.at(t);
  }
  const std::vector<Ticks>& ticks(std::size_t t) const { return ticks_.at(t); }

  bool operator==(const MetricSet& o) const {
    return names_ == o.names_ && values_ == o.values_;
  }

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<double>> values_;
  std::vector<std::vector<Ticks>> ticks_;
};

inline void check_metrics_match(const Network& net, const MetricSet& ms) {
  if (ms.size() == 0 || ms.num_arcs() != net.num_arcs()) {
    throw InvalidInputError("metric set does not match the network's arcs");
  }
}

struct Demand {
  DemandId id = 0;
  NodeId src = 0;
  NodeId dst = 0;
  std::vector<Ticks> bounds;  // one end-to-end limit per metric

  bool operator==(const Demand&) const = default;
};

inline Demand make_demand(DemandId id, NodeId src, NodeId dst,
                          const std::vector<double>& bounds) {
  if (src == dst) throw InvalidInputError("demand source equals destination");
  Demand k{id, src, dst, {}};
  for (double b : bounds) {
    if (!(b > 0.0)) throw InvalidInputError("demand bounds must be positive");
    k.bounds.push_back(bound_to_ticks(b));
  }
  return k;
}

inline std::vector<Ticks> path_consumption(const Path& p, const MetricSet& ms) {
  std::vector<Ticks> used;
  used.reserve(ms.size());
  for (std::size_t t = 0; t < ms.size(); ++t) {
    used.push_back(path_resource(p, ms.ticks(t)));
  }
  return used;
}

inline bool path_meets_bounds(const Path& p, const MetricSet& ms,
                              const Demand& k) {
  for (std::size_t t = 0; t < ms.size() && t < k.bounds.size(); ++t) {
    if (path_resource(p, ms.ticks(t)) > k.bounds[t]) return false;
  }
  return true;
}

}  // namespace topoforge

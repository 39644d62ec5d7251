#pragma once

// CPLEX-LP export of the joint topology design model, for cross-checking
// small instances with an external MIP solver. Naming is documented in
// docs/ilp.md and is stable.

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "topoforge/error.hpp"
#include "topoforge/instance.hpp"
#include "topoforge/mtr.hpp"

namespace topoforge {

enum class IlpMode { kMtr, kVmtr };

struct IlpConfig {
  int t_bar_max = 1;              // topology budget (virtual ones under vMTR)
  std::optional<double> big_m;    // default |V| * 65536
  double penalty_real = 1000.0;   // objective weight of real topologies (vMTR)
  std::optional<int> real_max;    // real topology budget under vMTR
  bool literal_activation = false;  // sum_k y_kt <= z_t instead of <= |K| z_t
  std::optional<int> topology_hint;  // heuristic topology count, if known
};

// Variable and row tallies of an emitted model, by family.
struct LpCounts {
  std::size_t x = 0, u = 0, y = 0, z = 0, pi = 0, w = 0, lam = 0;
  std::size_t activation = 0;    // demands only on active topologies
  std::size_t assignment = 0;    // every demand placed somewhere
  std::size_t flow = 0;          // flow conservation
  std::size_t x_to_u = 0;        // demand arcs lie on the destination tree
  std::size_t out_degree = 0;    // one tree arc out of each node
  std::size_t u_to_x = 0;        // tree arcs carry some demand
  std::size_t potential_lo = 0;  // off-tree arcs are strictly longer
  std::size_t potential_hi = 0;  // tree arcs are tight
  std::size_t resource = 0;      // per-metric bounds
  std::size_t coupling = 0;      // virtual weights from base metrics

  std::size_t variables() const { return x + u + y + z + pi + w + lam; }
  std::size_t rows() const {
    return activation + assignment + flow + x_to_u + out_degree + u_to_x +
           potential_lo + potential_hi + resource + coupling;
  }
  bool operator==(const LpCounts&) const = default;
};

struct LpModel {
  std::string text;
  LpCounts counts;
};

namespace detail {

inline std::string lp_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct LpTerm {
  double coef;
  std::string var;
};

// Writes "name: terms sense rhs", wrapping long rows; CPLEX caps line length.
class LpWriter {
 public:
  explicit LpWriter(std::ostringstream& out) : out_(out) {}

  void expression(const std::vector<LpTerm>& terms) {
    bool first = true;
    for (const auto& [coef, var] : terms) {
      std::string piece;
      if (coef < 0) {
        piece = "- ";
      } else if (!first) {
        piece = "+ ";
      }
      const double mag = coef < 0 ? -coef : coef;
      if (mag != 1.0) piece += lp_number(mag) + " ";
      piece += var;
      emit(piece);
      first = false;
    }
  }

  void row(const std::string& name, std::vector<LpTerm> terms,
           const std::string& sense, double rhs, const std::string& filler) {
    if (terms.empty()) terms.push_back({0.0, filler});
    out_ << " " << name << ":";
    width_ = name.size() + 2;
    expression(terms);
    emit(sense + " " + lp_number(rhs));
    out_ << "\n";
    width_ = 0;
  }

  void emit(const std::string& piece) {
    if (width_ + piece.size() + 1 > 200) {
      out_ << "\n  ";
      width_ = 2;
    }
    out_ << " " << piece;
    width_ += piece.size() + 1;
  }

 private:
  std::ostringstream& out_;
  std::size_t width_ = 0;
};

inline std::string xv(int a, int k, int t) {
  return "x_a" + std::to_string(a) + "_k" + std::to_string(k) + "_t" + std::to_string(t);
}
inline std::string uv(int a, int d, int t) {
  return "u_a" + std::to_string(a) + "_d" + std::to_string(d) + "_t" + std::to_string(t);
}
inline std::string yv(int k, int t) {
  return "y_k" + std::to_string(k) + "_t" + std::to_string(t);
}
inline std::string zv(int t) { return "z_t" + std::to_string(t); }
inline std::string piv(int v, int d, int t) {
  return "pi_v" + std::to_string(v) + "_d" + std::to_string(d) + "_t" + std::to_string(t);
}
inline std::string wv(int a, int t) {
  return "w_a" + std::to_string(a) + "_t" + std::to_string(t);
}
inline std::string lamv(int q, int t) {
  return "lam_q" + std::to_string(q) + "_t" + std::to_string(t);
}

inline std::vector<NodeId> demand_destinations(const std::vector<Demand>& demands) {
  std::set<NodeId> dsts;
  for (const Demand& k : demands) dsts.insert(k.dst);
  return {dsts.begin(), dsts.end()};
}

}  // namespace detail

inline double default_big_m(const Network& net) {
  return static_cast<double>(net.num_nodes()) * 65536.0;
}

// Closed-form tallies; the exporter's own counts must agree with these.
inline LpCounts expected_lp_counts(const InstanceSpec& inst, const IlpConfig& cfg,
                                   IlpMode mode) {
  const std::size_t n = inst.network.num_nodes();
  const std::size_t arcs = inst.network.num_arcs();
  const std::size_t demands = inst.demands.size();
  const std::size_t dsts = detail::demand_destinations(inst.demands).size();
  const std::size_t metrics = inst.metrics.size();
  const std::size_t virt = mode == IlpMode::kVmtr ? cfg.t_bar_max : 0;
  const std::size_t real = mode == IlpMode::kVmtr
                               ? static_cast<std::size_t>(cfg.real_max.value_or(cfg.t_bar_max))
                               : cfg.t_bar_max;
  const std::size_t topos = virt + real;
  LpCounts c;
  c.x = arcs * demands * topos;
  c.u = arcs * dsts * topos;
  c.y = demands * topos;
  c.z = topos;
  c.pi = n * dsts * topos;
  c.w = arcs * topos;
  c.lam = metrics * virt;
  c.activation = demands > 0 ? topos : 0;
  c.assignment = demands;
  c.flow = n * demands * topos;
  c.x_to_u = arcs * demands * topos;
  c.out_degree = n * dsts * topos;
  c.u_to_x = arcs * dsts * topos;
  c.potential_lo = arcs * dsts * topos;
  c.potential_hi = arcs * dsts * topos;
  c.resource = demands * metrics * topos;
  c.coupling = arcs * virt;
  return c;
}

inline LpModel export_ilp(const InstanceSpec& inst, const IlpConfig& cfg,
                          IlpMode mode) {
  const Network& net = inst.network;
  const MetricSet& ms = inst.metrics;
  check_metrics_match(net, ms);
  if (cfg.t_bar_max < 1) throw InvalidInputError("t_bar_max must be at least 1");
  if (cfg.real_max && *cfg.real_max < 0) {
    throw InvalidInputError("real_max must be nonnegative");
  }
  const double big_m = cfg.big_m.value_or(default_big_m(net));
  if (!(big_m > static_cast<double>(net.num_nodes()) * kMaxIgpWeight)) {
    throw InvalidInputError("big_m must exceed |V| * 65535");
  }
  if (cfg.topology_hint) {
    const int budget = mode == IlpMode::kMtr
                           ? cfg.t_bar_max
                           : cfg.t_bar_max + cfg.real_max.value_or(cfg.t_bar_max);
    if (*cfg.topology_hint > budget) {
      throw BudgetTooSmallError(
          "topology budget " + std::to_string(budget) +
          " is below the heuristic's " + std::to_string(*cfg.topology_hint) +
          " topologies; the model could be infeasible");
    }
  }

  const int virt = mode == IlpMode::kVmtr ? cfg.t_bar_max : 0;
  const int real = mode == IlpMode::kVmtr ? cfg.real_max.value_or(cfg.t_bar_max)
                                          : cfg.t_bar_max;
  const int topos = virt + real;
  const auto n = static_cast<int>(net.num_nodes());
  const auto arcs = static_cast<int>(net.num_arcs());
  const auto num_demands = static_cast<int>(inst.demands.size());
  const auto metrics = static_cast<int>(ms.size());
  const auto dsts = detail::demand_destinations(inst.demands);
  using detail::LpTerm;

  std::ostringstream out;
  detail::LpWriter lp(out);
  LpCounts counts;

  out << "\\ topoforge " << (mode == IlpMode::kMtr ? "mtr" : "vmtr")
      << " model: |V|=" << n << " |A|=" << arcs << " |K|=" << num_demands
      << " topologies=" << topos;
  if (mode == IlpMode::kVmtr) out << " (virtual t0.." << virt - 1 << ")";
  out << "\nMinimize\n obj:";
  {
    std::vector<LpTerm> obj;
    for (int t = 0; t < topos; ++t) {
      obj.push_back({t < virt ? 1.0 : (mode == IlpMode::kVmtr ? cfg.penalty_real : 1.0),
                     detail::zv(t)});
    }
    lp.expression(obj);
  }
  out << "\nSubject To\n";

  auto metric_value = [&](int q, int a) { return ticks_to_value(ms.ticks(q)[a]); };

  if (num_demands > 0) {
    for (int t = 0; t < topos; ++t) {
      std::vector<LpTerm> terms;
      for (int k = 0; k < num_demands; ++k) terms.push_back({1.0, detail::yv(k, t)});
      terms.push_back({cfg.literal_activation ? -1.0 : -static_cast<double>(num_demands),
                       detail::zv(t)});
      lp.row("act_t" + std::to_string(t), std::move(terms), "<=", 0, "");
      ++counts.activation;
    }
  }
  for (int k = 0; k < num_demands; ++k) {
    std::vector<LpTerm> terms;
    for (int t = 0; t < topos; ++t) terms.push_back({1.0, detail::yv(k, t)});
    lp.row("assign_k" + std::to_string(k), std::move(terms), ">=", 1, "");
    ++counts.assignment;
  }
  for (int k = 0; k < num_demands; ++k) {
    const Demand& dem = inst.demands[k];
    for (int t = 0; t < topos; ++t) {
      for (NodeId v = 0; v < n; ++v) {
        std::vector<LpTerm> terms;
        for (ArcId a : net.out_arcs(v)) terms.push_back({1.0, detail::xv(a, k, t)});
        for (ArcId a : net.in_arcs(v)) terms.push_back({-1.0, detail::xv(a, k, t)});
        if (v == dem.src) terms.push_back({-1.0, detail::yv(k, t)});
        if (v == dem.dst) terms.push_back({1.0, detail::yv(k, t)});
        lp.row("flow_v" + std::to_string(v) + "_k" + std::to_string(k) + "_t" +
                   std::to_string(t),
               std::move(terms), "=", 0, detail::zv(t));
        ++counts.flow;
      }
      for (ArcId a = 0; a < arcs; ++a) {
        lp.row("xu_a" + std::to_string(a) + "_k" + std::to_string(k) + "_t" +
                   std::to_string(t),
               {{1.0, detail::xv(a, k, t)}, {-1.0, detail::uv(a, dem.dst, t)}},
               "<=", 0, "");
        ++counts.x_to_u;
      }
    }
  }
  for (NodeId d : dsts) {
    for (int t = 0; t < topos; ++t) {
      const std::string tag = "_d" + std::to_string(d) + "_t" + std::to_string(t);
      for (NodeId v = 0; v < n; ++v) {
        std::vector<LpTerm> terms;
        for (ArcId a : net.out_arcs(v)) terms.push_back({1.0, detail::uv(a, d, t)});
        lp.row("outdeg_v" + std::to_string(v) + tag, std::move(terms), "<=", 1,
               detail::zv(t));
        ++counts.out_degree;
      }
      for (ArcId a = 0; a < arcs; ++a) {
        std::vector<LpTerm> terms{{1.0, detail::uv(a, d, t)}};
        for (int k = 0; k < num_demands; ++k) {
          if (inst.demands[k].dst == d) terms.push_back({-1.0, detail::xv(a, k, t)});
        }
        lp.row("ux_a" + std::to_string(a) + tag, std::move(terms), "<=", 0, "");
        ++counts.u_to_x;
      }
      for (ArcId a = 0; a < arcs; ++a) {
        const Arc& arc = net.arc(a);
        lp.row("potlo_a" + std::to_string(a) + tag,
               {{1.0, detail::wv(a, t)},
                {-1.0, detail::piv(arc.tail, d, t)},
                {1.0, detail::piv(arc.head, d, t)},
                {1.0, detail::uv(a, d, t)}},
               ">=", 1, "");
        ++counts.potential_lo;
      }
      for (ArcId a = 0; a < arcs; ++a) {
        const Arc& arc = net.arc(a);
        lp.row("pothi_a" + std::to_string(a) + tag,
               {{1.0, detail::wv(a, t)},
                {-1.0, detail::piv(arc.tail, d, t)},
                {1.0, detail::piv(arc.head, d, t)},
                {big_m, detail::uv(a, d, t)}},
               "<=", big_m, "");
        ++counts.potential_hi;
      }
    }
  }
  // Per topology: x is zero unless the demand is assigned there, so no
  // big-M guard is needed.
  for (int k = 0; k < num_demands; ++k) {
    const Demand& dem = inst.demands[k];
    for (int q = 0; q < metrics; ++q) {
      for (int t = 0; t < topos; ++t) {
        std::vector<LpTerm> terms;
        for (ArcId a = 0; a < arcs; ++a) {
          const double r = metric_value(q, a);
          if (r != 0.0) terms.push_back({r, detail::xv(a, k, t)});
        }
        const double rhs = q < static_cast<int>(dem.bounds.size())
                               ? ticks_to_value(dem.bounds[q])
                               : std::numeric_limits<double>::infinity();
        lp.row("res_k" + std::to_string(k) + "_q" + std::to_string(q) + "_t" +
                   std::to_string(t),
               std::move(terms), "<=", std::isinf(rhs) ? 1e30 : rhs,
               detail::xv(0, k, t));
        ++counts.resource;
      }
    }
  }
  for (int t = 0; t < virt; ++t) {
    for (ArcId a = 0; a < arcs; ++a) {
      std::vector<LpTerm> terms{{1.0, detail::wv(a, t)}};
      for (int q = 0; q < metrics; ++q) {
        const double r = metric_value(q, a);
        if (r != 0.0) terms.push_back({-r, detail::lamv(q, t)});
      }
      lp.row("couple_a" + std::to_string(a) + "_t" + std::to_string(t),
             std::move(terms), "=", 0, detail::lamv(0, t));
      ++counts.coupling;
    }
  }

  // Bounds: real weights are IGP weights; potentials, virtual weights and
  // multipliers keep the default [0, +inf).
  out << "Bounds\n";
  for (int t = virt; t < topos; ++t) {
    for (ArcId a = 0; a < arcs; ++a) {
      out << " 0 <= " << detail::wv(a, t) << " <= " << kMaxIgpWeight << "\n";
    }
  }
  for (int t = 0; t < virt; ++t) {
    for (int q = 0; q < metrics; ++q) out << " " << detail::lamv(q, t) << " >= 0\n";
  }

  out << "Binaries\n";
  for (int t = 0; t < topos; ++t) {
    for (int k = 0; k < num_demands; ++k) {
      for (ArcId a = 0; a < arcs; ++a) out << " " << detail::xv(a, k, t) << "\n";
    }
  }
  for (int t = 0; t < topos; ++t) {
    for (NodeId d : dsts) {
      for (ArcId a = 0; a < arcs; ++a) out << " " << detail::uv(a, d, t) << "\n";
    }
  }
  for (int t = 0; t < topos; ++t) {
    for (int k = 0; k < num_demands; ++k) out << " " << detail::yv(k, t) << "\n";
  }
  for (int t = 0; t < topos; ++t) out << " " << detail::zv(t) << "\n";
  out << "End\n";

  counts.x = static_cast<std::size_t>(arcs) * num_demands * topos;
  counts.u = static_cast<std::size_t>(arcs) * dsts.size() * topos;
  counts.y = static_cast<std::size_t>(num_demands) * topos;
  counts.z = topos;
  counts.pi = static_cast<std::size_t>(n) * dsts.size() * topos;
  counts.w = static_cast<std::size_t>(arcs) * topos;
  counts.lam = static_cast<std::size_t>(metrics) * virt;
  return {out.str(), counts};
}

inline std::string export_mtr_ilp(const InstanceSpec& inst, const IlpConfig& cfg) {
  return export_ilp(inst, cfg, IlpMode::kMtr).text;
}

inline std::string export_vmtr_ilp(const InstanceSpec& inst, const IlpConfig& cfg) {
  return export_ilp(inst, cfg, IlpMode::kVmtr).text;
}

}  // namespace topoforge

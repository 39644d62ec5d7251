#pragma once

// Plan evaluation and the MTR vs vMTR experiment driver.

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "topoforge/error.hpp"
#include "topoforge/instance.hpp"
#include "topoforge/io.hpp"
#include "topoforge/mtr.hpp"
#include "topoforge/shortest_paths.hpp"
#include "topoforge/vmtr.hpp"

namespace topoforge {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kResultsCsvVersion = "1";

struct DemandRobustness {
  DemandId demand = 0;
  std::vector<double> ratio;  // consumption / bound, one per metric
};

struct EvalRow {
  std::string instance;
  std::string method;  // "mtr" or "vmtr"
  std::uint64_t seed = 0;
  std::size_t demands = 0;
  std::size_t topologies = 0;
  std::size_t virtual_topologies = 0;
  std::size_t real_topologies = 0;
  double avg_demands_per_topology = 0.0;
  double avg_demands_per_virtual = 0.0;
  double avg_demands_per_real = 0.0;
  std::vector<double> mean_robustness;  // per metric
  std::vector<double> max_robustness;   // per metric
  std::vector<DemandRobustness> robustness;
};

namespace detail {

inline double safe_ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

inline void check_route(const Path& p, const MetricSet& ms, const Demand& k,
                        const std::string& where) {
  if (!path_meets_bounds(p, ms, k)) {
    throw InvalidPlanError("demand " + std::to_string(k.id) + " on " + where +
                           " is routed beyond its bounds");
  }
}

}  // namespace detail

// Recomputes every route from the plan's weights. Real topologies forward on
// the deterministic tree route; virtual ones must keep every shortest path
// within bounds, since routers may break ties either way.
inline EvalRow evaluate_plan(const InstanceSpec& inst, const DesignPlan& plan) {
  const Network& net = inst.network;
  const MetricSet& ms = inst.metrics;
  std::map<DemandId, const Demand*> by_id;
  for (const Demand& k : inst.demands) by_id[k.id] = &k;

  std::set<DemandId> seen;
  auto demand_of = [&](DemandId id) -> const Demand& {
    const auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw InvalidPlanError("plan assigns unknown demand " + std::to_string(id));
    }
    if (!seen.insert(id).second) {
      throw InvalidPlanError("demand " + std::to_string(id) + " assigned twice");
    }
    return *it->second;
  };

  std::map<DemandId, Path> routes;
  for (std::size_t i = 0; i < plan.virtual_topologies.size(); ++i) {
    const VirtualTopology& v = plan.virtual_topologies[i];
    const std::string where = "virtual topology " + std::to_string(i);
    const auto w = scaled_virtual_weights(ms, v.lambda);
    for (DemandId id : v.assigned) {
      const Demand& k = demand_of(id);
      std::vector<Path> paths;
      try {
        paths = all_shortest_paths(net, w, k.src, k.dst);
      } catch (const UnreachableError&) {
        throw InvalidPlanError("demand " + std::to_string(id) + " unreachable on " + where);
      } catch (const CapExceededError&) {
        throw InvalidPlanError("demand " + std::to_string(id) +
                               " has too many tied routes on " + where);
      }
      for (const Path& p : paths) detail::check_route(p, ms, k, where);
      routes[id] = route_for_demand(net, w, k.src, k.dst);
    }
  }
  for (std::size_t i = 0; i < plan.real_topologies.size(); ++i) {
    const RealTopology& r = plan.real_topologies[i];
    const std::string where = "real topology " + std::to_string(i);
    if (r.weights.size() != net.num_arcs()) {
      throw InvalidPlanError(where + " has the wrong number of weights");
    }
    for (DemandId id : r.assigned) {
      const Demand& k = demand_of(id);
      Path p;
      try {
        p = route_for_demand(net, r.weights, k.src, k.dst);
      } catch (const UnreachableError&) {
        throw InvalidPlanError("demand " + std::to_string(id) + " unreachable on " + where);
      }
      detail::check_route(p, ms, k, where);
      routes[id] = std::move(p);
    }
  }
  if (seen.size() != inst.demands.size()) {
    for (const Demand& k : inst.demands) {
      if (!seen.contains(k.id)) {
        throw InvalidPlanError("demand " + std::to_string(k.id) + " is not assigned");
      }
    }
  }

  EvalRow row;
  row.demands = inst.demands.size();
  row.virtual_topologies = plan.virtual_topologies.size();
  row.real_topologies = plan.real_topologies.size();
  row.topologies = plan.num_topologies();
  std::size_t on_virtual = 0;
  for (const auto& v : plan.virtual_topologies) on_virtual += v.assigned.size();
  std::size_t on_real = 0;
  for (const auto& r : plan.real_topologies) on_real += r.assigned.size();
  row.avg_demands_per_topology = detail::safe_ratio(row.demands, row.topologies);
  row.avg_demands_per_virtual = detail::safe_ratio(on_virtual, row.virtual_topologies);
  row.avg_demands_per_real = detail::safe_ratio(on_real, row.real_topologies);

  row.mean_robustness.assign(ms.size(), 0.0);
  row.max_robustness.assign(ms.size(), 0.0);
  for (const auto& [id, p] : routes) {
    const Demand& k = *by_id.at(id);
    DemandRobustness dr{id, {}};
    for (std::size_t t = 0; t < ms.size(); ++t) {
      const double used = ticks_to_value(path_resource(p, ms.ticks(t)));
      const double ratio = used / ticks_to_value(k.bounds[t]);
      dr.ratio.push_back(ratio);
      row.mean_robustness[t] += ratio;
      row.max_robustness[t] = std::max(row.max_robustness[t], ratio);
    }
    row.robustness.push_back(std::move(dr));
  }
  if (!routes.empty()) {
    for (double& m : row.mean_robustness) m /= static_cast<double>(routes.size());
  }
  return row;
}

inline EvalRow evaluate_plan(const InstanceSpec& inst,
                             const std::vector<RealTopology>& topologies) {
  DesignPlan plan;
  plan.real_topologies = topologies;
  return evaluate_plan(inst, plan);
}

// ------------------------------------------------------------ experiments

struct SuiteEntry {
  std::string id;
  InstanceSpec instance;
};

struct ExperimentConfig {
  SearchConfig mtr;  // rng_seed is replaced by each run's seed
  LambdaPlacement placement = LambdaPlacement::kMax;
  bool write_plans = true;
};

struct RunTiming {
  double total_s = 0.0;
  double intervals_s = 0.0;
  double cover_s = 0.0;
  double mtr_s = 0.0;
};

struct RunResult {
  EvalRow row;
  RunTiming timing;
  std::string status = "ok";  // or the error message
  std::optional<DesignPlan> plan;
};

struct ExperimentSummary {
  std::vector<RunResult> runs;
  std::size_t failures = 0;
};

inline std::string placement_name(LambdaPlacement p) {
  return p == LambdaPlacement::kMax ? "max" : "midpoint";
}

inline LambdaPlacement parse_placement(const std::string& s) {
  if (s == "max") return LambdaPlacement::kMax;
  if (s == "midpoint") return LambdaPlacement::kMidpoint;
  throw InvalidInputError("unknown lambda placement: " + s);
}

namespace detail {

inline std::string csv_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

inline RunResult run_one(const SuiteEntry& entry, const std::string& method,
                         std::uint64_t seed, const ExperimentConfig& cfg) {
  using Clock = std::chrono::steady_clock;
  RunResult result;
  result.row.instance = entry.id;
  result.row.method = method;
  result.row.seed = seed;
  SearchConfig search = cfg.mtr;
  search.rng_seed = seed;
  try {
    const auto t0 = Clock::now();
    DesignPlan plan;
    if (method == "mtr") {
      plan.real_topologies = greedy_mtr(entry.instance.network, entry.instance.metrics,
                                        entry.instance.demands, search);
    } else {
      VmtrStats stats;
      plan = design_vmtr(entry.instance.network, entry.instance.metrics,
                         entry.instance.demands, {cfg.placement, search}, &stats);
      result.timing.intervals_s = stats.intervals_s;
      result.timing.cover_s = stats.cover_s;
      result.timing.mtr_s = stats.mtr_s;
    }
    result.timing.total_s =
        std::chrono::duration<double>(Clock::now() - t0).count();
    if (method == "mtr") result.timing.mtr_s = result.timing.total_s;
    EvalRow row = evaluate_plan(entry.instance, plan);
    row.instance = entry.id;
    row.method = method;
    row.seed = seed;
    result.row = std::move(row);
    result.plan = std::move(plan);
  } catch (const std::exception& e) {
    result.status = std::string("error: ") + e.what();
  }
  return result;
}

}  // namespace detail

inline std::string results_csv(const std::vector<RunResult>& runs) {
  std::ostringstream out;
  out << "instance,method,seed,status,demands,topologies,virtual_topologies,"
         "real_topologies,avg_demands_per_topology,avg_demands_per_virtual,"
         "avg_demands_per_real,mean_robustness_delay,mean_robustness_loss,"
         "max_robustness_delay,max_robustness_loss\n";
  for (const RunResult& r : runs) {
    const EvalRow& row = r.row;
    auto metric = [](const std::vector<double>& v, std::size_t t) {
      return t < v.size() ? detail::csv_number(v[t]) : std::string();
    };
    out << detail::csv_field(row.instance) << "," << row.method << "," << row.seed
        << "," << detail::csv_field(r.status) << "," << row.demands << ","
        << row.topologies << "," << row.virtual_topologies << ","
        << row.real_topologies << ","
        << detail::csv_number(row.avg_demands_per_topology) << ","
        << detail::csv_number(row.avg_demands_per_virtual) << ","
        << detail::csv_number(row.avg_demands_per_real) << ","
        << metric(row.mean_robustness, 0) << "," << metric(row.mean_robustness, 1)
        << "," << metric(row.max_robustness, 0) << ","
        << metric(row.max_robustness, 1) << "\n";
  }
  return out.str();
}

inline std::string timings_csv(const std::vector<RunResult>& runs) {
  std::ostringstream out;
  out << "instance,method,seed,total_s,intervals_s,cover_s,mtr_s\n";
  for (const RunResult& r : runs) {
    out << detail::csv_field(r.row.instance) << "," << r.row.method << ","
        << r.row.seed << "," << detail::csv_number(r.timing.total_s) << ","
        << detail::csv_number(r.timing.intervals_s) << ","
        << detail::csv_number(r.timing.cover_s) << ","
        << detail::csv_number(r.timing.mtr_s) << "\n";
  }
  return out.str();
}

// Long format: one line per (run, demand, metric).
inline std::string robustness_csv(const std::vector<RunResult>& runs,
                                  const std::vector<std::string>& metric_names) {
  std::ostringstream out;
  out << "instance,method,seed,demand,metric,ratio\n";
  for (const RunResult& r : runs) {
    for (const DemandRobustness& d : r.row.robustness) {
      for (std::size_t t = 0; t < d.ratio.size(); ++t) {
        const std::string name =
            t < metric_names.size() ? metric_names[t] : "m" + std::to_string(t);
        out << detail::csv_field(r.row.instance) << "," << r.row.method << ","
            << r.row.seed << "," << d.demand << "," << name << ","
            << detail::csv_number(d.ratio[t]) << "\n";
      }
    }
  }
  return out.str();
}

inline Json run_to_json(const RunResult& r) {
  const EvalRow& row = r.row;
  return {{"instance", row.instance},
          {"method", row.method},
          {"seed", row.seed},
          {"status", r.status},
          {"demands", row.demands},
          {"topologies", row.topologies},
          {"virtual_topologies", row.virtual_topologies},
          {"real_topologies", row.real_topologies},
          {"avg_demands_per_topology", row.avg_demands_per_topology},
          {"avg_demands_per_virtual", row.avg_demands_per_virtual},
          {"avg_demands_per_real", row.avg_demands_per_real},
          {"mean_robustness", row.mean_robustness},
          {"max_robustness", row.max_robustness},
          {"runtime_s",
           {{"total", r.timing.total_s},
            {"intervals", r.timing.intervals_s},
            {"cover", r.timing.cover_s},
            {"mtr", r.timing.mtr_s}}}};
}

// Runs both designers for every (instance, seed), in suite then seed order,
// and writes results.csv, timings.csv, robustness.csv, results.json,
// manifest.json and (optionally) plans/ under out_dir. A failing run is
// recorded in its status column and the rest continue.
inline ExperimentSummary run_experiment(const std::vector<SuiteEntry>& suite,
                                        const std::vector<std::uint64_t>& seeds,
                                        const std::filesystem::path& out_dir,
                                        const ExperimentConfig& cfg) {
  std::filesystem::create_directories(out_dir);
  ExperimentSummary summary;
  std::vector<std::string> metric_names{"delay", "loss"};
  if (!suite.empty()) metric_names = suite.front().instance.metrics.names();

  for (const SuiteEntry& entry : suite) {
    for (std::uint64_t seed : seeds) {
      for (const char* method : {"mtr", "vmtr"}) {
        RunResult r = detail::run_one(entry, method, seed, cfg);
        if (r.status != "ok") ++summary.failures;
        if (cfg.write_plans && r.plan) {
          write_file_atomic(out_dir / "plans" /
                                (entry.id + "_" + method + "_s" +
                                 std::to_string(seed) + ".json"),
                            dump_json(plan_to_json(*r.plan)));
        }
        summary.runs.push_back(std::move(r));
      }
      // Keep partial results on disk as the suite progresses.
      write_file_atomic(out_dir / "results.csv", results_csv(summary.runs));
    }
  }

  write_file_atomic(out_dir / "results.csv", results_csv(summary.runs));
  write_file_atomic(out_dir / "timings.csv", timings_csv(summary.runs));
  write_file_atomic(out_dir / "robustness.csv",
                    robustness_csv(summary.runs, metric_names));
  Json runs = Json::array();
  for (const RunResult& r : summary.runs) runs.push_back(run_to_json(r));
  write_file_atomic(out_dir / "results.json", dump_json(runs));

  Json instances = Json::array();
  for (const SuiteEntry& e : suite) {
    instances.push_back({{"id", e.id},
                         {"nodes", e.instance.network.num_nodes()},
                         {"arcs", e.instance.network.num_arcs()},
                         {"demands", e.instance.demands.size()},
                         {"provenance", instance_to_json(e.instance)["provenance"]}});
  }
  const Json manifest = {
      {"tool", "topoforge"},
      {"version", kToolVersion},
      {"results_csv_version", kResultsCsvVersion},
      {"seeds", seeds},
      {"instances", std::move(instances)},
      {"config",
       {{"max_iterations", cfg.mtr.max_iterations},
        {"weight_min", cfg.mtr.weight_min},
        {"weight_max", cfg.mtr.weight_max},
        {"step_epsilon", cfg.mtr.step_epsilon},
        {"tamcra_paths", cfg.mtr.tamcra_paths},
        {"literal_down_sign", cfg.mtr.literal_down_sign},
        {"literal_fallback_weights", cfg.mtr.literal_fallback_weights},
        {"lambda_placement", placement_name(cfg.placement)}}}};
  write_file_atomic(out_dir / "manifest.json", dump_json(manifest));
  return summary;
}

}  // namespace topoforge

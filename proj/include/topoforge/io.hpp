#pragma once

// JSON forms of networks, demands, instances and plans, plus atomic file
// writes. Keys are emitted in sorted order so output is byte-stable.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include <nlohmann/json.hpp>

#include "topoforge/error.hpp"
#include "topoforge/instance.hpp"
#include "topoforge/metrics.hpp"
#include "topoforge/network.hpp"
#include "topoforge/quantity.hpp"
#include "topoforge/vmtr.hpp"

namespace topoforge {

using Json = nlohmann::json;

namespace detail {

template <typename T>
T json_field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw InvalidInputError(std::string("missing JSON field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInputError(std::string("bad JSON field '") + key + "': " + e.what());
  }
}

}  // namespace detail

inline Json network_to_json(const Network& net) {
  Json nodes = Json::array();
  for (const Node& v : net.nodes()) {
    nodes.push_back({{"id", v.id}, {"x", v.x}, {"y", v.y}});
  }
  Json arcs = Json::array();
  for (const Arc& a : net.arcs()) {
    arcs.push_back({{"id", a.id}, {"tail", a.tail}, {"head", a.head},
                    {"capacity", a.capacity}});
  }
  return {{"nodes", std::move(nodes)}, {"arcs", std::move(arcs)}};
}

inline Network network_from_json(const Json& j) {
  std::vector<Node> nodes;
  for (const Json& v : detail::json_field<Json>(j, "nodes")) {
    nodes.push_back({detail::json_field<NodeId>(v, "id"),
                     detail::json_field<double>(v, "x"),
                     detail::json_field<double>(v, "y")});
  }
  std::vector<Arc> arcs;
  for (const Json& a : detail::json_field<Json>(j, "arcs")) {
    arcs.push_back({detail::json_field<ArcId>(a, "id"),
                    detail::json_field<NodeId>(a, "tail"),
                    detail::json_field<NodeId>(a, "head"),
                    detail::json_field<double>(a, "capacity")});
  }
  return Network(std::move(nodes), std::move(arcs));
}

inline Json metrics_to_json(const MetricSet& ms) {
  Json values = Json::array();
  for (std::size_t t = 0; t < ms.size(); ++t) values.push_back(ms.values(t));
  return {{"names", ms.names()}, {"values", std::move(values)}};
}

inline MetricSet metrics_from_json(const Json& j) {
  return MetricSet(detail::json_field<std::vector<std::string>>(j, "names"),
                   detail::json_field<std::vector<std::vector<double>>>(j, "values"));
}

inline Json demand_to_json(const Demand& k) {
  std::vector<double> bounds;
  for (Ticks b : k.bounds) bounds.push_back(ticks_to_value(b));
  return {{"id", k.id}, {"src", k.src}, {"dst", k.dst}, {"bounds", bounds}};
}

inline Demand demand_from_json(const Json& j) {
  return make_demand(detail::json_field<DemandId>(j, "id"),
                     detail::json_field<NodeId>(j, "src"),
                     detail::json_field<NodeId>(j, "dst"),
                     detail::json_field<std::vector<double>>(j, "bounds"));
}

inline Json demands_to_json(const std::vector<Demand>& demands) {
  Json list = Json::array();
  for (const Demand& k : demands) list.push_back(demand_to_json(k));
  return {{"demands", std::move(list)}};
}

inline std::vector<Demand> demands_from_json(const Json& j) {
  std::vector<Demand> out;
  for (const Json& k : detail::json_field<Json>(j, "demands")) {
    out.push_back(demand_from_json(k));
  }
  return out;
}

inline Json instance_to_json(const InstanceSpec& inst) {
  const Provenance& p = inst.provenance;
  Json prov = {{"source", p.source},
               {"kappa", p.kappa},
               {"epsilon_b", p.epsilon_b},
               {"distance_mode", to_string(p.distance_mode)},
               {"bounds", to_string(p.bound_mode)}};
  prov["seed"] = p.seed ? Json(*p.seed) : Json(nullptr);
  return {{"network", network_to_json(inst.network)},
          {"metrics", metrics_to_json(inst.metrics)},
          {"demands", demands_to_json(inst.demands)["demands"]},
          {"provenance", std::move(prov)}};
}

inline InstanceSpec instance_from_json(const Json& j) {
  InstanceSpec inst;
  inst.network = network_from_json(detail::json_field<Json>(j, "network"));
  inst.metrics = metrics_from_json(detail::json_field<Json>(j, "metrics"));
  check_metrics_match(inst.network, inst.metrics);
  inst.demands = demands_from_json(j);
  for (const Demand& k : inst.demands) {
    if (!inst.network.has_node(k.src) || !inst.network.has_node(k.dst)) {
      throw InvalidInputError("demand " + std::to_string(k.id) +
                              " references an unknown node");
    }
    if (k.bounds.size() != inst.metrics.size()) {
      throw InvalidInputError("demand " + std::to_string(k.id) +
                              " needs one bound per metric");
    }
  }
  if (j.contains("provenance")) {
    const Json& p = j.at("provenance");
    Provenance& out = inst.provenance;
    out.source = p.value("source", "");
    if (p.contains("seed") && !p.at("seed").is_null()) {
      out.seed = p.at("seed").get<std::uint64_t>();
    }
    out.kappa = p.value("kappa", 0.0);
    out.epsilon_b = p.value("epsilon_b", kDefaultEpsilonB);
    out.distance_mode = parse_distance_mode(p.value("distance_mode", "euclidean"));
    out.bound_mode = parse_bound_mode(p.value("bounds", "cross"));
  }
  return inst;
}

inline Json plan_to_json(const DesignPlan& plan) {
  Json topologies = Json::array();
  for (const VirtualTopology& v : plan.virtual_topologies) {
    std::vector<double> approx;
    std::vector<std::string> exact;
    for (const Rational& c : v.lambda) {
      approx.push_back(to_double(c));
      exact.push_back(to_string(c));
    }
    topologies.push_back({{"kind", "virtual"},
                          {"lambda", approx},
                          {"lambda_exact", exact},
                          {"stab_point", to_string(v.stab_point)},
                          {"demands", v.assigned}});
  }
  for (const RealTopology& r : plan.real_topologies) {
    topologies.push_back(
        {{"kind", "real"}, {"weights", r.weights}, {"demands", r.assigned}});
  }
  return {{"topologies", std::move(topologies)},
          {"discarded_to_mtr", plan.discarded_to_mtr}};
}

inline DesignPlan plan_from_json(const Json& j) {
  DesignPlan plan;
  for (const Json& t : detail::json_field<Json>(j, "topologies")) {
    const auto kind = detail::json_field<std::string>(t, "kind");
    const auto demands = detail::json_field<std::vector<DemandId>>(t, "demands");
    if (kind == "real") {
      plan.real_topologies.push_back(
          {detail::json_field<WeightVector>(t, "weights"), demands});
    } else if (kind == "virtual") {
      VirtualTopology v;
      if (t.contains("lambda_exact")) {
        for (const auto& s : detail::json_field<std::vector<std::string>>(t, "lambda_exact")) {
          v.lambda.push_back(parse_rational(s));
        }
      } else {
        for (double c : detail::json_field<std::vector<double>>(t, "lambda")) {
          v.lambda.push_back(rational_from_double(c));
        }
      }
      v.stab_point = t.contains("stab_point")
                         ? parse_rational(t.at("stab_point").get<std::string>())
                         : (v.lambda.size() > 1 ? v.lambda[1] : Rational(0));
      v.assigned = demands;
      plan.virtual_topologies.push_back(std::move(v));
    } else {
      throw InvalidInputError("unknown topology kind '" + kind + "'");
    }
  }
  if (j.contains("discarded_to_mtr")) {
    plan.discarded_to_mtr = j.at("discarded_to_mtr").get<std::vector<DemandId>>();
  }
  return plan;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInputError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline Json read_json_file(const std::filesystem::path& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInputError(path.string() + ": " + e.what());
  }
}

// Writes to a sibling temporary file, then renames over the target.
inline void write_file_atomic(const std::filesystem::path& path,
                              const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInputError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw InvalidInputError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace topoforge

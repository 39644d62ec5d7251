#pragma once

// Problem instances: SNDlib native-format ingestion, metric derivation
// (delay from geometry, additive loss from capacity), demand generation with
// tightened bounds, and a random geometric generator for desk-scale suites.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "topoforge/csp.hpp"
#include "topoforge/error.hpp"
#include "topoforge/metrics.hpp"
#include "topoforge/network.hpp"
#include "topoforge/parallel.hpp"
#include "topoforge/quantity.hpp"
#include "topoforge/shortest_paths.hpp"

namespace topoforge {

inline constexpr std::size_t kDelayMetric = 0;
inline constexpr std::size_t kLossMetric = 1;

enum class DistanceMode { kAuto, kEuclidean, kHaversine };
enum class BoundMode { kCross, kLiteral };

inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kDefaultEpsilonB = 0.05;

inline std::string to_string(DistanceMode m) {
  switch (m) {
    case DistanceMode::kEuclidean: return "euclidean";
    case DistanceMode::kHaversine: return "haversine";
    case DistanceMode::kAuto: break;
  }
  return "auto";
}

inline DistanceMode parse_distance_mode(const std::string& s) {
  if (s == "auto") return DistanceMode::kAuto;
  if (s == "euclidean") return DistanceMode::kEuclidean;
  if (s == "haversine") return DistanceMode::kHaversine;
  throw InvalidInputError("unknown distance mode: " + s);
}

inline std::string to_string(BoundMode m) {
  return m == BoundMode::kCross ? "cross" : "literal";
}

inline BoundMode parse_bound_mode(const std::string& s) {
  if (s == "cross") return BoundMode::kCross;
  if (s == "literal") return BoundMode::kLiteral;
  throw InvalidInputError("unknown bound mode: " + s);
}

struct Provenance {
  std::string source;  // SNDlib network name, file stem or "synthetic"
  std::optional<std::uint64_t> seed;
  double kappa = 0.0;
  double epsilon_b = kDefaultEpsilonB;
  DistanceMode distance_mode = DistanceMode::kEuclidean;
  BoundMode bound_mode = BoundMode::kCross;

  bool operator==(const Provenance&) const = default;
};

struct InstanceSpec {
  Network network;
  MetricSet metrics;
  std::vector<Demand> demands;
  Provenance provenance;

  bool operator==(const InstanceSpec&) const = default;
};

// ---------------------------------------------------------------- SNDlib

namespace detail {

struct SndlibLine {
  int number;
  std::string text;
};

inline std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  std::string out = hash == std::string::npos ? line : line.substr(0, hash);
  const auto first = out.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = out.find_last_not_of(" \t\r");
  return out.substr(first, last - first + 1);
}

// Tokens with parentheses split off as separate tokens.
inline std::vector<std::string> sndlib_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == '(' || c == ')' || std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
      if (c == '(' || c == ')') out.emplace_back(1, c);
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

inline double parse_number(const std::string& tok, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size() || !std::isfinite(v)) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, "expected a number, got '" + tok + "'");
  }
}

// Lines inside "<NAME> (" ... ")"; nullopt when the section is absent.
inline std::optional<std::vector<SndlibLine>> sndlib_section(
    const std::vector<SndlibLine>& lines, const std::string& name) {
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto toks = sndlib_tokens(lines[i].text);
    if (toks.size() == 2 && toks[0] == name && toks[1] == "(") {
      std::vector<SndlibLine> body;
      for (std::size_t j = i + 1; j < lines.size(); ++j) {
        if (lines[j].text == ")") return body;
        body.push_back(lines[j]);
      }
      throw ParseError(lines[i].number, "section " + name + " is not closed");
    }
  }
  return std::nullopt;
}

}  // namespace detail

// Native plain-text format. Link i becomes arcs 2i (source to target) and
// 2i+1 (reverse). Capacity is the pre-installed capacity when positive,
// otherwise the first module capacity.
inline Network parse_sndlib(const std::string& text) {
  std::vector<detail::SndlibLine> lines;
  {
    std::istringstream in(text);
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
      ++number;
      if (!raw.empty() && raw.front() == '?') continue;  // format banner
      auto clean = detail::strip_comment(raw);
      if (!clean.empty()) lines.push_back({number, std::move(clean)});
    }
  }
  const int last_line = lines.empty() ? 1 : lines.back().number;
  const auto node_lines = detail::sndlib_section(lines, "NODES");
  if (!node_lines) throw ParseError(last_line, "missing NODES section");
  const auto link_lines = detail::sndlib_section(lines, "LINKS");
  if (!link_lines) throw ParseError(last_line, "missing LINKS section");

  std::map<std::string, NodeId> ids;
  std::vector<Node> nodes;
  for (const auto& [number, body] : *node_lines) {
    const auto toks = detail::sndlib_tokens(body);
    if (toks.empty()) continue;
    if (toks.size() == 1) {
      throw MissingCoordinatesError(number, "node " + toks[0] + " has no coordinates");
    }
    if (toks.size() != 5 || toks[1] != "(" || toks[4] != ")") {
      throw ParseError(number, "malformed node line");
    }
    if (ids.contains(toks[0])) {
      throw ParseError(number, "duplicate node " + toks[0]);
    }
    const auto id = static_cast<NodeId>(nodes.size());
    ids[toks[0]] = id;
    nodes.push_back({id, detail::parse_number(toks[2], number),
                     detail::parse_number(toks[3], number)});
  }

  std::vector<Arc> arcs;
  for (const auto& [number, body] : *link_lines) {
    const auto toks = detail::sndlib_tokens(body);
    if (toks.empty()) continue;
    // id ( src dst ) pre_cap pre_cost routing_cost setup_cost ( {cap cost}* )
    if (toks.size() < 5 || toks[1] != "(" || toks[4] != ")") {
      throw ParseError(number, "malformed link line");
    }
    const auto src = ids.find(toks[2]);
    const auto dst = ids.find(toks[3]);
    if (src == ids.end() || dst == ids.end()) {
      throw ParseError(number, "link " + toks[0] + " references an unknown node");
    }
    double capacity = 0.0;
    if (toks.size() > 5) capacity = detail::parse_number(toks[5], number);
    if (!(capacity > 0.0)) {
      const auto open = std::find(toks.begin() + 5, toks.end(), "(");
      if (open != toks.end() && open + 1 != toks.end() && *(open + 1) != ")") {
        capacity = detail::parse_number(*(open + 1), number);
      }
    }
    if (!(capacity > 0.0)) {
      throw MissingCapacityError(number, "link " + toks[0] + " has no capacity");
    }
    const auto a = static_cast<ArcId>(arcs.size());
    arcs.push_back({a, src->second, dst->second, capacity});
    arcs.push_back({a + 1, dst->second, src->second, capacity});
  }
  try {
    return Network(std::move(nodes), std::move(arcs));
  } catch (const InvalidInputError& e) {
    throw ParseError(link_lines->empty() ? last_line : link_lines->front().number,
                     e.what());
  }
}

// Inverse of parse_sndlib for networks whose arcs come in reverse pairs
// (2i, 2i+1) with equal capacity. Nodes are named N<id>.
inline std::string serialize_sndlib(const Network& net) {
  if (net.num_arcs() % 2 != 0) {
    throw InvalidInputError("arcs must come in reverse pairs");
  }
  auto num = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  std::ostringstream out;
  out << "?SNDlib native format; type: network; version: 1.0\n";
  out << "NODES (\n";
  for (const Node& v : net.nodes()) {
    out << "  N" << v.id << " ( " << num(v.x) << " " << num(v.y) << " )\n";
  }
  out << ")\n\nLINKS (\n";
  for (std::size_t i = 0; i < net.num_arcs(); i += 2) {
    const Arc& fwd = net.arc(static_cast<ArcId>(i));
    const Arc& rev = net.arc(static_cast<ArcId>(i + 1));
    if (rev.tail != fwd.head || rev.head != fwd.tail ||
        rev.capacity != fwd.capacity) {
      throw InvalidInputError("arc " + std::to_string(i + 1) +
                              " is not the reverse of arc " + std::to_string(i));
    }
    out << "  L" << i / 2 << " ( N" << fwd.tail << " N" << fwd.head << " ) "
        << num(fwd.capacity) << " 0.00 0.00 0.00 ( )\n";
  }
  out << ")\n";
  return out.str();
}

// ------------------------------------------------------------- metrics

inline DistanceMode resolve_distance_mode(const Network& net, DistanceMode mode) {
  if (mode != DistanceMode::kAuto) return mode;
  const bool lon_lat = std::all_of(net.nodes().begin(), net.nodes().end(),
                                   [](const Node& v) {
                                     return std::abs(v.x) <= 180.0 &&
                                            std::abs(v.y) <= 90.0;
                                   });
  return lon_lat ? DistanceMode::kHaversine : DistanceMode::kEuclidean;
}

// x is longitude and y latitude, in degrees; result in kilometres.
inline double haversine_km(const Node& a, const Node& b) {
  constexpr double kRad = std::numbers::pi / 180.0;
  const double dlat = (b.y - a.y) * kRad;
  const double dlon = (b.x - a.x) * kRad;
  const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(a.y * kRad) * std::cos(b.y * kRad) *
                       std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

inline double node_distance(const Node& a, const Node& b, DistanceMode mode) {
  if (mode == DistanceMode::kHaversine) return haversine_km(a, b);
  return std::hypot(b.x - a.x, b.y - a.y);
}

inline double min_capacity(const Network& net) {
  double lo = std::numeric_limits<double>::infinity();
  for (const Arc& a : net.arcs()) lo = std::min(lo, a.capacity);
  return lo;
}

// Largest loss probability 2.5%, reached on the smallest-capacity arc.
inline double default_kappa(const Network& net) {
  if (net.num_arcs() == 0) return 1.0;
  return 0.5 * min_capacity(net) * 0.05;
}

// Loss probability kappa / capacity, made additive as -ln(1 - p).
inline double additive_loss(double kappa, double capacity) {
  return -std::log1p(-(kappa / capacity));
}

inline MetricSet derive_metrics(const Network& net, double kappa,
                                DistanceMode mode,
                                std::vector<std::string>* warnings = nullptr) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw InvalidKappaError("kappa must be positive and finite");
  }
  mode = resolve_distance_mode(net, mode);
  std::vector<double> delay(net.num_arcs());
  std::vector<double> loss(net.num_arcs());
  for (const Arc& a : net.arcs()) {
    const double p = kappa / a.capacity;
    if (p >= 1.0) {
      throw InvalidKappaError("kappa " + std::to_string(kappa) +
                              " gives loss probability >= 1 on arc " +
                              std::to_string(a.id));
    }
    loss[a.id] = additive_loss(kappa, a.capacity);
    delay[a.id] = node_distance(net.node(a.tail), net.node(a.head), mode);
    if (delay[a.id] == 0.0 && warnings) {
      warnings->push_back("arc " + std::to_string(a.id) +
                          " joins nodes at identical coordinates; delay is 0");
    }
  }
  return MetricSet({"delay", "loss"}, {std::move(delay), std::move(loss)});
}

// ------------------------------------------------------------- demands

namespace detail {

inline Ticks tightened(double factor, Ticks consumption) {
  return static_cast<Ticks>(std::floor(factor * static_cast<double>(consumption)));
}

}  // namespace detail

// One demand per ordered pair that no single-metric route can serve yet
// some path can. Cross mode bounds the loss by the delay-route's loss and
// the delay by the loss-route's delay, each tightened by (1 - epsilon_b).
inline std::vector<Demand> generate_demands(const Network& net,
                                            const MetricSet& ms,
                                            double epsilon_b = kDefaultEpsilonB,
                                            BoundMode mode = BoundMode::kCross) {
  check_metrics_match(net, ms);
  if (ms.size() != 2) {
    throw InvalidInputError("demand generation needs delay and loss metrics");
  }
  if (!(epsilon_b > 0.0 && epsilon_b < 1.0)) {
    throw InvalidInputError("epsilon_b must lie in (0, 1)");
  }
  const auto n = static_cast<NodeId>(net.num_nodes());
  const double factor = 1.0 - epsilon_b;
  const auto& delay = ms.ticks(kDelayMetric);
  const auto& loss = ms.ticks(kLossMetric);

  std::vector<std::vector<std::optional<Demand>>> slots(n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t d) {
    const auto dst = static_cast<NodeId>(d);
    const auto by_delay = shortest_path_tree(net, delay, dst, Direction::kReverse);
    const auto by_loss = shortest_path_tree(net, loss, dst, Direction::kReverse);
    slots[d].resize(n);
    for (NodeId src = 0; src < n; ++src) {
      if (src == dst || !by_delay.reached(src)) continue;
      const Path delay_route = route_from_tree(net, by_delay, src);
      const Path loss_route = route_from_tree(net, by_loss, src);
      Demand k{0, src, dst, {0, 0}};
      if (mode == BoundMode::kCross) {
        k.bounds[kDelayMetric] =
            detail::tightened(factor, path_resource(loss_route, delay));
        k.bounds[kLossMetric] =
            detail::tightened(factor, path_resource(delay_route, loss));
      } else {
        k.bounds[kDelayMetric] =
            detail::tightened(factor, path_resource(delay_route, delay));
        k.bounds[kLossMetric] =
            detail::tightened(factor, path_resource(loss_route, loss));
      }
      if (k.bounds[0] <= 0 || k.bounds[1] <= 0) continue;
      if (path_meets_bounds(delay_route, ms, k) ||
          path_meets_bounds(loss_route, ms, k)) {
        continue;
      }
      if (!exact_csp(net, ms, k)) continue;
      slots[d][src] = std::move(k);
    }
  });

  std::vector<Demand> out;
  for (NodeId src = 0; src < n; ++src) {
    for (NodeId dst = 0; dst < n; ++dst) {
      if (slots[dst].empty() || !slots[dst][src]) continue;
      Demand k = *slots[dst][src];
      k.id = static_cast<DemandId>(out.size());
      out.push_back(std::move(k));
    }
  }
  return out;
}

// ---------------------------------------------------------- synthesis

inline bool strongly_connected(const Network& net) {
  if (net.num_nodes() == 0) return true;
  for (Direction dir : {Direction::kForward, Direction::kReverse}) {
    std::vector<std::int64_t> hop(net.num_arcs(), 1);
    const auto tree = shortest_path_tree(net, hop, 0, dir);
    for (NodeId v = 0; v < static_cast<NodeId>(net.num_nodes()); ++v) {
      if (!tree.reached(v)) return false;
    }
  }
  return true;
}

inline constexpr double kSynthCapacities[] = {10.0, 40.0, 100.0};

namespace detail {

// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double unit_draw(std::mt19937_64& rng) {
  return std::ldexp(static_cast<double>(rng() >> 11), -53);
}

}  // namespace detail

// Random geometric graph on the unit square: nodes i < j are joined in both
// directions when their distance is at most density * sqrt(2).
inline Network synth_network(int n, double density, std::uint64_t seed) {
  if (n < 4) throw InvalidInputError("synthetic instances need at least 4 nodes");
  if (!(density > 0.0 && density <= 1.0)) {
    throw InvalidInputError("density must lie in (0, 1]");
  }
  std::mt19937_64 rng(seed);
  std::vector<Node> nodes;
  for (NodeId v = 0; v < n; ++v) {
    const double x = detail::unit_draw(rng);
    const double y = detail::unit_draw(rng);
    nodes.push_back({v, x, y});
  }
  const double reach = density * std::numbers::sqrt2;
  std::vector<Arc> arcs;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      if (std::hypot(nodes[i].x - nodes[j].x, nodes[i].y - nodes[j].y) > reach) {
        continue;
      }
      const double cap = kSynthCapacities[rng() % 3];
      const auto a = static_cast<ArcId>(arcs.size());
      arcs.push_back({a, i, j, cap});
      arcs.push_back({a + 1, j, i, cap});
    }
  }
  Network net(std::move(nodes), std::move(arcs));
  if (!strongly_connected(net)) {
    throw DisconnectedError("synthetic graph with n=" + std::to_string(n) +
                            ", density=" + std::to_string(density) +
                            ", seed=" + std::to_string(seed) +
                            " is disconnected; raise the density or try "
                            "another seed");
  }
  return net;
}

inline InstanceSpec synth_instance(int n, double density, std::uint64_t seed,
                                   double epsilon_b = kDefaultEpsilonB,
                                   std::optional<double> kappa = std::nullopt,
                                   BoundMode bound_mode = BoundMode::kCross) {
  InstanceSpec inst;
  inst.network = synth_network(n, density, seed);
  inst.provenance.source = "synthetic";
  inst.provenance.seed = seed;
  inst.provenance.kappa = kappa.value_or(default_kappa(inst.network));
  inst.provenance.epsilon_b = epsilon_b;
  inst.provenance.distance_mode = DistanceMode::kEuclidean;
  inst.provenance.bound_mode = bound_mode;
  inst.metrics = derive_metrics(inst.network, inst.provenance.kappa,
                                DistanceMode::kEuclidean);
  inst.demands =
      generate_demands(inst.network, inst.metrics, epsilon_b, bound_mode);
  return inst;
}

inline InstanceSpec instance_from_network(Network net, std::string source,
                                          double epsilon_b = kDefaultEpsilonB,
                                          std::optional<double> kappa = std::nullopt,
                                          DistanceMode mode = DistanceMode::kAuto,
                                          BoundMode bound_mode = BoundMode::kCross,
                                          std::vector<std::string>* warnings = nullptr) {
  InstanceSpec inst;
  inst.network = std::move(net);
  inst.provenance.source = std::move(source);
  inst.provenance.kappa = kappa.value_or(default_kappa(inst.network));
  inst.provenance.epsilon_b = epsilon_b;
  inst.provenance.distance_mode = resolve_distance_mode(inst.network, mode);
  inst.provenance.bound_mode = bound_mode;
  inst.metrics = derive_metrics(inst.network, inst.provenance.kappa,
                                inst.provenance.distance_mode, warnings);
  inst.demands =
      generate_demands(inst.network, inst.metrics, epsilon_b, bound_mode);
  return inst;
}

}  // namespace topoforge

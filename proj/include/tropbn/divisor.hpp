#pragma once

#include <json.hpp>

#include <algorithm>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "tropbn/error.hpp"
#include "tropbn/graph_ops.hpp"
#include "tropbn/lattice.hpp"
#include "tropbn/rational.hpp"

namespace tropbn {

/// Integer chips on the nodes of a lattice model.
class Divisor {
 public:
  Divisor() = default;
  explicit Divisor(std::size_t nodes) : chips_(nodes, 0) {}
  explicit Divisor(std::vector<long> chips) : chips_(std::move(chips)) {}
  explicit Divisor(const LatticeModel& m) : chips_(m.node_count(), 0) {}

  std::size_t size() const noexcept { return chips_.size(); }
  long operator[](std::size_t n) const { return chips_[n]; }
  long& operator[](std::size_t n) { return chips_[n]; }
  const std::vector<long>& chips() const noexcept { return chips_; }

  long degree() const { return std::accumulate(chips_.begin(), chips_.end(), 0L); }
  bool is_effective() const {
    return std::all_of(chips_.begin(), chips_.end(), [](long c) { return c >= 0; });
  }
  bool is_zero() const {
    return std::all_of(chips_.begin(), chips_.end(), [](long c) { return c == 0; });
  }
  std::vector<std::size_t> support() const {
    std::vector<std::size_t> out;
    for (std::size_t n = 0; n < chips_.size(); ++n) {
      if (chips_[n] != 0) out.push_back(n);
    }
    return out;
  }

  Divisor& operator+=(const Divisor& o) {
    check(o);
    for (std::size_t n = 0; n < chips_.size(); ++n) chips_[n] += o.chips_[n];
    return *this;
  }
  Divisor& operator-=(const Divisor& o) {
    check(o);
    for (std::size_t n = 0; n < chips_.size(); ++n) chips_[n] -= o.chips_[n];
    return *this;
  }
  friend Divisor operator+(Divisor a, const Divisor& b) { return a += b; }
  friend Divisor operator-(Divisor a, const Divisor& b) { return a -= b; }
  friend Divisor operator-(Divisor a) {
    for (auto& c : a.chips_) c = -c;
    return a;
  }
  friend bool operator==(const Divisor& a, const Divisor& b) { return a.chips_ == b.chips_; }

 private:
  void check(const Divisor& o) const {
    if (o.chips_.size() != chips_.size()) {
      throw Error(ErrorCode::Precondition, "divisors live on different lattices");
    }
  }

  std::vector<long> chips_;
};

inline Divisor point_divisor(const LatticeModel& m, std::size_t node, long mult = 1) {
  Divisor d(m);
  d[node] += mult;
  return d;
}

inline Divisor divisor_of_nodes(const LatticeModel& m, const std::vector<std::size_t>& nodes) {
  Divisor d(m);
  for (auto n : nodes) d[n] += 1;
  return d;
}

/// K = sum over points of (valence - 2).
inline Divisor canonical_divisor(const LatticeModel& m) {
  Divisor k(m);
  for (std::size_t n = 0; n < m.node_count(); ++n) k[n] = static_cast<long>(m.degree(n)) - 2;
  return k;
}

/// Moves a divisor between lattices through a map on metric points (used for
/// refinement and bridge contraction).
inline Divisor transport(const LatticeModel& from, const Divisor& d, const LatticeModel& to,
                         const std::function<MetricPoint(const MetricPoint&)>& map) {
  Divisor out(to);
  for (auto n : d.support()) out[to.node(map(from.point(n)))] += d[n];
  return out;
}

inline Divisor refine(const LatticeModel& from, const Divisor& d, const LatticeModel& to) {
  return transport(from, d, to, [](const MetricPoint& p) { return p; });
}

/// Pushes a divisor through bridge contraction: chips on a bridge land on the
/// merged vertex.
inline Divisor contract_divisor(const LatticeModel& from, const Divisor& d, const Contraction& c,
                                const LatticeModel& to) {
  const auto& g = from.base();
  return transport(from, d, to, [&](const MetricPoint& p) {
    if (p.is_vertex()) return MetricPoint::at_vertex(c.graph.vertex(c.vertex_map[*g.vertex_index(p.vertex)]));
    const auto e = *g.edge_index(p.edge);
    if (c.edge_map[e] < 0) return MetricPoint::at_vertex(c.graph.vertex(c.vertex_map[g.edge(e).tail]));
    return p;
  });
}

// ---------------------------------------------------------------------------
// JSON: {"chips":[{"at":{"vertex":"v1"},"mult":1},{"at":{"edge":"e3","offset":"1/3"},"mult":2}]}

inline nlohmann::json point_to_json(const MetricPoint& p) {
  if (p.is_vertex()) return {{"vertex", p.vertex}};
  return {{"edge", p.edge}, {"offset", to_string(p.offset)}};
}

inline MetricPoint point_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::Parse, "point must be an object");
  if (j.contains("vertex")) return MetricPoint::at_vertex(j["vertex"].get<std::string>());
  if (j.contains("edge") && j.contains("offset")) {
    return MetricPoint::on_edge(j["edge"].get<std::string>(), parse_rational(j["offset"].get<std::string>()));
  }
  throw Error(ErrorCode::Parse, "point needs \"vertex\" or \"edge\" and \"offset\"");
}

inline nlohmann::json to_json(const LatticeModel& m, const Divisor& d) {
  nlohmann::json chips = nlohmann::json::array();
  for (auto n : d.support()) chips.push_back({{"at", point_to_json(m.point(n))}, {"mult", d[n]}});
  return {{"chips", chips}};
}

inline Divisor divisor_from_json(const LatticeModel& m, const nlohmann::json& doc) {
  try {
    if (!doc.is_object() || !doc.contains("chips") || !doc["chips"].is_array()) {
      throw Error(ErrorCode::Parse, "divisor document needs a \"chips\" array");
    }
    Divisor d(m);
    for (const auto& chip : doc["chips"]) {
      if (!chip.contains("at")) throw Error(ErrorCode::Parse, "chip entries need \"at\"");
      const long mult = chip.contains("mult") ? chip["mult"].get<long>() : 1;
      d[m.node(point_from_json(chip["at"]))] += mult;
    }
    return d;
  } catch (const nlohmann::json::exception& err) {
    throw Error(ErrorCode::Parse, err.what());
  }
}

/// Firing script as a point -> count object.
inline nlohmann::json script_to_json(const LatticeModel& m, const std::vector<long>& script) {
  nlohmann::json out = nlohmann::json::object();
  for (std::size_t n = 0; n < script.size(); ++n) {
    if (script[n] != 0) out[to_string(m.point(n))] = script[n];
  }
  return out;
}

}  // namespace tropbn

#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <string>
#include <tuple>
#include <vector>

#include "tropbn/error.hpp"
#include "tropbn/metric_graph.hpp"
#include "tropbn/rational.hpp"

namespace tropbn {

/// A point of the metric graph: either a vertex, or an edge plus an offset
/// measured from the edge's tail.
struct MetricPoint {
  std::string vertex;
  std::string edge;
  Rational offset{0};

  static MetricPoint at_vertex(std::string v) { return {std::move(v), {}, Rational(0)}; }
  static MetricPoint on_edge(std::string e, Rational t) { return {{}, std::move(e), t}; }

  bool is_vertex() const noexcept { return edge.empty(); }

  friend bool operator==(const MetricPoint& a, const MetricPoint& b) {
    return a.vertex == b.vertex && a.edge == b.edge && a.offset == b.offset;
  }
  friend bool operator<(const MetricPoint& a, const MetricPoint& b) {
    return std::tie(a.edge, a.vertex, a.offset) < std::tie(b.edge, b.vertex, b.offset);
  }
};

inline std::string to_string(const MetricPoint& p) {
  if (p.is_vertex()) return p.vertex;
  return p.edge + "@" + to_string(p.offset);
}

/// The graph subdivided at resolution N: one node per point at distance a
/// multiple of 1/N from the tail of its edge. Nodes 0..|V|-1 are the vertices;
/// interior nodes follow, grouped by edge index, in increasing offset.
class LatticeModel {
 public:
  LatticeModel(MetricGraph base, std::int64_t resolution)
      : base_(std::move(base)), resolution_(resolution) {
    if (resolution_ < 1) throw Error(ErrorCode::Precondition, "resolution must be positive");
    const auto n_vertices = base_.vertex_count();
    std::size_t next = n_vertices;
    steps_.reserve(base_.edge_count());
    first_interior_.reserve(base_.edge_count());
    for (const auto& e : base_.edges()) {
      const Rational scaled = e.length * resolution_;
      if (!is_integer(scaled)) {
        throw Error(ErrorCode::ResolutionTooCoarse,
                    "edge \"" + e.id + "\" of length " + to_string(e.length) +
                        " is not a multiple of 1/" + std::to_string(resolution_));
      }
      const auto k = scaled.numerator();
      if (e.is_loop() && k < 2) {
        throw Error(ErrorCode::LoopTooShort,
                    "loop \"" + e.id + "\" needs at least one interior node at resolution " +
                        std::to_string(resolution_));
      }
      steps_.push_back(k);
      first_interior_.push_back(next);
      next += static_cast<std::size_t>(k - 1);
    }
    node_count_ = next;
    node_edge_.assign(node_count_, unset);
    node_step_.assign(node_count_, 0);
    for (std::size_t e = 0; e < base_.edge_count(); ++e) {
      for (std::int64_t s = 1; s < steps_[e]; ++s) {
        const auto n = first_interior_[e] + static_cast<std::size_t>(s - 1);
        node_edge_[n] = e;
        node_step_[n] = s;
      }
    }
    // CSR adjacency, with repeats for parallel unit edges
    std::vector<std::vector<std::size_t>> adj(node_count_);
    for (std::size_t e = 0; e < base_.edge_count(); ++e) {
      const auto k = steps_[e];
      for (std::int64_t s = 0; s < k; ++s) {
        const auto a = node_on_edge(e, s);
        const auto b = node_on_edge(e, s + 1);
        adj[a].push_back(b);
        adj[b].push_back(a);
      }
    }
    offsets_.assign(node_count_ + 1, 0);
    for (std::size_t n = 0; n < node_count_; ++n) {
      std::sort(adj[n].begin(), adj[n].end());
      offsets_[n + 1] = offsets_[n] + adj[n].size();
    }
    neighbors_.reserve(offsets_.back());
    for (const auto& list : adj) neighbors_.insert(neighbors_.end(), list.begin(), list.end());

    base_node_ = 0;
    for (std::size_t v = 1; v < n_vertices; ++v) {
      if (base_.vertex(v) < base_.vertex(base_node_)) base_node_ = v;
    }
  }

  const MetricGraph& base() const noexcept { return base_; }
  std::int64_t resolution() const noexcept { return resolution_; }
  std::size_t node_count() const noexcept { return node_count_; }
  long genus() const noexcept { return base_.genus(); }

  /// Number of unit segments edge e is cut into.
  std::int64_t steps(std::size_t e) const { return steps_.at(e); }

  /// Node at `step` unit segments from the tail of edge e (0 and steps(e) are
  /// the endpoints).
  std::size_t node_on_edge(std::size_t e, std::int64_t step) const {
    const auto& ed = base_.edge(e);
    if (step <= 0) return ed.tail;
    if (step >= steps_[e]) return ed.head;
    return first_interior_[e] + static_cast<std::size_t>(step - 1);
  }

  bool is_vertex_node(std::size_t n) const noexcept { return n < base_.vertex_count(); }
  /// Edge index and step of an interior node.
  std::size_t node_edge(std::size_t n) const { return node_edge_.at(n); }
  std::int64_t node_step(std::size_t n) const { return node_step_.at(n); }

  std::size_t degree(std::size_t n) const { return offsets_[n + 1] - offsets_[n]; }
  const std::size_t* neighbors_begin(std::size_t n) const { return neighbors_.data() + offsets_[n]; }
  const std::size_t* neighbors_end(std::size_t n) const { return neighbors_.data() + offsets_[n + 1]; }

  /// Node of the lexicographically least vertex id; the fixed base point for
  /// equivalence tests.
  std::size_t base_node() const noexcept { return base_node_; }

  MetricPoint point(std::size_t n) const {
    if (n >= node_count_) throw Error(ErrorCode::Precondition, "node index out of range");
    if (is_vertex_node(n)) return MetricPoint::at_vertex(base_.vertex(n));
    return MetricPoint::on_edge(base_.edge(node_edge_[n]).id, Rational(node_step_[n], resolution_));
  }

  std::size_t node(const MetricPoint& p) const {
    if (p.is_vertex()) {
      auto v = base_.vertex_index(p.vertex);
      if (!v) throw Error(ErrorCode::NotFound, "unknown vertex \"" + p.vertex + "\"");
      return *v;
    }
    auto e = base_.edge_index(p.edge);
    if (!e) throw Error(ErrorCode::NotFound, "unknown edge \"" + p.edge + "\"");
    const Rational scaled = p.offset * resolution_;
    if (!is_integer(scaled)) {
      throw Error(ErrorCode::ResolutionTooCoarse,
                  "offset " + to_string(p.offset) + " is not on the 1/" + std::to_string(resolution_) +
                      " lattice");
    }
    const auto step = scaled.numerator();
    if (step < 0 || step > steps_[*e]) {
      throw Error(ErrorCode::Precondition, "offset " + to_string(p.offset) + " outside edge \"" + p.edge + "\"");
    }
    return node_on_edge(*e, step);
  }

  /// Breadth-first distances (in unit steps) from `source`.
  std::vector<std::int64_t> distances(std::size_t source) const {
    std::vector<std::int64_t> dist(node_count_, -1);
    std::deque<std::size_t> queue{source};
    dist[source] = 0;
    while (!queue.empty()) {
      auto v = queue.front();
      queue.pop_front();
      for (auto it = neighbors_begin(v); it != neighbors_end(v); ++it) {
        if (dist[*it] < 0) {
          dist[*it] = dist[v] + 1;
          queue.push_back(*it);
        }
      }
    }
    return dist;
  }

  /// Nodes of valence >= 3 plus one node inside each loop of the canonical
  /// model; for a circle, two distinct nodes. This is the vertex set of a
  /// loopless model, used as the test set of the fast rank mode.
  std::vector<std::size_t> fast_test_set() const {
    std::vector<std::size_t> out;
    for (std::size_t n = 0; n < node_count_; ++n) {
      if (degree(n) >= 3) out.push_back(n);
    }
    if (out.empty()) {
      const auto dist = distances(0);
      const auto far = static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
      return {0, far};
    }
    std::vector<bool> walked(node_count_, false);
    for (auto start : std::vector<std::size_t>(out)) {
      for (auto it = neighbors_begin(start); it != neighbors_end(start); ++it) {
        if (walked[*it] || degree(*it) >= 3) continue;
        std::vector<std::size_t> path;
        auto prev = start;
        auto cur = *it;
        while (degree(cur) == 2) {
          path.push_back(cur);
          const auto* nb = neighbors_begin(cur);
          const auto next = nb[0] == prev ? nb[1] : nb[0];
          prev = cur;
          cur = next;
        }
        for (auto p : path) walked[p] = true;
        if (cur == start) out.push_back(path[path.size() / 2]);
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<std::size_t> all_nodes() const {
    std::vector<std::size_t> out(node_count_);
    for (std::size_t n = 0; n < node_count_; ++n) out[n] = n;
    return out;
  }

 private:
  static constexpr auto unset = static_cast<std::size_t>(-1);

  MetricGraph base_;
  std::int64_t resolution_;
  std::size_t node_count_ = 0;
  std::vector<std::int64_t> steps_;
  std::vector<std::size_t> first_interior_;
  std::vector<std::size_t> node_edge_;
  std::vector<std::int64_t> node_step_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> neighbors_;
  std::size_t base_node_ = 0;
};

/// Smallest N putting every vertex on the lattice and an interior node on each loop.
inline std::int64_t default_resolution(const MetricGraph& g) {
  std::int64_t n = g.length_denominator_lcm();
  for (const auto& e : g.edges()) {
    while (e.is_loop() && e.length * n < Rational(2)) n *= 2;
  }
  return n;
}

inline LatticeModel subdivide(const MetricGraph& g, std::int64_t resolution) {
  return LatticeModel(g, resolution);
}

}  // namespace tropbn

#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tropbn/error.hpp"
#include "tropbn/rational.hpp"

namespace tropbn {

/// An edge of a model. Endpoints are vertex indices; tail == head for loops.
/// Offsets of points on the edge are measured from the tail.
struct Edge {
  std::string id;
  std::size_t tail = 0;
  std::size_t head = 0;
  Rational length;

  bool is_loop() const noexcept { return tail == head; }
  std::size_t other(std::size_t v) const noexcept { return v == tail ? head : tail; }
};

/// Edge description by vertex ids, used when building a graph.
struct EdgeSpec {
  std::string id;
  std::string tail;
  std::string head;
  Rational length;
};

/// A finite connected metric graph given by one of its models.
/// Immutable once built; loops and parallel edges are allowed.
class MetricGraph {
 public:
  MetricGraph() = default;

  MetricGraph(std::vector<std::string> vertices, const std::vector<EdgeSpec>& edges)
      : vertices_(std::move(vertices)) {
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      if (!vertex_index_.emplace(vertices_[i], i).second) {
        throw Error(ErrorCode::DuplicateId, "vertex id \"" + vertices_[i] + "\" repeated");
      }
    }
    edges_.reserve(edges.size());
    for (const auto& spec : edges) {
      if (spec.length <= Rational(0)) {
        throw Error(ErrorCode::NonPositiveLength,
                    "edge \"" + spec.id + "\" has length " + to_string(spec.length));
      }
      const auto tail = vertex_index(spec.tail);
      const auto head = vertex_index(spec.head);
      if (!tail || !head) {
        throw Error(ErrorCode::DanglingEndpoint, "edge \"" + spec.id + "\" has an unknown endpoint");
      }
      if (!edge_index_.emplace(spec.id, edges_.size()).second) {
        throw Error(ErrorCode::DuplicateId, "edge id \"" + spec.id + "\" repeated");
      }
      edges_.push_back(Edge{spec.id, *tail, *head, spec.length});
    }
    incident_.assign(vertices_.size(), {});
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      incident_[edges_[e].tail].push_back(e);
      if (!edges_[e].is_loop()) incident_[edges_[e].head].push_back(e);
    }
    if (!is_connected()) throw Error(ErrorCode::Disconnected, "graph is not connected");
  }

  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<std::string>& vertices() const noexcept { return vertices_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::string& vertex(std::size_t v) const { return vertices_.at(v); }
  const Edge& edge(std::size_t e) const { return edges_.at(e); }

  /// Edge indices touching v; a loop appears once.
  const std::vector<std::size_t>& incident(std::size_t v) const { return incident_.at(v); }

  /// Number of directions emanating from v (a loop contributes two).
  std::size_t valence(std::size_t v) const {
    std::size_t val = 0;
    for (auto e : incident_.at(v)) val += edges_[e].is_loop() ? 2 : 1;
    return val;
  }

  std::optional<std::size_t> vertex_index(const std::string& id) const {
    auto it = vertex_index_.find(id);
    if (it == vertex_index_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<std::size_t> edge_index(const std::string& id) const {
    auto it = edge_index_.find(id);
    if (it == edge_index_.end()) return std::nullopt;
    return it->second;
  }

  /// First Betti number |E| - |V| + 1 of the (connected) model.
  long genus() const noexcept {
    if (vertices_.empty()) return 0;
    return static_cast<long>(edges_.size()) - static_cast<long>(vertices_.size()) + 1;
  }

  Rational total_length() const {
    Rational sum(0);
    for (const auto& e : edges_) sum += e.length;
    return sum;
  }

  /// lcm of the denominators of all edge lengths: the coarsest valid resolution.
  std::int64_t length_denominator_lcm() const {
    std::int64_t acc = 1;
    for (const auto& e : edges_) acc = lcm_accumulate(acc, e.length);
    return acc;
  }

  std::vector<EdgeSpec> edge_specs() const {
    std::vector<EdgeSpec> out;
    out.reserve(edges_.size());
    for (const auto& e : edges_) out.push_back({e.id, vertices_[e.tail], vertices_[e.head], e.length});
    return out;
  }

  /// Connectivity after deleting the edges flagged in `removed` (may be empty).
  bool is_connected(const std::vector<bool>& removed = {}) const {
    if (vertices_.empty()) return true;
    return component_labels(removed).second == 1;
  }

  /// Component label per vertex with the flagged edges deleted, plus the count.
  std::pair<std::vector<std::size_t>, std::size_t> component_labels(
      const std::vector<bool>& removed = {}) const {
    constexpr auto unset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> label(vertices_.size(), unset);
    std::size_t count = 0;
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < vertices_.size(); ++s) {
      if (label[s] != unset) continue;
      label[s] = count;
      stack.push_back(s);
      while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        for (auto e : incident_[v]) {
          if (!removed.empty() && removed[e]) continue;
          const auto w = edges_[e].other(v);
          if (label[w] == unset) {
            label[w] = count;
            stack.push_back(w);
          }
        }
      }
      ++count;
    }
    return {std::move(label), count};
  }

  friend bool operator==(const MetricGraph& a, const MetricGraph& b) {
    if (a.vertices_ != b.vertices_ || a.edges_.size() != b.edges_.size()) return false;
    for (std::size_t i = 0; i < a.edges_.size(); ++i) {
      const auto& x = a.edges_[i];
      const auto& y = b.edges_[i];
      if (x.id != y.id || x.tail != y.tail || x.head != y.head || x.length != y.length) return false;
    }
    return true;
  }

 private:
  std::vector<std::string> vertices_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> incident_;
  std::unordered_map<std::string, std::size_t> vertex_index_;
  std::unordered_map<std::string, std::size_t> edge_index_;
};

inline long genus(const MetricGraph& g) { return g.genus(); }

/// Bridge flags per edge (1-edge cuts). Parallel edges are never bridges and
/// loops are never bridges.
inline std::vector<bool> find_bridges(std::size_t vertex_count, const std::vector<Edge>& edges) {
  std::vector<std::vector<std::size_t>> incident(vertex_count);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (edges[e].is_loop()) continue;
    incident[edges[e].tail].push_back(e);
    incident[edges[e].head].push_back(e);
  }
  constexpr auto unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> order(vertex_count, unset), low(vertex_count, 0);
  std::vector<bool> bridge(edges.size(), false);
  std::size_t clock = 0;
  struct Frame {
    std::size_t vertex;
    std::size_t parent_edge;
    std::size_t next;
  };
  std::vector<Frame> stack;
  for (std::size_t root = 0; root < vertex_count; ++root) {
    if (order[root] != unset) continue;
    order[root] = low[root] = clock++;
    stack.push_back({root, unset, 0});
    while (!stack.empty()) {
      auto& top = stack.back();
      if (top.next < incident[top.vertex].size()) {
        const auto e = incident[top.vertex][top.next++];
        if (e == top.parent_edge) continue;
        const auto w = edges[e].other(top.vertex);
        if (order[w] == unset) {
          order[w] = low[w] = clock++;
          stack.push_back({w, e, 0});
        } else {
          low[top.vertex] = std::min(low[top.vertex], order[w]);
        }
      } else {
        const auto done = top;
        stack.pop_back();
        if (!stack.empty()) {
          auto& parent = stack.back();
          low[parent.vertex] = std::min(low[parent.vertex], low[done.vertex]);
          if (low[done.vertex] > order[parent.vertex]) bridge[done.parent_edge] = true;
        }
      }
    }
  }
  return bridge;
}

inline std::vector<bool> find_bridges(const MetricGraph& g) {
  return find_bridges(g.vertex_count(), g.edges());
}

}  // namespace tropbn

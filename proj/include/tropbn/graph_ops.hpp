#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "tropbn/error.hpp"
#include "tropbn/metric_graph.hpp"

namespace tropbn {

// ---------------------------------------------------------------------------
// Canonical model and bridge contraction

struct CanonicalModel {
  MetricGraph graph;
  /// Set when no point has valence >= 3 (a circle or a point); the graph then
  /// keeps a single marked base vertex.
  bool non_canonical = false;
};

/// Suppresses every valence-2 vertex, summing the two incident lengths.
/// Merged edges are named by joining the old ids with '+'.
inline CanonicalModel canonical_model(const MetricGraph& g) {
  std::vector<std::string> vertices = g.vertices();
  std::vector<EdgeSpec> edges = g.edge_specs();
  auto valence_of = [&](const std::string& v) {
    std::size_t val = 0;
    for (const auto& e : edges) val += (e.tail == v) + (e.head == v);
    return val;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t vi = 0; vi < vertices.size() && vertices.size() > 1; ++vi) {
      const auto& v = vertices[vi];
      if (valence_of(v) != 2) continue;
      std::vector<std::size_t> touching;
      for (std::size_t e = 0; e < edges.size(); ++e) {
        if (edges[e].tail == v || edges[e].head == v) touching.push_back(e);
      }
      if (touching.size() != 2) continue;  // a loop at v: only happens on a circle
      auto first = edges[touching[0]];
      auto second = edges[touching[1]];
      // orient first as x -> v and second as v -> y
      if (first.head != v) std::swap(first.tail, first.head);
      if (second.tail != v) std::swap(second.tail, second.head);
      EdgeSpec merged{first.id + "+" + second.id, first.tail, second.head,
                      first.length + second.length};
      edges[touching[0]] = merged;
      edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(touching[1]));
      vertices.erase(vertices.begin() + static_cast<std::ptrdiff_t>(vi));
      changed = true;
      break;
    }
  }
  CanonicalModel out{MetricGraph(vertices, edges), false};
  bool has_branch_point = false;
  for (std::size_t v = 0; v < out.graph.vertex_count(); ++v) {
    if (out.graph.valence(v) >= 3) has_branch_point = true;
  }
  out.non_canonical = !has_branch_point;
  return out;
}

struct Contraction {
  MetricGraph graph;
  std::vector<std::size_t> vertex_map;  // old vertex -> new vertex
  std::vector<long> edge_map;           // old edge -> new edge, -1 for contracted bridges
};

/// Contracts every bridge. Merged vertices take the lexicographically least id
/// of their class.
inline Contraction contract_bridges_mapped(const MetricGraph& g) {
  const auto bridge = find_bridges(g);
  std::vector<std::size_t> parent(g.vertex_count());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    if (!bridge[e]) continue;
    auto a = find(g.edge(e).tail);
    auto b = find(g.edge(e).head);
    if (a > b) std::swap(a, b);
    parent[b] = a;
  }
  std::vector<std::string> name(g.vertex_count());
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    auto r = find(v);
    if (name[r].empty() || g.vertex(v) < name[r]) name[r] = g.vertex(v);
  }
  Contraction out;
  out.vertex_map.assign(g.vertex_count(), 0);
  std::vector<long> slot(g.vertex_count(), -1);
  std::vector<std::string> vertices;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    auto r = find(v);
    if (slot[r] < 0) {
      slot[r] = static_cast<long>(vertices.size());
      vertices.push_back(name[r]);
    }
    out.vertex_map[v] = static_cast<std::size_t>(slot[r]);
  }
  std::vector<EdgeSpec> edges;
  out.edge_map.assign(g.edge_count(), -1);
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    if (bridge[e]) continue;
    const auto& ed = g.edge(e);
    out.edge_map[e] = static_cast<long>(edges.size());
    edges.push_back({ed.id, vertices[out.vertex_map[ed.tail]], vertices[out.vertex_map[ed.head]],
                     ed.length});
  }
  out.graph = MetricGraph(std::move(vertices), edges);
  return out;
}

inline MetricGraph contract_bridges(const MetricGraph& g) { return contract_bridges_mapped(g).graph; }

// ---------------------------------------------------------------------------
// Edge cuts

/// A minimal edge cut (bond): the vertex side `side` containing vertex 0 and
/// the edges leaving it.
struct Bond {
  std::vector<bool> side;
  std::vector<std::size_t> edges;
  bool trivial = false;  // one side is a single vertex
};

namespace detail {

inline bool side_connected(const MetricGraph& g, const std::vector<bool>& side, bool which) {
  std::size_t start = g.vertex_count();
  std::size_t members = 0;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    if (side[v] == which) {
      ++members;
      if (start == g.vertex_count()) start = v;
    }
  }
  if (members == 0) return false;
  std::vector<bool> seen(g.vertex_count(), false);
  std::vector<std::size_t> stack{start};
  seen[start] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    for (auto e : g.incident(v)) {
      auto w = g.edge(e).other(v);
      if (side[w] == which && !seen[w]) {
        seen[w] = true;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == members;
}

}  // namespace detail

/// All bonds of g, by enumerating vertex bipartitions with both sides
/// connected. Exponential in |V|; intended for the small graphs of this library.
inline std::vector<Bond> bonds(const MetricGraph& g) {
  const auto n = g.vertex_count();
  if (n > 24) throw Error(ErrorCode::Precondition, "bond enumeration limited to 24 vertices");
  std::vector<Bond> out;
  if (n < 2) return out;
  const std::uint64_t count = std::uint64_t{1} << (n - 1);
  for (std::uint64_t mask = 0; mask + 1 < count; ++mask) {
    // vertex 0 always on the side; bits of mask choose vertices 1..n-1
    std::vector<bool> side(n, false);
    side[0] = true;
    for (std::size_t v = 1; v < n; ++v) side[v] = (mask >> (v - 1)) & 1U;
    if (!detail::side_connected(g, side, true) || !detail::side_connected(g, side, false)) continue;
    Bond bond;
    bond.side = side;
    std::size_t inside = 0;
    for (std::size_t v = 0; v < n; ++v) inside += side[v];
    bond.trivial = inside == 1 || inside + 1 == n;
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      const auto& ed = g.edge(e);
      if (side[ed.tail] != side[ed.head]) bond.edges.push_back(e);
    }
    out.push_back(std::move(bond));
  }
  return out;
}

struct EdgeCut {
  std::vector<std::string> edges;
  bool trivial = false;
};

/// Minimal k-edge cuts of the canonical model, sorted by edge ids.
inline std::vector<EdgeCut> edge_cuts(const MetricGraph& g, std::size_t k) {
  if (k < 1) throw Error(ErrorCode::Precondition, "k must be at least 1");
  const auto model = canonical_model(g).graph;
  std::vector<EdgeCut> out;
  for (const auto& bond : bonds(model)) {
    if (bond.edges.size() != k) continue;
    EdgeCut cut;
    cut.trivial = bond.trivial;
    for (auto e : bond.edges) cut.edges.push_back(model.edge(e).id);
    std::sort(cut.edges.begin(), cut.edges.end());
    out.push_back(std::move(cut));
  }
  std::sort(out.begin(), out.end(),
            [](const EdgeCut& a, const EdgeCut& b) { return a.edges < b.edges; });
  return out;
}

// ---------------------------------------------------------------------------
// Block tree

enum class BlockKind { Loop, Bridge, Cycle, Other };

struct Block {
  std::vector<std::size_t> edges;
  std::vector<std::size_t> vertices;
  BlockKind kind = BlockKind::Other;
};

/// Bipartite tree of blocks and separating (cut) vertices.
struct BlockTree {
  std::vector<Block> blocks;
  std::vector<std::size_t> separators;              // vertex indices
  std::vector<std::vector<std::size_t>> block_seps;  // block -> separator slots
  std::vector<std::vector<std::size_t>> sep_blocks;  // separator slot -> blocks

  long separator_slot(std::size_t vertex) const {
    auto it = std::find(separators.begin(), separators.end(), vertex);
    return it == separators.end() ? -1 : static_cast<long>(it - separators.begin());
  }

  bool is_tree() const {
    const std::size_t nodes = blocks.size() + separators.size();
    if (nodes == 0) return true;
    std::size_t links = 0;
    for (const auto& s : block_seps) links += s.size();
    if (links + 1 != nodes) return false;
    // connectivity over the bipartite graph
    std::vector<bool> seen_block(blocks.size(), false), seen_sep(separators.size(), false);
    std::vector<std::pair<bool, std::size_t>> stack{{true, 0}};
    if (blocks.empty()) return separators.size() <= 1;
    seen_block[0] = true;
    std::size_t reached = 1;
    while (!stack.empty()) {
      auto [is_block, idx] = stack.back();
      stack.pop_back();
      const auto& next = is_block ? block_seps[idx] : sep_blocks[idx];
      for (auto j : next) {
        auto& seen = is_block ? seen_sep : seen_block;
        if (!seen[j]) {
          seen[j] = true;
          ++reached;
          stack.push_back({!is_block, j});
        }
      }
    }
    return reached == nodes;
  }
};

/// Biconnected-component decomposition (each loop is its own block).
inline BlockTree block_tree(const MetricGraph& g) {
  const auto n = g.vertex_count();
  constexpr auto unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> order(n, unset), low(n, 0);
  std::vector<std::size_t> edge_stack;
  std::vector<std::vector<std::size_t>> components;
  std::size_t clock = 0;
  struct Frame {
    std::size_t vertex;
    std::size_t parent_edge;
    std::size_t next;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (order[root] != unset) continue;
    order[root] = low[root] = clock++;
    std::vector<Frame> stack{{root, unset, 0}};
    while (!stack.empty()) {
      auto& top = stack.back();
      const auto& inc = g.incident(top.vertex);
      if (top.next < inc.size()) {
        const auto e = inc[top.next++];
        const auto& ed = g.edge(e);
        if (ed.is_loop() || e == top.parent_edge) continue;
        const auto w = ed.other(top.vertex);
        if (order[w] == unset) {
          edge_stack.push_back(e);
          order[w] = low[w] = clock++;
          stack.push_back({w, e, 0});
        } else if (order[w] < order[top.vertex]) {
          edge_stack.push_back(e);
          low[top.vertex] = std::min(low[top.vertex], order[w]);
        }
      } else {
        const auto done = top;
        stack.pop_back();
        if (stack.empty()) break;
        auto& parent = stack.back();
        low[parent.vertex] = std::min(low[parent.vertex], low[done.vertex]);
        if (low[done.vertex] >= order[parent.vertex]) {
          std::vector<std::size_t> comp;
          while (!edge_stack.empty()) {
            const auto e = edge_stack.back();
            edge_stack.pop_back();
            comp.push_back(e);
            if (e == done.parent_edge) break;
          }
          components.push_back(std::move(comp));
        }
      }
    }
  }
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    if (g.edge(e).is_loop()) components.push_back({e});
  }
  // deterministic order: by smallest edge index
  for (auto& c : components) std::sort(c.begin(), c.end());
  std::sort(components.begin(), components.end());

  BlockTree tree;
  std::vector<std::size_t> membership(n, 0);
  for (auto& comp : components) {
    Block block;
    block.edges = comp;
    for (auto e : comp) {
      block.vertices.push_back(g.edge(e).tail);
      block.vertices.push_back(g.edge(e).head);
    }
    std::sort(block.vertices.begin(), block.vertices.end());
    block.vertices.erase(std::unique(block.vertices.begin(), block.vertices.end()),
                         block.vertices.end());
    if (comp.size() == 1 && g.edge(comp[0]).is_loop()) {
      block.kind = BlockKind::Loop;
    } else if (comp.size() == 1) {
      block.kind = BlockKind::Bridge;
    } else {
      bool all_two = block.edges.size() == block.vertices.size();
      for (auto v : block.vertices) {
        std::size_t deg = 0;
        for (auto e : comp) deg += (g.edge(e).tail == v) + (g.edge(e).head == v);
        all_two = all_two && deg == 2;
      }
      block.kind = all_two ? BlockKind::Cycle : BlockKind::Other;
    }
    for (auto v : block.vertices) ++membership[v];
    tree.blocks.push_back(std::move(block));
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (membership[v] >= 2) tree.separators.push_back(v);
  }
  tree.block_seps.assign(tree.blocks.size(), {});
  tree.sep_blocks.assign(tree.separators.size(), {});
  for (std::size_t b = 0; b < tree.blocks.size(); ++b) {
    for (auto v : tree.blocks[b].vertices) {
      auto slot = tree.separator_slot(v);
      if (slot < 0) continue;
      tree.block_seps[b].push_back(static_cast<std::size_t>(slot));
      tree.sep_blocks[static_cast<std::size_t>(slot)].push_back(b);
    }
  }
  return tree;
}

// ---------------------------------------------------------------------------
// Spanning trees and cycles

/// Spanning tree flags per edge. Edges listed in `preferred` are tried first,
/// the rest in index order.
inline std::vector<bool> spanning_tree(const MetricGraph& g,
                                       const std::vector<std::size_t>& preferred = {}) {
  std::vector<std::size_t> parent(g.vertex_count());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  std::vector<bool> in_tree(g.edge_count(), false);
  std::vector<bool> tried(g.edge_count(), false);
  auto offer = [&](std::size_t e) {
    if (tried[e]) return;
    tried[e] = true;
    auto a = find(g.edge(e).tail);
    auto b = find(g.edge(e).head);
    if (a == b) return;
    parent[b] = a;
    in_tree[e] = true;
  };
  for (auto e : preferred) offer(e);
  for (std::size_t e = 0; e < g.edge_count(); ++e) offer(e);
  return in_tree;
}

/// Edges of the unique cycle formed by `chord` and the tree path between its
/// endpoints, sorted.
inline std::vector<std::size_t> fundamental_cycle(const MetricGraph& g, const std::vector<bool>& tree,
                                                  std::size_t chord) {
  const auto& c = g.edge(chord);
  if (c.is_loop()) return {chord};
  constexpr auto unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> via(g.vertex_count(), unset);
  std::vector<bool> seen(g.vertex_count(), false);
  std::vector<std::size_t> stack{c.tail};
  seen[c.tail] = true;
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    for (auto e : g.incident(v)) {
      if (!tree[e]) continue;
      auto w = g.edge(e).other(v);
      if (!seen[w]) {
        seen[w] = true;
        via[w] = e;
        stack.push_back(w);
      }
    }
  }
  std::vector<std::size_t> cycle{chord};
  for (auto v = c.head; v != c.tail;) {
    auto e = via[v];
    cycle.push_back(e);
    v = g.edge(e).other(v);
  }
  std::sort(cycle.begin(), cycle.end());
  return cycle;
}

/// Every simple cycle (as a sorted edge list), ordered by length then
/// lexicographically. Uses the cycle space, so requires |E| <= 64 and small genus.
inline std::vector<std::vector<std::size_t>> simple_cycles(const MetricGraph& g) {
  if (g.edge_count() > 64 || g.genus() > 22) {
    throw Error(ErrorCode::Precondition, "cycle enumeration limited to 64 edges and genus 22");
  }
  const auto tree = spanning_tree(g);
  std::vector<std::uint64_t> basis;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    if (tree[e]) continue;
    std::uint64_t mask = 0;
    for (auto f : fundamental_cycle(g, tree, e)) mask |= std::uint64_t{1} << f;
    basis.push_back(mask);
  }
  std::vector<std::vector<std::size_t>> out;
  const std::uint64_t subsets = std::uint64_t{1} << basis.size();
  for (std::uint64_t s = 1; s < subsets; ++s) {
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      if ((s >> i) & 1U) mask ^= basis[i];
    }
    std::vector<std::size_t> edges;
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      if ((mask >> e) & 1U) edges.push_back(e);
    }
    // simple iff every touched vertex has degree 2 and the edges are connected
    std::vector<std::size_t> degree(g.vertex_count(), 0);
    for (auto e : edges) {
      ++degree[g.edge(e).tail];
      ++degree[g.edge(e).head];
    }
    bool ok = std::all_of(degree.begin(), degree.end(), [](auto d) { return d == 0 || d == 2; });
    if (!ok) continue;
    std::vector<bool> seen(g.vertex_count(), false);
    std::vector<std::size_t> stack{g.edge(edges.front()).tail};
    seen[stack.back()] = true;
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      for (auto e : edges) {
        const auto& ed = g.edge(e);
        if (ed.tail != v && ed.head != v) continue;
        auto w = ed.other(v);
        if (!seen[w]) {
          seen[w] = true;
          stack.push_back(w);
        }
      }
    }
    for (std::size_t v = 0; v < g.vertex_count(); ++v) ok = ok && (degree[v] == 0 || seen[v]);
    if (ok) out.push_back(std::move(edges));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

inline std::vector<std::size_t> cycle_vertices(const MetricGraph& g, const std::vector<std::size_t>& cycle) {
  std::vector<std::size_t> vs;
  for (auto e : cycle) {
    vs.push_back(g.edge(e).tail);
    vs.push_back(g.edge(e).head);
  }
  std::sort(vs.begin(), vs.end());
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
  return vs;
}

}  // namespace tropbn

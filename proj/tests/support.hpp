#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "tropbn/tropbn.hpp"

namespace testing_support {

using namespace tropbn;

inline MetricGraph fixture(const std::string& name) {
  return load_graph(std::string(TROPBN_FIXTURE_DIR) + "/" + name + ".json");
}

inline MetricGraph make(std::vector<std::string> vertices, std::vector<EdgeSpec> edges) {
  return MetricGraph(std::move(vertices), edges);
}

/// Connectivity after deleting `removed` edges, by plain union-find.
inline bool connected_without(const MetricGraph& g, const std::vector<std::size_t>& removed) {
  std::vector<std::size_t> parent(g.vertex_count());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v];
    return v;
  };
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    if (std::find(removed.begin(), removed.end(), e) != removed.end()) continue;
    parent[find(g.edge(e).tail)] = find(g.edge(e).head);
  }
  for (std::size_t v = 1; v < g.vertex_count(); ++v) {
    if (find(v) != find(0)) return false;
  }
  return true;
}

/// All k-subsets of {0..n-1}.
inline std::vector<std::vector<std::size_t>> subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur;
  auto rec = [&](auto&& self, std::size_t from) -> void {
    if (cur.size() == k) {
      out.push_back(cur);
      return;
    }
    for (std::size_t i = from; i < n; ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

/// Laplacian action D - L s on a lattice, written independently of the library.
inline std::vector<long> fire(const LatticeModel& m, std::vector<long> d, const std::vector<long>& s) {
  for (std::size_t u = 0; u < m.node_count(); ++u) {
    for (auto it = m.neighbors_begin(u); it != m.neighbors_end(u); ++it) d[u] -= s[u] - s[*it];
  }
  return d;
}

/// Plain Dhar test: starting a fire at q, does everything burn?
inline bool burns_everything(const LatticeModel& m, const std::vector<long>& d, std::size_t q) {
  std::vector<char> burnt(m.node_count(), 0);
  burnt[q] = 1;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t x = 0; x < m.node_count(); ++x) {
      if (burnt[x]) continue;
      long edges = 0;
      for (auto it = m.neighbors_begin(x); it != m.neighbors_end(x); ++it) edges += burnt[*it];
      if (edges > d[x]) {
        burnt[x] = 1;
        changed = true;
      }
    }
  }
  return std::all_of(burnt.begin(), burnt.end(), [](char b) { return b != 0; });
}

/// Calls f on every script with entries in [0, bound] and at least one zero.
template <class F>
void for_each_script(std::size_t n, long bound, F f) {
  std::vector<long> s(n, 0);
  for (;;) {
    if (std::find(s.begin(), s.end(), 0) != s.end()) f(s);
    std::size_t i = 0;
    while (i < n && s[i] == bound) s[i++] = 0;
    if (i == n) return;
    ++s[i];
  }
}

/// Brute-force "equivalent to an effective divisor" over bounded scripts.
inline bool brute_effective(const LatticeModel& m, const std::vector<long>& d, long bound) {
  bool found = false;
  for_each_script(m.node_count(), bound, [&](const std::vector<long>& s) {
    if (found) return;
    const auto e = fire(m, d, s);
    found = std::all_of(e.begin(), e.end(), [](long c) { return c >= 0; });
  });
  return found;
}

/// Brute-force rank: E ranges over all lattice multisets.
inline long brute_rank(const LatticeModel& m, const std::vector<long>& d, long bound) {
  if (!brute_effective(m, d, bound)) return -1;
  long deg = 0;
  for (auto c : d) deg += c;
  long k = 0;
  for (; k < deg; ++k) {
    bool all = true;
    for (Multisets e(m.node_count(), static_cast<std::size_t>(k + 1)); all && !e.done(); e.advance()) {
      auto x = d;
      for (auto n : e.current()) x[n] -= 1;
      all = brute_effective(m, x, bound);
    }
    if (!all) break;
  }
  return k;
}

}  // namespace testing_support

#pragma once

#include <algorithm>
#include <deque>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tropbn/classify.hpp"
#include "tropbn/divisor.hpp"
#include "tropbn/graph_ops.hpp"
#include "tropbn/lattice.hpp"

namespace tropbn {

struct CycleReduction {
  Divisor divisor;
  std::vector<long> script;  // divisor = input - L·script
  std::size_t pushes = 0;
};

/// Block structure of the lattice itself: cycles of a tree of cycles become
/// lattice cycles, bridges become chains of unit bridges.
class LatticeCycles {
 public:
  explicit LatticeCycles(const LatticeModel& m) : m_(m) {
    std::vector<std::string> names;
    for (std::size_t n = 0; n < m.node_count(); ++n) names.push_back("n" + std::to_string(n));
    std::vector<EdgeSpec> unit;
    for (std::size_t e = 0; e < m.base().edge_count(); ++e) {
      for (std::int64_t s = 0; s < m.steps(e); ++s) {
        unit.push_back({"u" + std::to_string(e) + "_" + std::to_string(s), names[m.node_on_edge(e, s)],
                        names[m.node_on_edge(e, s + 1)], Rational(1, m.resolution())});
      }
    }
    graph_ = MetricGraph(std::move(names), unit);
    tree_ = block_tree(graph_);
    node_cycles_.assign(m.node_count(), {});
    cycle_order_.assign(tree_.blocks.size(), {});
    for (std::size_t b = 0; b < tree_.blocks.size(); ++b) {
      const auto& block = tree_.blocks[b];
      if (block.kind == BlockKind::Bridge) continue;
      if (block.kind == BlockKind::Other) throw Error(ErrorCode::NotATreeOfCycles, "lattice block is not a cycle");
      for (auto v : block.vertices) node_cycles_[v].push_back(b);
      // cyclic node order
      auto& order = cycle_order_[b];
      std::size_t at = block.vertices.front();
      std::size_t came = block.edges.size();
      do {
        order.push_back(at);
        for (std::size_t i = 0; i < block.edges.size(); ++i) {
          const auto& ed = graph_.edge(block.edges[i]);
          if (i == came || (ed.tail != at && ed.head != at)) continue;
          at = ed.other(at);
          came = i;
          break;
        }
      } while (at != order.front());
    }
  }

  const BlockTree& tree() const noexcept { return tree_; }
  bool is_cycle(std::size_t b) const { return tree_.blocks[b].kind != BlockKind::Bridge; }
  const std::vector<std::size_t>& cycles_at(std::size_t node) const { return node_cycles_[node]; }
  const std::vector<std::size_t>& order(std::size_t b) const { return cycle_order_[b]; }
  std::size_t cycle_count() const {
    std::size_t c = 0;
    for (std::size_t b = 0; b < tree_.blocks.size(); ++b) c += is_cycle(b);
    return c;
  }

  /// Maximum matching of chip units to cycles through their node. Returns the
  /// cycle per unit (or -1) and the node per unit.
  std::pair<std::vector<long>, std::vector<std::size_t>> matching(const Divisor& d) const {
    std::vector<std::size_t> units;
    for (std::size_t n = 0; n < d.size(); ++n) {
      for (long c = 0; c < d[n]; ++c) units.push_back(n);
    }
    std::vector<long> owner(tree_.blocks.size(), -1);
    std::vector<long> match(units.size(), -1);
    std::vector<char> seen;
    std::function<bool(std::size_t)> augment = [&](std::size_t u) {
      for (auto b : node_cycles_[units[u]]) {
        if (seen[b]) continue;
        seen[b] = 1;
        if (owner[b] < 0 || augment(static_cast<std::size_t>(owner[b]))) {
          owner[b] = static_cast<long>(u);
          match[u] = static_cast<long>(b);
          return true;
        }
      }
      return false;
    };
    for (std::size_t u = 0; u < units.size(); ++u) {
      seen.assign(tree_.blocks.size(), 0);
      augment(u);
    }
    return {match, units};
  }

  bool is_cycle_reduced(const Divisor& d) const {
    if (!d.is_effective()) return false;
    const auto [match, units] = matching(d);
    return std::all_of(match.begin(), match.end(), [](long b) { return b >= 0; });
  }

  CycleReduction reduce(const Divisor& input) const {
    if (!input.is_effective()) throw Error(ErrorCode::Precondition, "cycle reduction needs an effective divisor");
    if (input.degree() > m_.genus()) {
      throw Error(ErrorCode::DegreeTooLarge,
                  "degree " + std::to_string(input.degree()) + " exceeds genus " + std::to_string(m_.genus()));
    }
    CycleReduction out{input, std::vector<long>(m_.node_count(), 0), 0};
    const std::size_t cap = 4 * static_cast<std::size_t>(input.degree()) + 8;
    for (;;) {
      const auto [match, units] = matching(out.divisor);
      std::size_t pick = units.size();
      for (std::size_t u = 0; u < units.size(); ++u) {
        if (match[u] < 0) {
          pick = u;
          break;
        }
      }
      if (pick == units.size()) break;
      if (++out.pushes > cap) throw std::logic_error("cycle reduction did not converge");
      std::vector<bool> owned(tree_.blocks.size(), false);
      for (auto b : match) {
        if (b >= 0) owned[static_cast<std::size_t>(b)] = true;
      }
      push(out, units[pick], owned);
    }
    const long low = *std::min_element(out.script.begin(), out.script.end());
    for (auto& s : out.script) s -= low;
    return out;
  }

 private:
  /// Moves one chip from `start` into the nearest cycle without a matched chip.
  void push(CycleReduction& st, std::size_t start, const std::vector<bool>& owned) const {
    const auto nb = tree_.blocks.size();
    const auto ns = tree_.separators.size();
    constexpr auto unset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> parent(nb + ns, unset);
    std::deque<std::size_t> queue;
    const auto start_slot = tree_.separator_slot(start);
    if (start_slot >= 0) {
      const auto id = nb + static_cast<std::size_t>(start_slot);
      parent[id] = id;
      queue.push_back(id);
    } else {
      const auto b = block_of(start);
      parent[b] = b;
      queue.push_back(b);
    }
    std::size_t target = unset;
    while (!queue.empty() && target == unset) {
      const auto x = queue.front();
      queue.pop_front();
      if (x < nb && is_cycle(x) && !owned[x]) {
        target = x;
        break;
      }
      const auto& next = x < nb ? tree_.block_seps[x] : tree_.sep_blocks[x - nb];
      for (auto y : next) {
        const auto id = x < nb ? y + nb : y;
        if (parent[id] == unset) {
          parent[id] = x;
          queue.push_back(id);
        }
      }
    }
    if (target == unset) throw std::logic_error("no free cycle for an unmatched chip");
    std::vector<std::size_t> path;  // bipartite ids from start to target
    for (auto x = target;; x = parent[x]) {
      path.push_back(x);
      if (parent[x] == x) break;
    }
    std::reverse(path.begin(), path.end());

    std::size_t carrier = start;
    for (std::size_t i = 0; i < path.size(); ++i) {
      if (path[i] >= nb || path[i] == target) continue;
      const auto block = path[i];
      const auto exit = tree_.separators[path[i + 1] - nb];
      if (carrier == exit) continue;
      if (!is_cycle(block)) {
        slide_bridge(st, carrier, exit);
      } else if (st.divisor[exit] > 0) {
        // a chip already waits at the exit; carry that one instead
      } else {
        pair_slide(st, block, carrier, exit);
      }
      carrier = exit;
    }
  }

  std::size_t block_of(std::size_t node) const {
    for (std::size_t b = 0; b < tree_.blocks.size(); ++b) {
      const auto& vs = tree_.blocks[b].vertices;
      if (std::binary_search(vs.begin(), vs.end(), node)) return b;
    }
    throw std::logic_error("node outside every block");
  }

  void fire(CycleReduction& st, const std::vector<bool>& in_set) const {
    for (std::size_t u = 0; u < m_.node_count(); ++u) {
      if (!in_set[u]) continue;
      st.script[u] += 1;
      for (auto it = m_.neighbors_begin(u); it != m_.neighbors_end(u); ++it) {
        if (!in_set[*it]) {
          st.divisor[u] -= 1;
          st.divisor[*it] += 1;
        }
      }
    }
  }

  /// Slides a chip from a to the adjacent node b across a unit bridge.
  void slide_bridge(CycleReduction& st, std::size_t a, std::size_t b) const {
    std::vector<bool> side(m_.node_count(), false);
    std::vector<std::size_t> stack{a};
    side[a] = true;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      for (auto it = m_.neighbors_begin(u); it != m_.neighbors_end(u); ++it) {
        if ((u == a && *it == b) || side[*it]) continue;
        side[*it] = true;
        stack.push_back(*it);
      }
    }
    fire(st, side);
  }

  /// Moves two chips of one cycle apart along the arc avoiding `exit` until
  /// one of them lands on `exit`.
  void pair_slide(CycleReduction& st, std::size_t block, std::size_t carrier, std::size_t exit) const {
    const auto& ord = cycle_order_[block];
    const auto len = ord.size();
    auto pos = [&](std::size_t node) {
      return static_cast<std::size_t>(std::find(ord.begin(), ord.end(), node) - ord.begin());
    };
    const auto pc = pos(carrier);
    const auto pe = pos(exit);
    // partner: prefer a chip not sitting at a separator
    std::size_t partner = len;
    for (int pass = 0; pass < 2 && partner == len; ++pass) {
      for (std::size_t i = 0; i < len; ++i) {
        const auto n = ord[i];
        if (n == carrier || st.divisor[n] <= 0) continue;
        if (pass == 0 && tree_.separator_slot(n) >= 0) continue;
        partner = i;
        break;
      }
    }
    if (partner == len) {
      if (st.divisor[carrier] < 2) throw std::logic_error("cycle holds a single chip");
      partner = pc;
    }
    // arc [lo, hi] walking forward from lo to hi, not containing the exit
    std::size_t lo = pc;
    std::size_t hi = partner;
    auto contains_exit = [&](std::size_t a, std::size_t b) {
      for (std::size_t i = a;; i = (i + 1) % len) {
        if (i == pe) return true;
        if (i == b) return false;
      }
    };
    if (contains_exit(lo, hi)) std::swap(lo, hi);
    for (std::size_t guard = 0; guard <= len; ++guard) {
      std::vector<bool> in_cycle(m_.node_count(), false);
      for (auto n : ord) in_cycle[n] = true;
      std::vector<bool> in_set(m_.node_count(), false);
      std::vector<std::size_t> stack;
      for (std::size_t i = lo;; i = (i + 1) % len) {
        in_set[ord[i]] = true;
        stack.push_back(ord[i]);
        if (i == hi) break;
      }
      while (!stack.empty()) {
        const auto u = stack.back();
        stack.pop_back();
        for (auto it = m_.neighbors_begin(u); it != m_.neighbors_end(u); ++it) {
          if (in_set[*it] || in_cycle[*it]) continue;
          in_set[*it] = true;
          stack.push_back(*it);
        }
      }
      fire(st, in_set);
      lo = (lo + len - 1) % len;
      hi = (hi + 1) % len;
      if (lo == pe || hi == pe) return;
    }
    throw std::logic_error("pair slide did not reach the exit vertex");
  }

  const LatticeModel& m_;
  MetricGraph graph_;
  BlockTree tree_;
  std::vector<std::vector<std::size_t>> node_cycles_;
  std::vector<std::vector<std::size_t>> cycle_order_;
};

inline CycleReduction cycle_reduce(const LatticeModel& m, const Divisor& d) {
  if (!is_tree_of_cycles(m.base())) throw Error(ErrorCode::NotATreeOfCycles, "graph is not a tree of cycles");
  LatticeCycles cycles(m);
  return cycles.reduce(d);
}

inline bool is_cycle_reduced(const LatticeModel& m, const Divisor& d) {
  LatticeCycles cycles(m);
  return cycles.is_cycle_reduced(d);
}

}  // namespace tropbn

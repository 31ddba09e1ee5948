#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "tropbn/chipfire.hpp"
#include "tropbn/classify.hpp"
#include "tropbn/divisor.hpp"
#include "tropbn/error.hpp"
#include "tropbn/graph_ops.hpp"
#include "tropbn/lattice.hpp"

namespace tropbn {

inline bool in_W_rd(const LatticeModel& m, const Divisor& d, long r, RankMode mode = RankMode::VertexFast) {
  return rank_at_least(m, d, r, mode);
}

/// Lexicographic enumeration of multisets of size k over {0..n-1}.
class Multisets {
 public:
  Multisets(std::size_t n, std::size_t k) : n_(n), cur_(k, 0), done_(n == 0 && k > 0) {}

  bool done() const noexcept { return done_; }
  const std::vector<std::size_t>& current() const noexcept { return cur_; }

  void advance() {
    std::size_t i = cur_.size();
    while (i > 0 && cur_[i - 1] + 1 == n_) --i;
    if (i == 0) {
      done_ = true;
      return;
    }
    const auto v = cur_[i - 1] + 1;
    for (std::size_t j = i - 1; j < cur_.size(); ++j) cur_[j] = v;
  }

 private:
  std::size_t n_;
  std::vector<std::size_t> cur_;
  bool done_;
};

/// Searches for P >= 0 of degree `extra` with rank(base + P) >= r, P ranging
/// over lattice nodes in lexicographic order.
class Completer {
 public:
  Completer(const LatticeModel& m, RankMode mode) : m_(m), engine_(m, mode) {}

  Reducer& reducer() noexcept { return engine_.reducer(); }

  std::optional<std::vector<std::size_t>> complete(const std::vector<long>& base, long extra, long r) {
    if (extra < 0) return std::nullopt;
    chips_ = base;
    if (extra == 0) {
      if (engine_.rank_at_least(chips_, r)) return std::vector<std::size_t>{};
      return std::nullopt;
    }
    for (Multisets p(m_.node_count(), static_cast<std::size_t>(extra)); !p.done(); p.advance()) {
      for (auto n : p.current()) chips_[n] += 1;
      const bool ok = engine_.rank_at_least(chips_, r);
      for (auto n : p.current()) chips_[n] -= 1;
      if (ok) return p.current();
    }
    return std::nullopt;
  }

 private:
  const LatticeModel& m_;
  RankEngine engine_;
  std::vector<long> chips_;
};

/// Points to add to E (degree d - deg E) so that the sum has rank >= r.
inline std::optional<std::vector<std::size_t>> complete_divisor(const LatticeModel& m, const Divisor& e, long d, long r,
                                                                RankMode mode = RankMode::VertexFast) {
  if (!e.is_effective()) throw Error(ErrorCode::Precondition, "E must be effective");
  if (e.degree() > d) throw Error(ErrorCode::Precondition, "deg E exceeds d");
  Completer c(m, mode);
  return c.complete(e.chips(), d - e.degree(), r);
}

// ---------------------------------------------------------------------------
// Lattice Brill-Noether rank

struct ChipHash {
  std::size_t operator()(const std::vector<long>& v) const noexcept {
    std::size_t h = 1469598103934665603ULL;
    for (auto x : v) h = (h ^ static_cast<std::size_t>(x + 0x9e37)) * 1099511628211ULL;
    return h;
  }
};

/// Completable divisor classes, keyed by the reduced representative. Readers
/// share the lock; insertion takes it exclusively.
class ClassCache {
 public:
  bool contains(const std::vector<long>& key) const {
    std::shared_lock lock(mutex_);
    return known_.count(key) > 0;
  }
  void insert(const std::vector<long>& key) {
    std::unique_lock lock(mutex_);
    known_.emplace(key, true);
  }
  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return known_.size();
  }

 private:
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::vector<long>, bool, ChipHash> known_;
};

struct BNQuery {
  long d = 0;
  long r = 0;
  std::int64_t resolution = 0;  // 0: coarsest valid lattice
  RankMode mode = RankMode::VertexFast;
  int max_escalations = 2;
  unsigned jobs = 1;
};

struct LevelResult {
  std::int64_t resolution = 0;
  long w = -1;
  std::vector<std::size_t> certificate;  // first E without completion at rho = w + 1
  std::vector<std::size_t> sample_e;     // first E at rho = w ...
  std::vector<std::size_t> sample_p;     // ... and its completion
  std::size_t classes = 0;
};

struct BNResult {
  long w = -1;
  long bound = 0;
  bool stable = false;
  std::vector<LevelResult> levels;
  MetricGraph model;  // bridges contracted; certificates refer to its lattice

  const LevelResult& final_level() const { return levels.back(); }
};

namespace detail {

/// True when every effective E of degree `e_deg` extends by `extra` points to a
/// divisor of rank >= r. Otherwise reports the first failing E.
inline bool all_completable(const LatticeModel& m, long e_deg, long extra, long r, RankMode mode, unsigned jobs,
                            ClassCache& cache, std::vector<std::size_t>& failing,
                            std::vector<std::size_t>& sample_e, std::vector<std::size_t>& sample_p) {
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  constexpr std::size_t batch_size = 32;
  std::mutex gen_mutex;
  Multisets gen(m.node_count(), static_cast<std::size_t>(e_deg));
  std::size_t next_index = 0;
  std::atomic<std::size_t> first_fail{none};
  std::mutex result_mutex;
  std::vector<std::size_t> fail_e;
  std::size_t sample_index = none;

  auto worker = [&]() {
    Completer completer(m, mode);
    std::vector<long> chips(m.node_count(), 0);
    std::vector<long> key;
    std::vector<std::vector<std::size_t>> batch;
    for (;;) {
      std::size_t start;
      batch.clear();
      {
        std::lock_guard lock(gen_mutex);
        if (gen.done() || next_index > first_fail.load()) return;
        start = next_index;
        while (!gen.done() && batch.size() < batch_size) {
          batch.push_back(gen.current());
          gen.advance();
        }
        next_index += batch.size();
      }
      for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto index = start + i;
        if (index > first_fail.load()) return;
        std::fill(chips.begin(), chips.end(), 0);
        for (auto n : batch[i]) chips[n] += 1;
        key = chips;
        completer.reducer().reduce_in_place(key, m.base_node());
        if (cache.contains(key)) continue;
        auto p = completer.complete(chips, extra, r);
        if (p) {
          cache.insert(key);
          std::lock_guard lock(result_mutex);
          if (index < sample_index) {
            sample_index = index;
            sample_e = batch[i];
            sample_p = *p;
          }
          continue;
        }
        std::size_t seen = first_fail.load();
        while (index < seen && !first_fail.compare_exchange_weak(seen, index)) {
        }
        std::lock_guard lock(result_mutex);
        if (first_fail.load() == index) fail_e = batch[i];
        return;
      }
    }
  };

  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_fail.load() == none) return true;
  failing = fail_e;
  return false;
}

}  // namespace detail

/// w^r_d on one lattice: the largest rho such that every E of degree r + rho
/// has a completion, or -1 when even rho = 0 fails.
inline LevelResult bn_rank_at(const LatticeModel& m, long d, long r, RankMode mode, unsigned jobs = 1) {
  LevelResult out;
  out.resolution = m.resolution();
  ClassCache cache;
  std::vector<std::size_t> previous_fail;
  for (long rho = d - r; rho >= 0; --rho) {
    std::vector<std::size_t> fail, se, sp;
    if (detail::all_completable(m, r + rho, d - r - rho, r, mode, jobs, cache, fail, se, sp)) {
      out.w = rho;
      out.certificate = previous_fail;
      out.sample_e = se;
      out.sample_p = sp;
      out.classes = cache.size();
      return out;
    }
    previous_fail = fail;
  }
  out.w = -1;
  out.certificate = previous_fail;
  out.classes = cache.size();
  return out;
}

/// Lattice w^r_d with stabilization: values at N and 2N must agree, doubling
/// up to max_escalations times.
inline BNResult bn_rank_lattice(const MetricGraph& g, const BNQuery& q) {
  if (q.r < 0 || 2 * q.r > q.d) throw Error(ErrorCode::Precondition, "need 0 <= 2r <= d");
  BNResult out;
  out.bound = q.d - 2 * q.r;
  out.model = contract_bridges(g);
  std::int64_t n = q.resolution > 0 ? q.resolution : default_resolution(out.model);
  for (int level = 0; level <= q.max_escalations; ++level, n *= 2) {
    LatticeModel m(out.model, n);
    out.levels.push_back(bn_rank_at(m, q.d, q.r, q.mode, q.jobs));
    const auto k = out.levels.size();
    if (k >= 2 && out.levels[k - 1].w == out.levels[k - 2].w) {
      out.w = out.levels.back().w;
      out.stable = true;
      return out;
    }
  }
  out.w = out.levels.back().w;
  out.stable = false;
  return out;
}

struct MartensGap {
  long bound = 0;
  long w = -1;
  bool equality = false;
  bool hyperelliptic = false;
  bool stable = false;
  std::string regime;  // "d<=g-3+r", "d=g-2+r" or "other"
};

inline MartensGap martens_gap(const MetricGraph& g, const BNQuery& q) {
  const long genus = g.genus();
  if (!(0 < 2 * q.r && 2 * q.r <= q.d && q.d < genus)) {
    throw Error(ErrorCode::Precondition, "need 0 < 2r <= d < g");
  }
  MartensGap out;
  const auto bn = bn_rank_lattice(g, q);
  out.bound = bn.bound;
  out.w = bn.w;
  out.stable = bn.stable;
  out.equality = bn.w == bn.bound;
  const auto res = q.resolution > 0 ? q.resolution : bn.levels.front().resolution;
  out.hyperelliptic = is_hyperelliptic(g, res, q.max_escalations).hyperelliptic;
  if (q.d <= genus - 3 + q.r) {
    out.regime = "d<=g-3+r";
  } else if (q.d == genus - 2 + q.r) {
    out.regime = "d=g-2+r";
  } else {
    out.regime = "other";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Private cycle edges and the witness divisor

struct PrivateEdges {
  std::vector<std::size_t> edges;                     // chords of the spanning tree
  std::vector<std::vector<std::size_t>> cycles;       // fundamental cycle of each chord
};

inline PrivateEdges private_cycle_edges(const MetricGraph& g, const std::vector<std::size_t>& prefer_in_tree = {}) {
  const auto tree = spanning_tree(g, prefer_in_tree);
  PrivateEdges out;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    if (tree[e]) continue;
    out.edges.push_back(e);
    out.cycles.push_back(fundamental_cycle(g, tree, e));
  }
  return out;
}

enum class WitnessCase { NH1a, NH1b, NH2 };

inline std::string to_string(WitnessCase c) {
  switch (c) {
    case WitnessCase::NH1a: return "NH1a";
    case WitnessCase::NH1b: return "NH1b";
    case WitnessCase::NH2: return "NH2";
  }
  return "?";
}

struct WitnessCycle {
  MetricGraph model;  // canonical model with bridges contracted
  WitnessCase kind = WitnessCase::NH2;
  std::vector<std::size_t> gamma;
  std::vector<std::size_t> gamma1;  // empty when undefined
  std::vector<std::size_t> gamma2;
  std::vector<std::size_t> cut;     // the edge pair of gamma used by the case
  long k0 = 0;                      // NH2 only
};

namespace detail {

inline bool contains_edge(const std::vector<std::size_t>& cycle, std::size_t e) {
  return std::find(cycle.begin(), cycle.end(), e) != cycle.end();
}

inline bool cycle_has_vertex(const MetricGraph& g, const std::vector<std::size_t>& cycle, std::size_t v) {
  const auto vs = cycle_vertices(g, cycle);
  return std::binary_search(vs.begin(), vs.end(), v);
}

}  // namespace detail

/// Finds a non-loop cycle of the kinds (NH1a), (NH1b), (NH2) in that priority,
/// together with its companion cycles.
inline WitnessCycle classify_witness_cycle(const MetricGraph& g) {
  WitnessCycle out;
  out.model = canonical_model(contract_bridges(g)).graph;
  const auto& m = out.model;
  const auto cycles = simple_cycles(m);
  const auto all_bonds = bonds(m);
  std::vector<const Bond*> two_cuts;
  for (const auto& b : all_bonds) {
    if (b.edges.size() == 2) two_cuts.push_back(&b);
  }
  auto non_loop = [&](const std::vector<std::size_t>& c) { return !(c.size() == 1 && m.edge(c[0]).is_loop()); };

  // (NH1a): a 2-edge cut inside the cycle made of edges of different lengths
  for (const auto& c : cycles) {
    if (!non_loop(c)) continue;
    for (const auto* b : two_cuts) {
      const auto e1 = b->edges[0], e2 = b->edges[1];
      if (!detail::contains_edge(c, e1) || !detail::contains_edge(c, e2)) continue;
      if (m.edge(e1).length == m.edge(e2).length) continue;
      out.kind = WitnessCase::NH1a;
      out.gamma = c;
      out.cut = {e1, e2};
      const auto shortest = m.edge(e1).length < m.edge(e2).length ? e1 : e2;
      const auto& se = m.edge(shortest);
      // companions on each side of the cut through the shortest edge's endpoints
      for (int side = 0; side < 2; ++side) {
        const auto end = side == 0 ? se.tail : se.head;
        const bool which = b->side[end];
        for (const auto& other : cycles) {
          if (other == c) continue;
          bool inside = true;
          for (auto v : cycle_vertices(m, other)) inside = inside && b->side[v] == which;
          if (inside && detail::cycle_has_vertex(m, other, end)) {
            (side == 0 ? out.gamma1 : out.gamma2) = other;
            break;
          }
        }
      }
      return out;
    }
  }
  // (NH1b): non-parallel cut edges and a cycle through only one of two
  // distinct endpoints on one side
  for (const auto& c : cycles) {
    if (!non_loop(c)) continue;
    for (const auto* b : two_cuts) {
      const auto e1 = b->edges[0], e2 = b->edges[1];
      if (!detail::contains_edge(c, e1) || !detail::contains_edge(c, e2)) continue;
      const auto& a = m.edge(e1);
      const auto& bb = m.edge(e2);
      const bool parallel = (a.tail == bb.tail && a.head == bb.head) || (a.tail == bb.head && a.head == bb.tail);
      if (parallel) continue;
      for (int side = 0; side < 2; ++side) {
        const bool which = side == 0;
        const auto x = b->side[a.tail] == which ? a.tail : a.head;
        const auto y = b->side[bb.tail] == which ? bb.tail : bb.head;
        if (x == y) continue;
        for (const auto& other : cycles) {
          if (other == c) continue;
          if (detail::cycle_has_vertex(m, other, x) != detail::cycle_has_vertex(m, other, y)) {
            out.kind = WitnessCase::NH1b;
            out.gamma = c;
            out.gamma1 = other;
            out.cut = {e1, e2};
            return out;
          }
        }
      }
    }
  }
  // (NH2): no pair of edges of the cycle is a 2-edge cut
  for (const auto& c : cycles) {
    if (!non_loop(c)) continue;
    bool has_pair_cut = false;
    for (const auto* b : two_cuts) {
      has_pair_cut = has_pair_cut || (detail::contains_edge(c, b->edges[0]) && detail::contains_edge(c, b->edges[1]));
    }
    if (has_pair_cut) continue;
    out.kind = WitnessCase::NH2;
    out.gamma = c;
    // smallest non-trivial cut containing two edges of the cycle, else any cut
    const Bond* best = nullptr;
    std::vector<std::size_t> pair;
    for (bool allow_trivial : {false, true}) {
      for (const auto& b : all_bonds) {
        if (b.trivial && !allow_trivial) continue;
        std::vector<std::size_t> inside;
        for (auto e : b.edges) {
          if (detail::contains_edge(c, e)) inside.push_back(e);
        }
        if (inside.size() < 2) continue;
        if (!best || b.edges.size() < best->edges.size()) {
          best = &b;
          pair = {inside[0], inside[1]};
        }
      }
      if (best) break;
    }
    if (best) {
      out.k0 = static_cast<long>(best->edges.size());
      out.cut = pair;
    } else {
      out.cut = {c[0], c.size() > 1 ? c[1] : c[0]};
    }
    const auto e = out.cut[0];
    for (const auto& other : cycles) {
      if (other != c && detail::contains_edge(other, e)) {
        out.gamma1 = other;
        break;
      }
    }
    // an edge of gamma consecutive to e
    const auto& ed = m.edge(e);
    for (const auto& other : cycles) {
      if (other == c || other == out.gamma1) continue;
      bool found = false;
      for (auto f : c) {
        if (f == e || !detail::contains_edge(other, f)) continue;
        const auto& fd = m.edge(f);
        if (fd.tail == ed.tail || fd.tail == ed.head || fd.head == ed.tail || fd.head == ed.head) found = true;
      }
      if (found) {
        out.gamma2 = other;
        break;
      }
    }
    return out;
  }
  throw Error(ErrorCode::NotFound, "no witness cycle; the graph is hyperelliptic or has fewer than two vertices");
}

struct WitnessDivisor {
  MetricGraph model;          // coordinates of the chips
  std::int64_t resolution = 0;
  WitnessCycle cycle;
  std::vector<std::size_t> private_edges;  // edge per chip
  std::vector<Rational> offsets;           // from the tail of each private edge
  std::vector<MetricPoint> points;

  LatticeModel lattice() const { return LatticeModel(model, resolution); }
  Divisor divisor(const LatticeModel& m) const {
    Divisor d(m);
    for (const auto& p : points) d[m.node(p)] += 1;
    return d;
  }
};

/// Subset sums of edge lengths, scaled by N (flags indexed by the sum).
inline std::vector<char> subset_sums_scaled(const MetricGraph& g, std::int64_t n) {
  std::int64_t total = 0;
  std::vector<std::int64_t> items;
  for (const auto& e : g.edges()) {
    const Rational s = e.length * n;
    if (!is_integer(s)) throw Error(ErrorCode::ResolutionTooCoarse, "edge length off the lattice");
    items.push_back(s.numerator());
    total += s.numerator();
  }
  std::vector<char> reach(static_cast<std::size_t>(total) + 1, 0);
  reach[0] = 1;
  for (auto w : items) {
    for (std::int64_t s = total; s >= w; --s) {
      if (reach[static_cast<std::size_t>(s - w)]) reach[static_cast<std::size_t>(s)] = 1;
    }
  }
  return reach;
}

/// Degree d-1 divisor with one chip inside each of d-1 private edges avoiding
/// the witness cycles, placed at distances that are pairwise distinct and
/// avoid every subset sum of edge lengths.
inline WitnessDivisor generic_witness_divisor(const MetricGraph& g, long d, std::int64_t resolution) {
  if (d < 1) throw Error(ErrorCode::Precondition, "d must be positive");
  WitnessDivisor out;
  out.cycle = classify_witness_cycle(g);
  out.model = out.cycle.model;
  out.resolution = resolution;
  const auto& m = out.model;
  std::vector<bool> forbidden(m.edge_count(), false);
  std::vector<std::size_t> prefer;
  for (const auto* c : {&out.cycle.gamma, &out.cycle.gamma1, &out.cycle.gamma2}) {
    for (auto e : *c) {
      if (!forbidden[e]) prefer.push_back(e);
      forbidden[e] = true;
    }
  }
  const auto priv = private_cycle_edges(m, prefer);
  std::vector<std::size_t> usable;
  for (auto e : priv.edges) {
    if (!forbidden[e]) usable.push_back(e);
  }
  const auto need = static_cast<std::size_t>(d - 1);
  if (usable.size() < need) {
    throw Error(ErrorCode::InsufficientPrivateEdges, "only " + std::to_string(usable.size()) +
                                                          " private edges avoid the witness cycles, need " +
                                                          std::to_string(need));
  }
  usable.resize(need);
  const auto sums = subset_sums_scaled(m, resolution);
  auto blocked = [&](std::int64_t x) {
    return x >= 0 && static_cast<std::size_t>(x) < sums.size() && sums[static_cast<std::size_t>(x)];
  };
  std::vector<std::int64_t> chosen(need, 0);
  std::vector<std::int64_t> used;
  std::function<bool(std::size_t)> place = [&](std::size_t i) {
    if (i == need) return true;
    const auto k = (m.edge(usable[i]).length * resolution).numerator();
    for (std::int64_t t = 1; t < k; ++t) {
      const auto u = k - t;
      if (t == u || blocked(t) || blocked(u)) continue;
      if (std::find(used.begin(), used.end(), t) != used.end()) continue;
      if (std::find(used.begin(), used.end(), u) != used.end()) continue;
      used.push_back(t);
      used.push_back(u);
      chosen[i] = t;
      if (place(i + 1)) return true;
      used.pop_back();
      used.pop_back();
    }
    return false;
  };
  if (!place(0)) {
    throw Error(ErrorCode::ResolutionTooCoarse,
                "no distinct generic offsets at resolution " + std::to_string(resolution));
  }
  for (std::size_t i = 0; i < need; ++i) {
    out.private_edges.push_back(usable[i]);
    out.offsets.push_back(Rational(chosen[i], resolution));
    out.points.push_back(MetricPoint::on_edge(m.edge(usable[i]).id, Rational(chosen[i], resolution)));
  }
  return out;
}

/// Doubles the resolution until the offsets can be placed.
inline WitnessDivisor generic_witness_divisor_escalating(const MetricGraph& g, long d, std::int64_t resolution,
                                                         int max_doublings = 6) {
  for (int i = 0;; ++i, resolution *= 2) {
    try {
      return generic_witness_divisor(g, d, resolution);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::ResolutionTooCoarse || i >= max_doublings) throw;
    }
  }
}

/// (E2) check: distances pairwise distinct and off every subset sum.
inline bool witness_is_generic(const WitnessDivisor& w) {
  const auto sums = subset_sums_scaled(w.model, w.resolution);
  std::vector<std::int64_t> dist;
  for (std::size_t i = 0; i < w.points.size(); ++i) {
    const auto k = (w.model.edge(w.private_edges[i]).length * w.resolution).numerator();
    const auto t = (w.offsets[i] * w.resolution).numerator();
    if (t <= 0 || t >= k) return false;
    dist.push_back(t);
    dist.push_back(k - t);
  }
  for (auto x : dist) {
    if (static_cast<std::size_t>(x) < sums.size() && sums[static_cast<std::size_t>(x)]) return false;
  }
  auto sorted = dist;
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

}  // namespace tropbn

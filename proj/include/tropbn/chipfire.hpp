#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "tropbn/divisor.hpp"
#include "tropbn/error.hpp"
#include "tropbn/lattice.hpp"

namespace tropbn {

/// Burnt-node flags of Dhar's algorithm started at q. A node x stops the fire
/// while it holds at least as many chips as burnt edges reach it.
inline std::vector<bool> dhar_burnt_set(const LatticeModel& m, const Divisor& d, std::size_t q) {
  for (std::size_t n = 0; n < m.node_count(); ++n) {
    if (n != q && d[n] < 0) {
      throw Error(ErrorCode::Precondition, "divisor is negative away from the burning point");
    }
  }
  std::vector<bool> burnt(m.node_count(), false);
  std::vector<long> hits(m.node_count(), 0);
  std::vector<std::size_t> work{q};
  burnt[q] = true;
  while (!work.empty()) {
    const auto u = work.back();
    work.pop_back();
    for (auto it = m.neighbors_begin(u); it != m.neighbors_end(u); ++it) {
      const auto x = *it;
      if (burnt[x]) continue;
      if (++hits[x] > d[x]) {
        burnt[x] = true;
        work.push_back(x);
      }
    }
  }
  return burnt;
}

/// D - L·s, the divisor obtained by firing every node n s(n) times.
inline Divisor apply_script(const LatticeModel& m, const Divisor& d, const std::vector<long>& script) {
  Divisor out = d;
  for (std::size_t n = 0; n < m.node_count(); ++n) {
    if (script[n] == 0) continue;
    out[n] -= script[n] * static_cast<long>(m.degree(n));
    for (auto it = m.neighbors_begin(n); it != m.neighbors_end(n); ++it) out[*it] += script[n];
  }
  return out;
}

struct Reduction {
  Divisor divisor;
  std::vector<long> script;  // normalized to minimum 0
};

/// Computes q-reduced divisors. Keeps per-base-point level structures and
/// scratch buffers, so reuse one instance per thread.
class Reducer {
 public:
  explicit Reducer(const LatticeModel& m)
      : m_(m), levels_(m.node_count()), hits_(m.node_count()), burnt_(m.node_count()) {}

  const LatticeModel& model() const noexcept { return m_; }

  /// Replaces `chips` with its q-reduced form. When `script` is non-null it
  /// receives the (unnormalized) firing counts.
  void reduce_in_place(std::vector<long>& chips, std::size_t q, std::vector<long>* script = nullptr) {
    const auto& lv = levels(q);
    if (script) script->assign(m_.node_count(), 0);

    // phase 1: clear debt level by level, farthest first
    std::vector<long> level_fire(lv.level_start.size(), 0);
    for (std::size_t k = lv.level_start.size() - 1; k >= 1; --k) {
      long t = 0;
      for (auto i = lv.level_start[k]; i < lv.level_end(k); ++i) {
        const auto v = lv.order[i];
        if (chips[v] < 0) {
          const long c = lv.down[v];
          t = std::max(t, (-chips[v] + c - 1) / c);
        }
      }
      if (t == 0) continue;
      level_fire[k] = t;
      for (auto i = lv.level_start[k]; i < lv.level_end(k); ++i) {
        const auto v = lv.order[i];
        for (auto it = m_.neighbors_begin(v); it != m_.neighbors_end(v); ++it) {
          if (lv.dist[*it] + 1 == static_cast<long>(k)) {
            chips[v] += t;
            chips[*it] -= t;
          }
        }
      }
    }
    if (script) {
      // node at distance j fired once for every level k > j
      long acc = 0;
      for (std::size_t k = lv.level_start.size(); k-- > 0;) {
        for (auto i = lv.level_start[k]; i < lv.level_end(k); ++i) (*script)[lv.order[i]] = acc;
        acc += level_fire[k];
      }
    }

    // phase 2: fire the unburnt set until the fire spreads everywhere
    const auto n = m_.node_count();
    for (;;) {
      std::fill(hits_.begin(), hits_.end(), 0);
      std::fill(burnt_.begin(), burnt_.end(), 0);
      work_.clear();
      work_.push_back(q);
      burnt_[q] = 1;
      std::size_t burnt_count = 1;
      while (!work_.empty()) {
        const auto u = work_.back();
        work_.pop_back();
        for (auto it = m_.neighbors_begin(u); it != m_.neighbors_end(u); ++it) {
          const auto x = *it;
          if (burnt_[x]) continue;
          if (++hits_[x] > chips[x]) {
            burnt_[x] = 1;
            ++burnt_count;
            work_.push_back(x);
          }
        }
      }
      if (burnt_count == n) break;
      // hits_[x] is the number of burnt edges at each unburnt x
      long t = std::numeric_limits<long>::max();
      for (std::size_t x = 0; x < n; ++x) {
        if (!burnt_[x] && hits_[x] > 0) t = std::min(t, chips[x] / hits_[x]);
      }
      for (std::size_t x = 0; x < n; ++x) {
        if (burnt_[x] || hits_[x] == 0) continue;
        chips[x] -= t * hits_[x];
        for (auto it = m_.neighbors_begin(x); it != m_.neighbors_end(x); ++it) {
          if (burnt_[*it]) chips[*it] += t;
        }
      }
      if (script) {
        for (std::size_t x = 0; x < n; ++x) {
          if (!burnt_[x]) (*script)[x] += t;
        }
      }
    }
  }

  Reduction reduce(const Divisor& d, std::size_t q) {
    std::vector<long> chips = d.chips();
    std::vector<long> script;
    reduce_in_place(chips, q, &script);
    const long low = *std::min_element(script.begin(), script.end());
    for (auto& s : script) s -= low;
    return {Divisor(std::move(chips)), std::move(script)};
  }

  /// Chips at q in the q-reduced form of `chips` (which is left untouched).
  long reduced_value(const std::vector<long>& chips, std::size_t q) {
    scratch_ = chips;
    reduce_in_place(scratch_, q);
    return scratch_[q];
  }

  /// True when the divisor is equivalent to an effective one.
  bool effective_class(const std::vector<long>& chips, std::size_t q) {
    long deg = 0;
    bool effective = true;
    for (auto c : chips) {
      deg += c;
      effective = effective && c >= 0;
    }
    if (effective) return true;
    if (deg < 0) return false;
    return reduced_value(chips, q) >= 0;
  }

 private:
  struct Levels {
    std::vector<long> dist;
    std::vector<std::size_t> order;        // nodes by distance
    std::vector<std::size_t> level_start;  // offset of each distance level in order
    std::vector<long> down;                // edges to the previous level
    std::size_t total = 0;
    std::size_t level_end(std::size_t k) const {
      return k + 1 < level_start.size() ? level_start[k + 1] : total;
    }
  };

  const Levels& levels(std::size_t q) {
    auto& lv = levels_[q];
    if (!lv.order.empty()) return lv;
    const auto dist = m_.distances(q);
    lv.dist = dist;
    lv.total = m_.node_count();
    lv.order.resize(lv.total);
    for (std::size_t i = 0; i < lv.total; ++i) lv.order[i] = i;
    std::stable_sort(lv.order.begin(), lv.order.end(),
                     [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
    const long max_level = dist[lv.order.back()];
    lv.level_start.assign(static_cast<std::size_t>(max_level) + 1, 0);
    for (std::size_t i = lv.total; i-- > 0;) lv.level_start[static_cast<std::size_t>(dist[lv.order[i]])] = i;
    lv.down.assign(lv.total, 0);
    for (std::size_t v = 0; v < lv.total; ++v) {
      for (auto it = m_.neighbors_begin(v); it != m_.neighbors_end(v); ++it) {
        if (dist[*it] + 1 == dist[v]) ++lv.down[v];
      }
    }
    return lv;
  }

  const LatticeModel& m_;
  std::vector<Levels> levels_;
  std::vector<long> hits_;
  std::vector<char> burnt_;
  std::vector<std::size_t> work_;
  std::vector<long> scratch_;
};

inline Reduction reduce(const LatticeModel& m, const Divisor& d, std::size_t q) {
  Reducer r(m);
  return r.reduce(d, q);
}

inline bool is_reduced(const LatticeModel& m, const Divisor& d, std::size_t q) {
  for (std::size_t n = 0; n < m.node_count(); ++n) {
    if (n != q && d[n] < 0) return false;
  }
  const auto burnt = dhar_burnt_set(m, d, q);
  return std::all_of(burnt.begin(), burnt.end(), [](bool b) { return b; });
}

inline bool is_equivalent(const LatticeModel& m, const Divisor& a, const Divisor& b) {
  if (a.degree() != b.degree()) return false;
  Reducer r(m);
  const auto q = m.base_node();
  return r.reduce(a, q).divisor == r.reduce(b, q).divisor;
}

// ---------------------------------------------------------------------------
// Rank

enum class RankMode { Full, VertexFast };

struct RankOptions {
  RankMode mode = RankMode::Full;
  /// Start the search at deg - g, which holds for every divisor.
  bool riemann_roch_floor = true;
};

inline std::vector<std::size_t> test_set(const LatticeModel& m, RankMode mode) {
  return mode == RankMode::Full ? m.all_nodes() : m.fast_test_set();
}

/// Rank queries against a fixed test set, reusing one Reducer.
class RankEngine {
 public:
  RankEngine(const LatticeModel& m, RankMode mode) : m_(m), reducer_(m), tests_(test_set(m, mode)) {}
  RankEngine(const LatticeModel& m, std::vector<std::size_t> tests)
      : m_(m), reducer_(m), tests_(std::move(tests)) {}

  const std::vector<std::size_t>& tests() const noexcept { return tests_; }
  Reducer& reducer() noexcept { return reducer_; }

  /// True when D - E is equivalent to an effective divisor for every effective
  /// E of degree r supported on the test set.
  bool rank_at_least(const Divisor& d, long r) { return rank_at_least(d.chips(), r); }

  bool rank_at_least(const std::vector<long>& chips, long r) {
    if (r < 0) return true;
    long deg = 0;
    for (auto c : chips) deg += c;
    if (deg < r) return false;
    // the last failing E is usually a failing E for the next query too
    if (!last_fail_.empty() && static_cast<long>(last_fail_.size()) == r) {
      work_ = chips;
      for (auto n : last_fail_) work_[n] -= 1;
      const bool ok = reducer_.effective_class(work_, last_fail_.front());
      if (!ok) return false;
    }
    stack_.resize(static_cast<std::size_t>(r) + 1);
    auto& top = stack_[0];
    top = chips;
    if (std::any_of(top.begin(), top.end(), [](long c) { return c < 0; })) {
      reducer_.reduce_in_place(top, m_.base_node());
      if (top[m_.base_node()] < 0) return false;
    }
    if (r == 0) return true;
    picked_.clear();
    return search(0, r);
  }

  long rank(const Divisor& d, const RankOptions& opt = {}) {
    const long deg = d.degree();
    if (deg < 0 || !reducer_.effective_class(d.chips(), m_.base_node())) return -1;
    long k = opt.riemann_roch_floor ? std::max(0L, deg - m_.genus()) : 0L;
    while (k < deg && rank_at_least(d, k + 1)) ++k;
    return k;
  }

 private:
  /// stack_[depth] is an effective divisor equivalent to D minus the points
  /// picked so far; subtracting a point that holds a chip needs no reduction.
  bool search(std::size_t from, long remaining) {
    const auto depth = picked_.size();
    for (std::size_t i = from; i < tests_.size(); ++i) {
      const auto n = tests_[i];
      auto& child = stack_[depth + 1];
      child = stack_[depth];
      child[n] -= 1;
      picked_.push_back(n);
      bool ok = true;
      if (child[n] < 0) {
        reducer_.reduce_in_place(child, n);
        ok = child[n] >= 0;
        if (!ok) last_fail_ = picked_;
      }
      if (ok && remaining > 1) ok = search(i, remaining - 1);
      picked_.pop_back();
      if (!ok) return false;
    }
    return true;
  }

  const LatticeModel& m_;
  Reducer reducer_;
  std::vector<std::size_t> tests_;
  std::vector<long> work_;
  std::vector<std::size_t> picked_;
  std::vector<std::size_t> last_fail_;
  std::vector<std::vector<long>> stack_;
};

inline long rank(const LatticeModel& m, const Divisor& d, const RankOptions& opt = {}) {
  RankEngine engine(m, opt.mode);
  return engine.rank(d, opt);
}

inline bool rank_at_least(const LatticeModel& m, const Divisor& d, long r, RankMode mode = RankMode::Full) {
  RankEngine engine(m, mode);
  return engine.rank_at_least(d, r);
}

struct RiemannRochReport {
  long rank_d = 0;
  long rank_k_minus_d = 0;
  long degree = 0;
  long genus = 0;
  bool holds = false;
};

inline RiemannRochReport riemann_roch(const LatticeModel& m, const Divisor& d, RankMode mode = RankMode::Full) {
  RankEngine engine(m, mode);
  RankOptions opt{mode, false};
  RiemannRochReport rep;
  rep.degree = d.degree();
  rep.genus = m.genus();
  rep.rank_d = engine.rank(d, opt);
  rep.rank_k_minus_d = engine.rank(canonical_divisor(m) - d, opt);
  rep.holds = rep.rank_d - rep.rank_k_minus_d == rep.degree + 1 - rep.genus;
  return rep;
}

inline bool riemann_roch_check(const LatticeModel& m, const Divisor& d, RankMode mode = RankMode::Full) {
  return riemann_roch(m, d, mode).holds;
}

}  // namespace tropbn

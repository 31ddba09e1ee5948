#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "tropbn/chipfire.hpp"
#include "tropbn/error.hpp"
#include "tropbn/graph_ops.hpp"
#include "tropbn/lattice.hpp"
#include "tropbn/metric_graph.hpp"

namespace tropbn {

/// One cycle of a chain (or of a path through a tree of cycles), described on
/// the canonical model.
struct CycleInfo {
  std::size_t index = 0;  // 1-based position along the chain
  std::size_t block = 0;  // block of the canonical model's block tree
  std::vector<std::size_t> edges;
  bool loop = false;
  std::size_t v = 0;      // entry vertex (attachment vertex for a loop)
  std::size_t w = 0;      // exit vertex
  Rational length{0};
  Rational distance{0};   // d(v, w) along the cycle
  long m = 0;             // length / distance when integral, else 0

  bool hyperelliptic() const { return loop || m == 2; }
};

namespace detail {

inline long torsion(const Rational& length, const Rational& distance) {
  if (distance <= Rational(0)) return 0;
  const Rational ratio = length / distance;
  return is_integer(ratio) && ratio > Rational(0) ? static_cast<long>(ratio.numerator()) : 0;
}

/// Fills the geometric data of a cycle block between vertices v and w.
inline CycleInfo describe_cycle(const MetricGraph& g, const Block& block, std::size_t v, std::size_t w) {
  CycleInfo c;
  c.block = 0;
  c.edges = block.edges;
  c.v = v;
  c.w = w;
  for (auto e : block.edges) c.length += g.edge(e).length;
  c.loop = block.kind == BlockKind::Loop || v == w;
  if (c.loop) return c;
  // walk from v to w along one arc
  Rational arc(0);
  std::size_t at = v;
  std::size_t came = block.edges.size();
  while (at != w) {
    for (std::size_t i = 0; i < block.edges.size(); ++i) {
      const auto& ed = g.edge(block.edges[i]);
      if (i == came || (ed.tail != at && ed.head != at)) continue;
      arc += ed.length;
      at = ed.other(at);
      came = i;
      break;
    }
  }
  c.distance = std::min(arc, c.length - arc);
  c.m = torsion(c.length, c.distance);
  return c;
}

}  // namespace detail

/// Canonical model plus block tree, with the tree-of-cycles verdict.
struct CycleStructure {
  MetricGraph model;
  BlockTree tree;
  bool tree_of_cycles = false;
  std::string reason;  // why it is not a tree of cycles

  std::vector<std::size_t> leaf_blocks() const {
    std::vector<std::size_t> out;
    for (std::size_t b = 0; b < tree.blocks.size(); ++b) {
      if (tree.block_seps[b].size() <= 1) out.push_back(b);
    }
    return out;
  }

  /// Blocks on the tree path between two blocks.
  std::vector<std::size_t> block_path(std::size_t from, std::size_t to) const {
    const auto nb = tree.blocks.size();
    const auto ns = tree.separators.size();
    // bipartite node ids: blocks 0..nb-1, separators nb..nb+ns-1
    constexpr auto unset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> parent(nb + ns, unset);
    std::vector<std::size_t> queue{from};
    parent[from] = from;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const auto x = queue[head];
      const auto& next = x < nb ? tree.block_seps[x] : tree.sep_blocks[x - nb];
      for (auto y : next) {
        const auto id = x < nb ? y + nb : y;
        if (parent[id] == unset) {
          parent[id] = x;
          queue.push_back(id);
        }
      }
    }
    std::vector<std::size_t> path;
    for (auto x = to; x != from; x = parent[x]) {
      if (x < nb) path.push_back(x);
    }
    path.push_back(from);
    std::reverse(path.begin(), path.end());
    return path;
  }

  /// Separator between consecutive blocks a, b.
  std::size_t shared_vertex(std::size_t a, std::size_t b) const {
    for (auto s : tree.block_seps[a]) {
      const auto& bs = tree.block_seps[b];
      if (std::find(bs.begin(), bs.end(), s) != bs.end()) return tree.separators[s];
    }
    throw Error(ErrorCode::Precondition, "blocks are not adjacent");
  }

  std::size_t separator_valence(std::size_t vertex) const {
    auto slot = tree.separator_slot(vertex);
    return slot < 0 ? 0 : tree.sep_blocks[static_cast<std::size_t>(slot)].size();
  }

  /// Cycles met along a path of blocks, numbered from 1.
  std::vector<CycleInfo> cycles_along(const std::vector<std::size_t>& path) const {
    std::vector<CycleInfo> out;
    for (std::size_t i = 0; i < path.size(); ++i) {
      const auto& block = tree.blocks[path[i]];
      if (block.kind == BlockKind::Bridge) continue;
      const auto v = i > 0 ? shared_vertex(path[i - 1], path[i]) : block.vertices.front();
      const auto w = i + 1 < path.size() ? shared_vertex(path[i], path[i + 1]) : v;
      std::size_t entry = v;
      std::size_t exit = w;
      if (i == 0) entry = exit;
      auto info = detail::describe_cycle(model, block, entry, exit);
      info.block = path[i];
      info.index = out.size() + 1;
      out.push_back(std::move(info));
    }
    return out;
  }
};

inline CycleStructure cycle_structure(const MetricGraph& g) {
  CycleStructure s{canonical_model(g).graph, {}, false, {}};
  s.tree = block_tree(s.model);
  for (const auto& block : s.tree.blocks) {
    if (block.kind == BlockKind::Other) {
      s.reason = "a block is neither a cycle nor a bridge";
      return s;
    }
  }
  for (std::size_t b = 0; b < s.tree.blocks.size(); ++b) {
    if (s.tree.block_seps[b].size() >= 3) {
      s.reason = "a block meets three or more separating vertices";
      return s;
    }
  }
  for (std::size_t i = 0; i < s.tree.separators.size(); ++i) {
    const auto tv = s.tree.sep_blocks[i].size();
    if (tv >= 3 && s.model.valence(s.tree.separators[i]) != tv) {
      s.reason = "branching vertex \"" + s.model.vertex(s.tree.separators[i]) +
                 "\" has a different valence in the graph";
      return s;
    }
  }
  s.tree_of_cycles = true;
  return s;
}

inline bool is_tree_of_cycles(const MetricGraph& g) { return cycle_structure(g).tree_of_cycles; }

// ---------------------------------------------------------------------------
// Chains

struct ChainProfile {
  CycleStructure structure;
  std::vector<CycleInfo> cycles;

  long genus() const { return static_cast<long>(cycles.size()); }
  bool hyperelliptic() const {
    return std::all_of(cycles.begin(), cycles.end(), [](const CycleInfo& c) { return c.hyperelliptic(); });
  }
  std::vector<bool> flags() const {
    std::vector<bool> out;
    for (const auto& c : cycles) out.push_back(c.hyperelliptic());
    return out;
  }
};

inline std::optional<ChainProfile> try_chain_profile(const MetricGraph& g) {
  auto s = cycle_structure(g);
  if (!s.tree_of_cycles) return std::nullopt;
  for (std::size_t i = 0; i < s.tree.separators.size(); ++i) {
    if (s.tree.sep_blocks[i].size() >= 3) return std::nullopt;
  }
  const auto leaves = s.leaf_blocks();
  if (leaves.empty()) return std::nullopt;
  const auto start = leaves.front();
  const auto end = leaves.size() > 1 ? leaves.back() : start;
  auto path = s.block_path(start, end);
  ChainProfile p{std::move(s), {}};
  p.cycles = p.structure.cycles_along(path);
  return p;
}

inline ChainProfile chain_profile(const MetricGraph& g) {
  auto p = try_chain_profile(g);
  if (!p) throw Error(ErrorCode::NotAChain, "block tree is not a path of cycles and bridges");
  return std::move(*p);
}

/// Indices j_1 < ... < j_k of a Martens-special chain of rank r with the given
/// hyperelliptic flags per cycle (cycle i at position i-1), or nothing.
inline std::optional<std::vector<long>> martens_indices(const std::vector<bool>& hyperelliptic, long r) {
  const long g = static_cast<long>(hyperelliptic.size());
  if (r < 1 || g < 2 * r + 3) return std::nullopt;
  std::vector<long> j;
  for (long s = 1; s <= g; ++s) {
    if (!hyperelliptic[static_cast<std::size_t>(s - 1)]) j.push_back(s);
  }
  if (j.empty()) return std::nullopt;
  if (!(r + 1 < j.front() && j.back() < g - r)) return std::nullopt;
  for (std::size_t i = 0; i + 1 < j.size(); ++i) {
    if (j[i + 1] - j[i] < r + 1) return std::nullopt;
  }
  return j;
}

/// Largest rank r for which the flags form a Martens-special chain, or 0.
inline long max_martens_rank(const std::vector<bool>& hyperelliptic) {
  long best = 0;
  for (long r = 1; 2 * r + 3 <= static_cast<long>(hyperelliptic.size()); ++r) {
    if (martens_indices(hyperelliptic, r)) best = r;
  }
  return best;
}

enum class PathKind { P1, P2, P3 };

inline std::string to_string(PathKind k) {
  switch (k) {
    case PathKind::P1: return "P1";
    case PathKind::P2: return "P2";
    case PathKind::P3: return "P3";
  }
  return "?";
}

struct PathLabel {
  std::string from;        // attachment vertex of the first leaf cycle
  std::string to;          // attachment vertex of the last leaf cycle
  long genus = 0;
  std::vector<long> m;     // per cycle, 0 for loops
  PathKind kind = PathKind::P1;
  long rank = 0;           // P2: largest rank; P3: genus of the added chain
  std::string attach;      // P3: vertex where the hyperelliptic chain is added
  std::vector<long> indices;
};

struct MartensCertificate {
  enum class Kind { Chain, Tree } kind = Kind::Chain;
  long r = 0;
  long k = 0;
  std::vector<long> indices;      // chain case
  std::vector<PathLabel> paths;   // tree case
};

inline std::optional<MartensCertificate> is_martens_special_chain(const MetricGraph& g, long r) {
  const auto p = chain_profile(g);
  auto j = martens_indices(p.flags(), r);
  if (!j) return std::nullopt;
  MartensCertificate cert;
  cert.kind = MartensCertificate::Kind::Chain;
  cert.r = r;
  cert.k = static_cast<long>(j->size());
  cert.indices = std::move(*j);
  return cert;
}

/// Hyperelliptic verdict from the cycle data of a tree of cycles.
inline bool tree_hyperelliptic(const CycleStructure& s) {
  for (std::size_t b = 0; b < s.tree.blocks.size(); ++b) {
    const auto& block = s.tree.blocks[b];
    if (block.kind != BlockKind::Cycle) continue;
    const auto& seps = s.tree.block_seps[b];
    if (seps.size() < 2) continue;
    auto c = detail::describe_cycle(s.model, block, s.tree.separators[seps[0]], s.tree.separators[seps[1]]);
    if (c.m != 2) return false;
  }
  return true;
}

/// Every cycle of a tree of cycles, with its separators as v and w.
inline std::vector<CycleInfo> tree_cycles(const CycleStructure& s) {
  std::vector<CycleInfo> out;
  for (std::size_t b = 0; b < s.tree.blocks.size(); ++b) {
    const auto& block = s.tree.blocks[b];
    if (block.kind == BlockKind::Bridge) continue;
    const auto& seps = s.tree.block_seps[b];
    std::size_t v = seps.empty() ? block.vertices.front() : s.tree.separators[seps[0]];
    std::size_t w = seps.size() >= 2 ? s.tree.separators[seps[1]] : v;
    auto c = detail::describe_cycle(s.model, block, v, w);
    c.block = b;
    c.index = out.size() + 1;
    out.push_back(std::move(c));
  }
  return out;
}

inline std::optional<MartensCertificate> is_martens_special_tree(const MetricGraph& g) {
  const auto s = cycle_structure(g);
  if (!s.tree_of_cycles) throw Error(ErrorCode::NotATreeOfCycles, s.reason);
  if (tree_hyperelliptic(s)) return std::nullopt;

  MartensCertificate cert;
  cert.kind = MartensCertificate::Kind::Tree;
  for (const auto& c : tree_cycles(s)) cert.k += c.hyperelliptic() ? 0 : 1;

  const auto leaves = s.leaf_blocks();
  long min_p2 = 0;
  for (std::size_t a = 0; a < leaves.size(); ++a) {
    for (std::size_t b = a + 1; b < leaves.size(); ++b) {
      const auto path = s.block_path(leaves[a], leaves[b]);
      const auto cycles = s.cycles_along(path);
      PathLabel label;
      label.from = s.model.vertex(cycles.front().v);
      label.to = s.model.vertex(cycles.back().v);
      label.genus = static_cast<long>(cycles.size());
      std::vector<bool> flags;
      for (const auto& c : cycles) {
        flags.push_back(c.hyperelliptic());
        label.m.push_back(c.loop ? 0 : c.m);
      }
      if (std::all_of(flags.begin(), flags.end(), [](bool f) { return f; })) {
        label.kind = PathKind::P1;
        cert.paths.push_back(std::move(label));
        continue;
      }
      if (const long best = max_martens_rank(flags); best > 0) {
        label.kind = PathKind::P2;
        label.rank = best;
        label.indices = *martens_indices(flags, best);
        min_p2 = min_p2 == 0 ? best : std::min(min_p2, best);
        cert.paths.push_back(std::move(label));
        continue;
      }
      // P3: insert a hyperelliptic chain of genus r' at a branching vertex
      bool found = false;
      std::size_t cycles_before = 0;
      for (std::size_t i = 0; i + 1 < path.size() && !found; ++i) {
        if (s.tree.blocks[path[i]].kind != BlockKind::Bridge) ++cycles_before;
        const auto vertex = s.shared_vertex(path[i], path[i + 1]);
        if (s.separator_valence(vertex) < 3) continue;
        for (long extra = 1; extra + 3 <= label.genus && !found; ++extra) {
          auto grown = flags;
          grown.insert(grown.begin() + static_cast<std::ptrdiff_t>(cycles_before),
                       static_cast<std::size_t>(extra), true);
          if (auto j = martens_indices(grown, extra)) {
            found = true;
            label.kind = PathKind::P3;
            label.rank = extra;
            label.attach = s.model.vertex(vertex);
            label.indices = *j;
          }
        }
      }
      if (!found) return std::nullopt;
      cert.paths.push_back(std::move(label));
    }
  }
  cert.r = min_p2 == 0 ? 1 : min_p2;
  return cert;
}

// ---------------------------------------------------------------------------
// Hyperelliptic involution on a single cycle

/// Image of p under the involution of cycle c (canonical-model coordinates).
/// A loop is reflected through its attachment vertex; an interior cycle with
/// m = 2 swaps its two arcs, fixing v and w.
inline MetricPoint cycle_involution(const MetricGraph& model, const CycleInfo& c, const MetricPoint& p) {
  if (!c.hyperelliptic()) {
    throw Error(ErrorCode::NotHyperellipticCycle, "cycle " + std::to_string(c.index) + " has m != 2");
  }
  if (p.is_vertex()) {
    auto v = model.vertex_index(p.vertex);
    if (!v || (*v != c.v && *v != c.w)) throw Error(ErrorCode::Precondition, "point is not on the cycle");
    return p;
  }
  auto e = model.edge_index(p.edge);
  if (!e || std::find(c.edges.begin(), c.edges.end(), *e) == c.edges.end()) {
    throw Error(ErrorCode::Precondition, "point is not on the cycle");
  }
  const auto& ed = model.edge(*e);
  if (c.loop) return MetricPoint::on_edge(ed.id, ed.length - p.offset);
  // distance from v along this arc, then the same distance along the other arc
  const Rational from_v = ed.tail == c.v ? p.offset : ed.length - p.offset;
  const auto other = c.edges[0] == *e ? c.edges[1] : c.edges[0];
  const auto& od = model.edge(other);
  return MetricPoint::on_edge(od.id, od.tail == c.v ? from_v : od.length - from_v);
}

inline MetricPoint cycle_involution(const ChainProfile& profile, std::size_t i, const MetricPoint& p) {
  if (i < 1 || i > profile.cycles.size()) throw Error(ErrorCode::Precondition, "cycle index out of range");
  return cycle_involution(profile.structure.model, profile.cycles[i - 1], p);
}

// ---------------------------------------------------------------------------
// Hyperellipticity

struct HyperellipticResult {
  bool hyperelliptic = false;
  std::string method;                // "chain", "tree" or "lattice"
  std::vector<MetricPoint> witness;  // a degree-2 divisor of rank 1 when hyperelliptic
  std::vector<std::int64_t> resolutions;
};

/// Degree-2 rank-1 lattice divisor on m, searched in lexicographic node order.
inline std::optional<std::pair<std::size_t, std::size_t>> find_g12(const LatticeModel& m) {
  RankEngine engine(m, RankMode::VertexFast);
  std::vector<long> chips(m.node_count(), 0);
  for (std::size_t a = 0; a < m.node_count(); ++a) {
    for (std::size_t b = a; b < m.node_count(); ++b) {
      chips[a] += 1;
      chips[b] += 1;
      const bool ok = engine.rank_at_least(chips, 1);
      chips[a] -= 1;
      chips[b] -= 1;
      if (ok) return std::make_pair(a, b);
    }
  }
  return std::nullopt;
}

inline HyperellipticResult is_hyperelliptic(const MetricGraph& g, std::int64_t resolution, int max_escalations = 2) {
  if (g.genus() < 2) throw Error(ErrorCode::Precondition, "hyperellipticity needs genus at least 2");
  const auto contracted = contract_bridges(g);
  HyperellipticResult out;
  auto s = cycle_structure(contracted);
  if (s.tree_of_cycles) {
    const bool chain = try_chain_profile(contracted).has_value();
    out.method = chain ? "chain" : "tree";
    out.hyperelliptic = tree_hyperelliptic(s);
    if (out.hyperelliptic) {
      // twice a fixed point of the involution: the attachment of a leaf loop
      const auto leaf = s.leaf_blocks().front();
      const auto& block = s.tree.blocks[leaf];
      const auto& slots = s.tree.block_seps[leaf];
      const auto v = slots.empty() ? block.vertices.front() : s.tree.separators[slots.front()];
      out.witness = {MetricPoint::at_vertex(s.model.vertex(v)), MetricPoint::at_vertex(s.model.vertex(v))};
    }
    return out;
  }
  out.method = "lattice";
  std::optional<bool> previous;
  std::int64_t n = resolution;
  for (int level = 0; level <= max_escalations; ++level, n *= 2) {
    LatticeModel m(contracted, n);
    const auto pair = find_g12(m);
    out.resolutions.push_back(n);
    const bool verdict = pair.has_value();
    if (verdict) out.witness = {m.point(pair->first), m.point(pair->second)};
    if (previous && *previous == verdict) {
      out.hyperelliptic = verdict;
      return out;
    }
    previous = verdict;
  }
  throw Error(ErrorCode::Unstable, "hyperelliptic verdict changes across resolutions");
}

}  // namespace tropbn

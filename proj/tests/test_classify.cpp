#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace tropbn;
using namespace testing_support;

namespace {

/// Chain with loops at both ends and one two-arc cycle per pair, bridges of length 1.
MetricGraph chain(const std::vector<std::pair<Rational, Rational>>& arcs) {
  std::vector<std::string> vs{"x1"};
  std::vector<EdgeSpec> es{{"c1", "x1", "x1", Rational(1)}};
  std::string last = "x1";
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    const auto k = std::to_string(i + 2);
    vs.push_back("v" + k);
    vs.push_back("w" + k);
    es.push_back({"b" + k, last, "v" + k, Rational(1)});
    es.push_back({"c" + k + "a", "v" + k, "w" + k, arcs[i].first});
    es.push_back({"c" + k + "b", "v" + k, "w" + k, arcs[i].second});
    last = "w" + k;
  }
  const auto k = std::to_string(arcs.size() + 2);
  vs.push_back("x" + k);
  es.push_back({"b" + k, last, "x" + k, Rational(1)});
  es.push_back({"c" + k, "x" + k, "x" + k, Rational(1)});
  return make(vs, es);
}

std::vector<long> m_values(const ChainProfile& p) {
  std::vector<long> out;
  for (const auto& c : p.cycles) out.push_back(c.m);
  return out;
}

MetricGraph hyperelliptic_chain(std::size_t genus) {
  return chain(std::vector<std::pair<Rational, Rational>>(genus - 2, {Rational(1), Rational(1)}));
}

}  // namespace

TEST(ChainProfile, Figure3) {
  const auto p = chain_profile(fixture("fig3_chain"));
  EXPECT_EQ(p.genus(), 5);
  EXPECT_EQ(m_values(p), (std::vector<long>{0, 2, 3, 2, 0}));
  EXPECT_TRUE(p.cycles.front().loop);
  EXPECT_TRUE(p.cycles.back().loop);
  EXPECT_FALSE(p.hyperelliptic());
}

TEST(ChainProfile, EqualArcsGiveTwo) {
  const auto p = chain_profile(hyperelliptic_chain(5));
  EXPECT_EQ(m_values(p), (std::vector<long>{0, 2, 2, 2, 0}));
  EXPECT_TRUE(p.hyperelliptic());
}

TEST(ChainProfile, NonIntegralRatioGivesZero) {
  const auto p = chain_profile(chain({{Rational(13, 10), Rational(17, 10)}}));
  ASSERT_EQ(p.cycles.size(), 3u);
  EXPECT_EQ(p.cycles[1].length, Rational(3));
  EXPECT_EQ(p.cycles[1].distance, Rational(13, 10));
  EXPECT_EQ(p.cycles[1].m, 0);
}

TEST(ChainProfile, TorsionMatchesRatio) {
  EXPECT_EQ(detail::torsion(Rational(3), Rational(1)), 3);
  EXPECT_EQ(detail::torsion(Rational(2), Rational(1)), 2);
  EXPECT_EQ(detail::torsion(Rational(3), Rational(13, 10)), 0);
  for (const auto& [a, b] : std::vector<std::pair<long, long>>{{1, 1}, {1, 2}, {2, 3}, {1, 4}, {3, 5}}) {
    const auto c = chain_profile(chain({{Rational(a), Rational(b)}})).cycles[1];
    const Rational ratio = Rational(a + b) / Rational(std::min(a, b));
    EXPECT_EQ(c.m, ratio.denominator() == 1 ? ratio.numerator() : 0);
    EXPECT_EQ(c.m == 2, a == b);
  }
}

TEST(ChainProfile, RejectsOtherShapes) {
  for (const auto* name : {"fig7_tree", "fig5", "k4"}) {
    try {
      chain_profile(fixture(name));
      ADD_FAILURE() << name;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::NotAChain) << name;
    }
  }
}

TEST(TreeOfCycles, Examples) {
  EXPECT_FALSE(is_tree_of_cycles(fixture("fig5")));
  EXPECT_TRUE(is_tree_of_cycles(fixture("fig8_tree")));
  EXPECT_TRUE(is_tree_of_cycles(fixture("fig7_tree")));
  EXPECT_TRUE(is_tree_of_cycles(fixture("fig3_chain")));
  EXPECT_FALSE(is_tree_of_cycles(fixture("k4")));
}

TEST(Hyperelliptic, ChainFastPathAgreesWithLattice) {
  for (const auto& g : {hyperelliptic_chain(3), hyperelliptic_chain(4), fixture("fig3_chain"),
                        chain({{Rational(1), Rational(2)}})}) {
    const auto c = contract_bridges(g);
    const auto fast = is_hyperelliptic(g, default_resolution(c));
    EXPECT_EQ(fast.method, "chain");
    const LatticeModel m(c, default_resolution(c));
    EXPECT_EQ(fast.hyperelliptic, find_g12(m).has_value());
    EXPECT_EQ(fast.hyperelliptic, chain_profile(g).hyperelliptic());
  }
}

TEST(Hyperelliptic, Figure3IsNot) { EXPECT_FALSE(is_hyperelliptic(fixture("fig3_chain"), 6).hyperelliptic); }

TEST(Hyperelliptic, ThetaWitness) {
  const auto h = is_hyperelliptic(fixture("theta"), 2);
  ASSERT_TRUE(h.hyperelliptic);
  ASSERT_EQ(h.witness.size(), 2u);
  const LatticeModel m(fixture("theta"), 2);
  Divisor d(m);
  for (const auto& p : h.witness) d[m.node(p)] += 1;
  EXPECT_EQ(rank(m, d), 1);
  Divisor v(m);
  v[m.node(MetricPoint::at_vertex("v1"))] += 1;
  v[m.node(MetricPoint::at_vertex("v2"))] += 1;
  EXPECT_EQ(rank(m, v), 1);
}

TEST(Hyperelliptic, WitnessHasRankOne) {
  for (const auto* name : {"dumbbell", "hyp_chain_g4", "theta_subdivided"}) {
    const auto g = fixture(name);
    const auto h = is_hyperelliptic(g, 2);
    ASSERT_TRUE(h.hyperelliptic) << name;
    const auto c = contract_bridges(g);
    const LatticeModel m(c, default_resolution(c));
    Divisor d(m);
    for (const auto& p : h.witness) d[m.node(p)] += 1;
    EXPECT_EQ(d.degree(), 2);
    EXPECT_EQ(rank(m, d), 1) << name;
  }
  EXPECT_FALSE(is_hyperelliptic(fixture("k4"), 1).hyperelliptic);
}

TEST(Involution, FixesEndpointsAndSquaresToIdentity) {
  const auto p = chain_profile(hyperelliptic_chain(4));
  const auto& model = p.structure.model;
  const auto& c = p.cycles[1];
  const MetricPoint v = MetricPoint::at_vertex(model.vertex(c.v));
  EXPECT_TRUE(cycle_involution(p, 2, v) == v);
  for (const auto& t : {Rational(1, 4), Rational(1, 2), Rational(3, 4)}) {
    const auto x = MetricPoint::on_edge(model.edge(c.edges[0]).id, t);
    const auto y = cycle_involution(p, 2, x);
    EXPECT_EQ(y.edge, model.edge(c.edges[1]).id);
    EXPECT_TRUE(cycle_involution(p, 2, y) == x);
  }
}

TEST(Involution, PointPlusImageIsTwiceAnEndpoint) {
  const auto p = chain_profile(hyperelliptic_chain(4));
  const auto& model = p.structure.model;
  const LatticeModel m(model, 4);
  for (std::size_t i = 1; i <= p.cycles.size(); ++i) {
    const auto& c = p.cycles[i - 1];
    for (const auto& t : {Rational(1, 4), Rational(1, 2)}) {
      const auto x = MetricPoint::on_edge(model.edge(c.edges[0]).id, t);
      auto lhs = point_divisor(m, m.node(x));
      lhs[m.node(cycle_involution(p, i, x))] += 1;
      EXPECT_TRUE(is_equivalent(m, lhs, point_divisor(m, c.v, 2))) << i;
      EXPECT_TRUE(is_equivalent(m, lhs, point_divisor(m, c.w, 2))) << i;
    }
  }
}

TEST(Involution, RejectsNonHyperellipticCycle) {
  const auto p = chain_profile(fixture("fig3_chain"));
  const auto& e = p.structure.model.edge(p.cycles[2].edges[0]);
  try {
    cycle_involution(p, 3, MetricPoint::on_edge(e.id, Rational(1, 2)));
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::NotHyperellipticCycle);
  }
}

TEST(Involution, Figure4FirstLoop) {
  const auto g = fixture("fig3_chain");
  const auto p = chain_profile(g);
  const LatticeModel m(g, 12);
  const auto x1 = MetricPoint::on_edge("c1", Rational(1, 4));
  auto lhs = point_divisor(m, m.node(x1));
  lhs[m.node(cycle_involution(p, 1, x1))] += 1;
  EXPECT_TRUE(is_equivalent(m, lhs, point_divisor(m, m.node(MetricPoint::at_vertex("x1")), 2)));
}

TEST(MartensChain, Figure3) {
  const auto cert = is_martens_special_chain(fixture("fig3_chain"), 1);
  ASSERT_TRUE(cert);
  EXPECT_EQ(cert->r, 1);
  EXPECT_EQ(cert->k, 1);
  EXPECT_EQ(cert->indices, std::vector<long>{3});
  EXPECT_FALSE(is_martens_special_chain(fixture("fig3_chain"), 2));
  EXPECT_FALSE(is_martens_special_chain(hyperelliptic_chain(7), 1));
}

// the three conditions of the definition, checked directly
TEST(MartensChain, MatchesDefinitionOnAllProfiles) {
  for (std::size_t g = 3; g <= 9; ++g) {
    for (unsigned mask = 0; mask < (1u << (g - 2)); ++mask) {
      std::vector<bool> flags(g, true);
      for (std::size_t i = 0; i + 2 < g; ++i) flags[i + 1] = ((mask >> i) & 1u) == 0;
      for (long r = 1; 2 * r + 3 <= static_cast<long>(g) + 2; ++r) {
        std::vector<long> j;
        for (std::size_t s = 1; s <= g; ++s) {
          if (!flags[s - 1]) j.push_back(static_cast<long>(s));
        }
        bool ok = static_cast<long>(g) >= 2 * r + 3 && !j.empty();
        for (std::size_t i = 0; ok && i < j.size(); ++i) {
          ok = j[i] > r + 1 && j[i] < static_cast<long>(g) - r;
          if (ok && i + 1 < j.size()) ok = j[i + 1] - j[i] >= r + 1;
        }
        const auto got = martens_indices(flags, r);
        EXPECT_EQ(got.has_value(), ok) << g << " " << mask << " " << r;
        if (got) EXPECT_EQ(*got, j);
      }
    }
  }
}

TEST(MartensChain, HigherRankImpliesLower) {
  for (std::size_t g = 5; g <= 11; ++g) {
    for (unsigned mask = 0; mask < (1u << (g - 2)); ++mask) {
      std::vector<bool> flags(g, true);
      for (std::size_t i = 0; i + 2 < g; ++i) flags[i + 1] = ((mask >> i) & 1u) == 0;
      for (long r = 2; 2 * r + 3 <= static_cast<long>(g); ++r) {
        if (!martens_indices(flags, r)) continue;
        for (long s = 1; s < r; ++s) EXPECT_TRUE(martens_indices(flags, s));
      }
    }
  }
}

TEST(MartensChain, NotHyperelliptic) {
  for (const auto& g : {fixture("fig3_chain"), fixture("chain_g6_nonhyp")}) {
    if (!is_martens_special_chain(g, 1)) continue;
    EXPECT_FALSE(is_hyperelliptic(g, 2).hyperelliptic);
  }
}

TEST(MartensTree, Figure7) {
  const auto cert = is_martens_special_tree(fixture("fig7_tree"));
  ASSERT_TRUE(cert);
  EXPECT_EQ(cert->r, 1);
  EXPECT_EQ(cert->k, 3);
  ASSERT_EQ(cert->paths.size(), 3u);
  for (const auto& p : cert->paths) EXPECT_EQ(p.kind, PathKind::P3);
}

TEST(MartensTree, Figure8) {
  const auto g = fixture("fig8_tree");
  const auto cert = is_martens_special_tree(g);
  ASSERT_TRUE(cert);
  EXPECT_EQ(cert->r, 1);
  bool seven = false;
  for (const auto& p : cert->paths) {
    EXPECT_NE(p.kind, PathKind::P3);
    if (p.genus == 7 && p.kind == PathKind::P2) seven = true;
  }
  EXPECT_TRUE(seven);
  // the genus-2 attachment is hyperelliptic on its own
  const auto s = cycle_structure(g);
  long tail_cycles = 0;
  for (const auto& c : tree_cycles(s)) {
    if (s.model.edge(c.edges[0]).id.rfind("cu", 0) != 0) continue;
    ++tail_cycles;
    EXPECT_TRUE(c.hyperelliptic());
  }
  EXPECT_EQ(tail_cycles, 2);
}

TEST(MartensTree, HyperellipticTreeIsNone) {
  EXPECT_FALSE(is_martens_special_tree(hyperelliptic_chain(6)));
  EXPECT_FALSE(is_martens_special_tree(fixture("hyp_chain_g4")));
}

TEST(CycleReduce, AlreadyReducedUnchanged) {
  const auto g = fixture("fig3_chain");
  const LatticeModel m(g, 12);
  Divisor d(m);
  d[m.node(MetricPoint::on_edge("c1", Rational(1, 4)))] = 1;
  d[m.node(MetricPoint::on_edge("c3a", Rational(1, 6)))] = 1;
  ASSERT_TRUE(is_cycle_reduced(m, d));
  const auto cr = cycle_reduce(m, d);
  EXPECT_TRUE(cr.divisor == d);
  EXPECT_EQ(cr.pushes, 0u);
}

TEST(CycleReduce, TwoChipsPushToNeighbour) {
  const auto g = hyperelliptic_chain(3);
  const LatticeModel m(g, 4);
  Divisor d(m);
  d[m.node(MetricPoint::on_edge("c2a", Rational(1, 4)))] = 1;
  d[m.node(MetricPoint::on_edge("c2b", Rational(1, 2)))] = 1;
  const auto cr = cycle_reduce(m, d);
  EXPECT_TRUE(is_cycle_reduced(m, cr.divisor));
  EXPECT_TRUE(is_equivalent(m, d, cr.divisor));
  EXPECT_TRUE(cr.divisor.is_effective());
  EXPECT_EQ(fire(m, d.chips(), cr.script), cr.divisor.chips());
}

TEST(CycleReduce, GenusManyChipsOnOneLoop) {
  const auto g = fixture("fig3_chain");
  const LatticeModel m(g, 12);
  Divisor d(m);
  d[m.node(MetricPoint::on_edge("c1", Rational(1, 2)))] = g.genus();
  const auto cr = cycle_reduce(m, d);
  EXPECT_TRUE(is_cycle_reduced(m, cr.divisor));
  EXPECT_TRUE(is_equivalent(m, d, cr.divisor));
  EXPECT_EQ(cr.divisor.degree(), g.genus());
}

TEST(CycleReduce, RandomInputs) {
  std::mt19937 rng(41);
  for (const auto* name : {"fig3_chain", "fig7_tree", "fig8_tree"}) {
    const auto g = fixture(name);
    const LatticeModel m(g, default_resolution(g));
    for (int i = 0; i < 15; ++i) {
      Divisor d(m);
      const auto deg = 1 + static_cast<long>(rng() % static_cast<unsigned>(g.genus()));
      for (long k = 0; k < deg; ++k) d[rng() % m.node_count()] += 1;
      const auto cr = cycle_reduce(m, d);
      EXPECT_TRUE(is_cycle_reduced(m, cr.divisor)) << name;
      EXPECT_TRUE(cr.divisor.is_effective());
      EXPECT_TRUE(is_equivalent(m, d, cr.divisor));
    }
  }
}

TEST(CycleReduce, Errors) {
  const auto g = fixture("fig3_chain");
  const LatticeModel m(g, 6);
  try {
    cycle_reduce(m, point_divisor(m, 0, g.genus() + 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegreeTooLarge);
  }
  const LatticeModel k(fixture("k4"), 1);
  try {
    cycle_reduce(k, point_divisor(k, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotATreeOfCycles);
  }
}

#include <gtest/gtest.h>

#include "support.hpp"

using namespace tropbn;
using namespace testing_support;

namespace {

MetricGraph from_text(const std::string& text) { return parse_graph(text); }

ErrorCode code_of(const std::string& text) {
  try {
    from_text(text);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for " << text;
  return ErrorCode::NotFound;
}

}  // namespace

TEST(ParseGraph, ThetaHasGenusTwo) {
  const auto g = from_text(R"({"vertices":["a","b"],"edges":[
    {"id":"e1","ends":["a","b"],"length":"1"},{"id":"e2","ends":["a","b"],"length":"1"},
    {"id":"e3","ends":["a","b"],"length":"1"}]})");
  EXPECT_EQ(g.genus(), 2);
  EXPECT_EQ(fixture("theta").genus(), 2);
}

TEST(ParseGraph, LoopOfLengthThreeHalves) {
  const auto g = from_text(R"({"vertices":["v"],"edges":[{"id":"l","ends":["v","v"],"length":"3/2"}]})");
  EXPECT_EQ(g.genus(), 1);
  EXPECT_EQ(g.edge(0).length, Rational(3, 2));
}

TEST(ParseGraph, Errors) {
  EXPECT_EQ(code_of(R"({"vertices":["v"],"edges":[{"id":"l","ends":["v","v"],"length":"0"}]})"),
            ErrorCode::NonPositiveLength);
  EXPECT_EQ(code_of(R"({"vertices":["v"],"edges":[{"id":"l","ends":["v","v"],"length":"-1"}]})"),
            ErrorCode::NonPositiveLength);
  EXPECT_EQ(code_of(R"({"vertices":["v"],"edges":[{"id":"l","ends":["v","w"],"length":"1"}]})"),
            ErrorCode::DanglingEndpoint);
  EXPECT_EQ(code_of(R"({"vertices":["v","v"],"edges":[]})"), ErrorCode::DuplicateId);
  EXPECT_EQ(code_of(R"({"vertices":["a","b"],"edges":[{"id":"x","ends":["a","a"],"length":"1"},
    {"id":"y","ends":["b","b"],"length":"1"}]})"),
            ErrorCode::Disconnected);
  EXPECT_EQ(code_of(R"({"vertices":["a","b"],"edges":[{"id":"x","ends":["a","a"],"length":"1"},
    {"id":"y","ends":["a","b"],"length":"1"}]})"),
            ErrorCode::LeafVertex);
  EXPECT_EQ(code_of("{not json"), ErrorCode::Parse);
  EXPECT_EQ(code_of(R"({"vertices":["v"],"edges":[{"id":"l","ends":["v","v"],"length":"1/0"}]})"), ErrorCode::Parse);
}

TEST(ParseGraph, ZeroLengthBridgesContractAtParse) {
  const auto g = fixture("chain_g6_nonhyp");
  EXPECT_EQ(g.genus(), 6);
  for (const auto& e : g.edges()) EXPECT_GT(e.length, Rational(0));
  const auto bridges = find_bridges(g);
  EXPECT_EQ(std::count(bridges.begin(), bridges.end(), true), 0);
}

TEST(ParseGraph, RoundTripIsExact) {
  for (const auto* name : {"theta", "fig3_chain", "fig5", "fig10", "k4_generic"}) {
    const auto g = fixture(name);
    const auto again = parse_graph(to_json(g).dump());
    EXPECT_TRUE(again == g) << name;
    for (std::size_t e = 0; e < g.edge_count(); ++e) EXPECT_EQ(again.edge(e).length, g.edge(e).length);
  }
}

TEST(Genus, Examples) {
  EXPECT_EQ(genus(fixture("theta")), 2);
  EXPECT_EQ(genus(fixture("fig3_chain")), 5);
  EXPECT_EQ(genus(fixture("fig7_tree")), 9);
  EXPECT_EQ(genus(fixture("fig10")), 7);
}

TEST(CanonicalModel, SuppressesValenceTwo) {
  const auto cm = canonical_model(fixture("theta_subdivided"));
  EXPECT_FALSE(cm.non_canonical);
  EXPECT_EQ(cm.graph.vertex_count(), 2u);
  EXPECT_EQ(cm.graph.edge_count(), 3u);
  for (const auto& e : cm.graph.edges()) EXPECT_EQ(e.length, Rational(1));
}

TEST(CanonicalModel, DumbbellUnchangedCircleFlagged) {
  const auto d = fixture("dumbbell");
  EXPECT_TRUE(canonical_model(d).graph == d);
  const auto c = canonical_model(fixture("circle"));
  EXPECT_TRUE(c.non_canonical);
  EXPECT_EQ(c.graph.vertex_count(), 1u);
}

TEST(CanonicalModel, Idempotent) {
  for (const auto* name : {"theta_subdivided", "fig3_chain", "fig11", "circle"}) {
    const auto once = canonical_model(fixture(name)).graph;
    EXPECT_TRUE(canonical_model(once).graph == once) << name;
  }
}

TEST(ContractBridges, Examples) {
  const auto d = contract_bridges(fixture("dumbbell"));
  EXPECT_EQ(d.vertex_count(), 1u);
  EXPECT_EQ(d.genus(), 2);
  const auto t = fixture("theta");
  EXPECT_TRUE(contract_bridges(t) == t);
  const auto c = contract_bridges(fixture("fig3_chain"));
  EXPECT_EQ(c.genus(), 5);
  EXPECT_EQ(c.edge_count(), 8u);
}

TEST(ContractBridges, LeavesNoBridges) {
  for (const auto* name : {"dumbbell", "fig3_chain", "fig5", "fig7_tree", "fig10"}) {
    const auto g = contract_bridges(fixture(name));
    EXPECT_TRUE(edge_cuts(g, 1).empty()) << name;
    EXPECT_EQ(g.genus(), fixture(name).genus());
  }
}

TEST(Subdivide, Examples) {
  const auto loop = from_text(R"({"vertices":["v"],"edges":[{"id":"l","ends":["v","v"],"length":"1"}]})");
  EXPECT_EQ(subdivide(loop, 4).node_count(), 4u);
  const auto seg = from_text(R"({"vertices":["a","b"],"edges":[{"id":"x","ends":["a","b"],"length":"3/2"},
    {"id":"y","ends":["a","b"],"length":"1"}]})");
  const auto m = subdivide(seg, 2);
  EXPECT_EQ(m.steps(0), 3);
  EXPECT_EQ(m.node_count(), 2u + 2u + 1u);
  try {
    subdivide(seg, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ResolutionTooCoarse);
  }
}

TEST(Subdivide, LoopNeedsInteriorNode) {
  const auto loop = from_text(R"({"vertices":["v"],"edges":[{"id":"l","ends":["v","v"],"length":"1"}]})");
  try {
    subdivide(loop, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LoopTooShort);
  }
}

TEST(Subdivide, PreservesGenusAndOrdersNodes) {
  for (const auto* name : {"theta", "fig3_chain", "fig5", "fig8_tree"}) {
    const auto g = fixture(name);
    for (std::int64_t k : {1, 2}) {
      const auto m = subdivide(g, default_resolution(g) * k);
      std::size_t degree_sum = 0;
      for (std::size_t n = 0; n < m.node_count(); ++n) degree_sum += m.degree(n);
      const long lattice_genus = static_cast<long>(degree_sum / 2) - static_cast<long>(m.node_count()) + 1;
      EXPECT_EQ(lattice_genus, g.genus()) << name;
      for (std::size_t n = 0; n < m.node_count(); ++n) EXPECT_EQ(m.node(m.point(n)), n);
    }
  }
}

TEST(BlockTree, ChainIsAPath) {
  const auto t = block_tree(fixture("fig3_chain"));
  EXPECT_TRUE(t.is_tree());
  for (const auto& bs : t.block_seps) EXPECT_LE(bs.size(), 2u);
  for (const auto& sb : t.sep_blocks) EXPECT_EQ(sb.size(), 2u);
}

TEST(BlockTree, Figure7HasOneBranchingSeparator) {
  const auto g = fixture("fig7_tree");
  const auto t = block_tree(g);
  std::vector<std::string> branching;
  for (std::size_t s = 0; s < t.separators.size(); ++s) {
    if (t.sep_blocks[s].size() >= 3) branching.push_back(g.vertex(t.separators[s]));
  }
  EXPECT_EQ(branching, std::vector<std::string>{"v"});
}

TEST(BlockTree, ThetaSingleBlock) {
  const auto t = block_tree(fixture("theta"));
  EXPECT_EQ(t.blocks.size(), 1u);
  EXPECT_TRUE(t.separators.empty());
}

TEST(BlockTree, BlockGenusSums) {
  for (const auto* name : {"dumbbell", "fig3_chain", "fig5", "fig7_tree", "fig10", "fig11", "k4"}) {
    const auto g = fixture(name);
    const auto t = block_tree(g);
    long total = 0;
    for (const auto& b : t.blocks) {
      total += static_cast<long>(b.edges.size()) - static_cast<long>(b.vertices.size()) + 1;
    }
    EXPECT_EQ(total, g.genus()) << name;
    EXPECT_TRUE(t.is_tree()) << name;
  }
}

TEST(EdgeCuts, Examples) {
  const auto one = edge_cuts(fixture("dumbbell"), 1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].edges, std::vector<std::string>{"bridge"});
  EXPECT_TRUE(edge_cuts(fixture("theta"), 2).empty());
  const auto fig10 = edge_cuts(contract_bridges(fixture("fig10")), 2);
  const auto gamma = std::vector<std::string>{"g_long", "g_short"};
  EXPECT_TRUE(std::any_of(fig10.begin(), fig10.end(), [&](const EdgeCut& c) { return c.edges == gamma; }));
}

// every k-subset is checked by plain connectivity, against the library's list
TEST(EdgeCuts, MatchBruteForce) {
  for (const auto* name : {"k4", "fig11", "dumbbell", "theta", "fig1_prism"}) {
    const auto g = canonical_model(fixture(name)).graph;
    for (std::size_t k = 1; k <= 4; ++k) {
      std::vector<std::vector<std::string>> expected;
      for (const auto& s : subsets(g.edge_count(), k)) {
        if (connected_without(g, s)) continue;
        bool minimal = true;
        for (std::size_t drop = 0; drop < s.size() && minimal; ++drop) {
          auto smaller = s;
          smaller.erase(smaller.begin() + static_cast<long>(drop));
          minimal = connected_without(g, smaller);
        }
        if (!minimal) continue;
        std::vector<std::string> ids;
        for (auto e : s) ids.push_back(g.edge(e).id);
        std::sort(ids.begin(), ids.end());
        expected.push_back(ids);
      }
      std::vector<std::vector<std::string>> got;
      for (const auto& c : edge_cuts(g, k)) got.push_back(c.edges);
      std::sort(expected.begin(), expected.end());
      std::sort(got.begin(), got.end());
      EXPECT_EQ(got, expected) << name << " k=" << k;
    }
  }
}

TEST(EdgeCuts, TrivialFlag) {
  const auto cuts = edge_cuts(fixture("k4"), 3);
  ASSERT_EQ(cuts.size(), 4u);
  for (const auto& c : cuts) EXPECT_TRUE(c.trivial);
  const auto four = edge_cuts(fixture("k4"), 4);
  ASSERT_EQ(four.size(), 3u);
  for (const auto& c : four) EXPECT_FALSE(c.trivial);
}

TEST(EdgeCuts, OneCutsAreBridges) {
  for (const auto* name : {"dumbbell", "fig3_chain", "fig8_tree"}) {
    const auto g = fixture(name);
    const auto bridges = find_bridges(g);
    EXPECT_EQ(edge_cuts(g, 1).size(), static_cast<std::size_t>(std::count(bridges.begin(), bridges.end(), true)));
  }
}

TEST(Cycles, FundamentalCyclesAvoidOtherChords) {
  const auto g = fixture("k4");
  const auto tree = spanning_tree(g);
  std::vector<std::size_t> chords;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    if (!tree[e]) chords.push_back(e);
  }
  ASSERT_EQ(chords.size(), 3u);
  for (auto c : chords) {
    const auto cyc = fundamental_cycle(g, tree, c);
    for (auto o : chords) {
      EXPECT_EQ(std::count(cyc.begin(), cyc.end(), o), o == c ? 1 : 0);
    }
  }
  EXPECT_EQ(simple_cycles(g).size(), 7u);
}

TEST(Dot, OneNodePerCanonicalVertex) {
  const auto dot = to_dot(canonical_model(fixture("theta_subdivided")).graph);
  EXPECT_NE(dot.find("\"v1\" -- \"v2\""), std::string::npos);
  EXPECT_EQ(dot.find("\"m\";"), std::string::npos);
}

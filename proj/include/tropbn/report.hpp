#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "tropbn/brill_noether.hpp"
#include "tropbn/classify.hpp"
#include "tropbn/divisor.hpp"
#include "tropbn/graph_io.hpp"
#include "tropbn/lattice.hpp"

// JSON documents produced by the command-line front end.

namespace tropbn {

inline json edge_ids(const MetricGraph& g, const std::vector<std::size_t>& edges) {
  json out = json::array();
  for (auto e : edges) out.push_back(g.edge(e).id);
  return out;
}

inline json nodes_to_json(const LatticeModel& m, const std::vector<std::size_t>& nodes) {
  return to_json(m, divisor_of_nodes(m, nodes));
}

inline json to_json(const MartensCertificate& c) {
  json out{{"kind", c.kind == MartensCertificate::Kind::Chain ? "chain" : "tree"}, {"r", c.r}, {"k", c.k}};
  if (c.kind == MartensCertificate::Kind::Chain) {
    out["indices"] = c.indices;
    return out;
  }
  out["paths"] = json::array();
  for (const auto& p : c.paths) {
    json path{{"from", p.from}, {"to", p.to}, {"genus", p.genus}, {"m", p.m}, {"label", to_string(p.kind)}};
    if (p.kind == PathKind::P2) path["rank"] = p.rank;
    if (p.kind == PathKind::P3) {
      path["attach"] = p.attach;
      path["added_genus"] = p.rank;
    }
    if (!p.indices.empty()) path["indices"] = p.indices;
    out["paths"].push_back(std::move(path));
  }
  return out;
}

inline json to_json(const HyperellipticResult& h) {
  json witness = json::array();
  for (const auto& p : h.witness) witness.push_back(point_to_json(p));
  return {{"hyperelliptic", h.hyperelliptic}, {"method", h.method}, {"witness", witness}, {"resolutions", h.resolutions}};
}

inline json classify_report(const MetricGraph& g, std::int64_t resolution) {
  json out;
  out["genus"] = g.genus();
  const auto s = cycle_structure(g);
  out["tree_of_cycles"] = s.tree_of_cycles;
  if (!s.tree_of_cycles) out["reason"] = s.reason;
  const auto chain = try_chain_profile(g);
  out["chain"] = chain.has_value();
  json m = json::array();
  if (chain) {
    for (const auto& c : chain->cycles) m.push_back(c.m);
  } else if (s.tree_of_cycles) {
    for (const auto& c : tree_cycles(s)) m.push_back(c.m);
  }
  out["m"] = m;
  const auto hyp = is_hyperelliptic(g, resolution);
  out["hyperelliptic"] = hyp.hyperelliptic;
  out["martens_special"] = nullptr;
  if (chain) {
    if (const long r = max_martens_rank(chain->flags()); r > 0) {
      out["martens_special"] = to_json(*is_martens_special_chain(g, r));
    }
  } else if (s.tree_of_cycles) {
    if (auto cert = is_martens_special_tree(g)) out["martens_special"] = to_json(*cert);
  }
  return out;
}

inline json to_json(const BNResult& b) {
  json out{{"w", b.w}, {"bound", b.bound}, {"equality", b.w == b.bound},
           {"status", b.stable ? "stable" : "unstable"}};
  out["resolution"] = b.final_level().resolution;
  json levels = json::array();
  for (const auto& l : b.levels) levels.push_back({{"resolution", l.resolution}, {"w", l.w}, {"classes", l.classes}});
  out["levels"] = levels;
  const auto& last = b.final_level();
  LatticeModel m(b.model, last.resolution);
  if (!last.certificate.empty()) out["certificate_E"] = nodes_to_json(m, last.certificate);
  if (b.w >= 0) {
    out["completion"] = {{"E", nodes_to_json(m, last.sample_e)}, {"points", nodes_to_json(m, last.sample_p)}};
  }
  return out;
}

inline json to_json(const MartensGap& g) {
  return {{"bound", g.bound},       {"w", g.w},
          {"equality", g.equality}, {"hyperelliptic", g.hyperelliptic},
          {"status", g.stable ? "stable" : "unstable"}, {"regime", g.regime}};
}

inline json to_json(const WitnessDivisor& w) {
  const auto& m = w.model;
  json out;
  out["case"] = to_string(w.cycle.kind);
  out["gamma"] = edge_ids(m, w.cycle.gamma);
  out["gamma_prime"] = w.cycle.gamma1.empty() ? json(nullptr) : edge_ids(m, w.cycle.gamma1);
  out["gamma_second"] = w.cycle.gamma2.empty() ? json(nullptr) : edge_ids(m, w.cycle.gamma2);
  out["cut"] = edge_ids(m, w.cycle.cut);
  if (w.cycle.kind == WitnessCase::NH2) out["k0"] = w.cycle.k0;
  out["resolution"] = w.resolution;
  out["private_edges"] = edge_ids(m, w.private_edges);
  json chips = json::array();
  for (const auto& p : w.points) chips.push_back({{"at", point_to_json(p)}, {"mult", 1}});
  out["divisor"] = {{"chips", chips}};
  out["generic"] = witness_is_generic(w);
  out["model"] = to_json(m);
  return out;
}

}  // namespace tropbn

#include <CLI11.hpp>

#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "tropbn/acceptance.hpp"
#include "tropbn/tropbn.hpp"

using namespace tropbn;

namespace {

enum Exit { Ok = 0, Usage = 2, FileError = 3, UnstableExit = 4 };

int exit_for(ErrorCode code) {
  if (is_input_error(code)) return FileError;
  return code == ErrorCode::Unstable ? UnstableExit : Usage;
}

void emit(const json& doc, bool table) {
  if (!table) {
    std::cout << doc.dump(2) << "\n";
    return;
  }
  for (const auto& [key, value] : doc.items()) {
    std::cout << key << "\t" << (value.is_string() ? value.get<std::string>() : value.dump()) << "\n";
  }
}

MetricPoint parse_point(const std::string& text) {
  const auto at = text.find('@');
  if (at == std::string::npos) return MetricPoint::at_vertex(text);
  return MetricPoint::on_edge(text.substr(0, at), parse_rational(text.substr(at + 1)));
}

/// Coarsest valid resolution that also carries every chip offset of `docs`.
std::int64_t pick_resolution(const MetricGraph& g, std::int64_t requested, const std::vector<json>& docs) {
  if (requested > 0) return requested;
  std::int64_t n = default_resolution(g);
  for (const auto& doc : docs) {
    if (!doc.is_object() || !doc.contains("chips")) continue;
    for (const auto& chip : doc["chips"]) {
      if (!chip.contains("at") || !chip["at"].contains("offset")) continue;
      const auto t = parse_rational(chip["at"]["offset"].get<std::string>());
      n = std::lcm(n, t.denominator());
    }
  }
  return n;
}

RankMode parse_mode(const std::string& s) { return s == "full" ? RankMode::Full : RankMode::VertexFast; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Divisors, ranks and Brill-Noether loci on metric graphs"};
  app.require_subcommand(1);
  bool table = false;
  app.add_flag("--table", table, "print top-level fields as tab-separated lines");

  std::string graph_path, divisor_path, divisor2_path, at, mode = "fast", rank_mode = "full", fixtures = TROPBN_FIXTURE_DIR;
  std::int64_t resolution = 0;
  long d = 0, r = 0;
  int max_escalations = 2;
  unsigned jobs = 1;
  bool cycle = false;
  std::vector<std::string> only;

  auto* genus_cmd = app.add_subcommand("genus", "first Betti number");
  auto* canonical_cmd = app.add_subcommand("canonical", "canonical model and canonical divisor");
  auto* contract_cmd = app.add_subcommand("contract", "contract every bridge");
  auto* rank_cmd = app.add_subcommand("rank", "Baker-Norine rank of a divisor");
  auto* reduce_cmd = app.add_subcommand("reduce", "q-reduced or cycle-reduced representative");
  auto* equiv_cmd = app.add_subcommand("equiv", "linear equivalence of two divisors");
  auto* classify_cmd = app.add_subcommand("classify", "chain / tree of cycles report");
  auto* hyp_cmd = app.add_subcommand("hyperelliptic", "search for a degree 2 rank 1 class");
  auto* martens_cmd = app.add_subcommand("martens", "compare w with d-2r");
  auto* bn_cmd = app.add_subcommand("bnrank", "lattice Brill-Noether rank");
  auto* witness_cmd = app.add_subcommand("witness", "generic divisor without completion");
  auto* verify_cmd = app.add_subcommand("verify", "run the fixture check suite");
  auto* dot_cmd = app.add_subcommand("export-dot", "Graphviz export");

  for (auto* cmd : {genus_cmd, canonical_cmd, contract_cmd, rank_cmd, reduce_cmd, equiv_cmd, classify_cmd, hyp_cmd,
                    martens_cmd, bn_cmd, witness_cmd, dot_cmd}) {
    cmd->add_option("graph", graph_path, "graph JSON file")->required();
  }
  for (auto* cmd : {canonical_cmd, rank_cmd, reduce_cmd, equiv_cmd, classify_cmd, hyp_cmd, martens_cmd, bn_cmd,
                    witness_cmd}) {
    cmd->add_option("--resolution,-N", resolution, "lattice steps per unit length")->check(CLI::PositiveNumber);
  }
  for (auto* cmd : {rank_cmd, reduce_cmd, equiv_cmd}) {
    cmd->add_option("divisor", divisor_path, "divisor JSON file")->required();
  }
  equiv_cmd->add_option("other", divisor2_path, "second divisor JSON file")->required();
  rank_cmd->add_option("--mode", rank_mode, "full (default) or fast")->check(CLI::IsMember({"full", "fast"}));
  reduce_cmd->add_option("--at", at, "base point: vertex id or edge@offset");
  reduce_cmd->add_flag("--cycle", cycle, "cycle-reduce on a tree of cycles instead");
  for (auto* cmd : {martens_cmd, bn_cmd}) {
    cmd->add_option("--d", d, "degree")->required();
    cmd->add_option("--r", r, "rank")->required();
    cmd->add_option("--mode", mode, "full or fast")->check(CLI::IsMember({"full", "fast"}));
    cmd->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  }
  for (auto* cmd : {hyp_cmd, martens_cmd, bn_cmd}) {
    cmd->add_option("--max-escalations", max_escalations, "resolution doublings")->check(CLI::NonNegativeNumber);
  }
  witness_cmd->add_option("--d", d, "degree")->required();
  verify_cmd->add_option("--fixtures", fixtures, "fixture directory");
  verify_cmd->add_option("--only", only, "run only these families")
      ->check(CLI::IsMember(acceptance::families()));
  verify_cmd->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? Ok : Usage;
  }

  try {
    if (verify_cmd->parsed()) {
      acceptance::Context ctx;
      ctx.fixture_dir = fixtures;
      ctx.jobs = jobs;
      const auto rows = acceptance::run(ctx, only);
      acceptance::print(std::cout, rows);
      return acceptance::all_pass(rows) ? Ok : 1;
    }

    const auto g = load_graph(graph_path);

    if (genus_cmd->parsed()) {
      emit({{"genus", g.genus()}}, table);
    } else if (canonical_cmd->parsed()) {
      const auto cm = canonical_model(g);
      LatticeModel m(g, pick_resolution(g, resolution, {}));
      emit({{"model", to_json(cm.graph)}, {"non_canonical", cm.non_canonical},
            {"K", to_json(m, canonical_divisor(m))}},
           table);
    } else if (contract_cmd->parsed()) {
      emit(to_json(contract_bridges(g)), table);
    } else if (dot_cmd->parsed()) {
      std::cout << to_dot(canonical_model(g).graph);
    } else if (rank_cmd->parsed()) {
      const auto doc = load_json(divisor_path);
      LatticeModel m(g, pick_resolution(g, resolution, {doc}));
      const auto dv = divisor_from_json(m, doc);
      RankOptions opt;
      opt.mode = parse_mode(rank_mode);
      emit({{"rank", rank(m, dv, opt)}, {"degree", dv.degree()}, {"resolution", m.resolution()}, {"mode", rank_mode}},
           table);
    } else if (reduce_cmd->parsed()) {
      const auto doc = load_json(divisor_path);
      LatticeModel m(g, pick_resolution(g, resolution, {doc}));
      const auto dv = divisor_from_json(m, doc);
      if (cycle) {
        const auto cr = cycle_reduce(m, dv);
        emit({{"divisor", to_json(m, cr.divisor)}, {"script", script_to_json(m, cr.script)},
              {"pushes", cr.pushes}, {"resolution", m.resolution()}},
             table);
      } else {
        const auto q = at.empty() ? m.base_node() : m.node(parse_point(at));
        const auto red = reduce(m, dv, q);
        emit({{"divisor", to_json(m, red.divisor)}, {"script", script_to_json(m, red.script)},
              {"q", to_string(m.point(q))}, {"resolution", m.resolution()}},
             table);
      }
    } else if (equiv_cmd->parsed()) {
      const auto a = load_json(divisor_path);
      const auto b = load_json(divisor2_path);
      LatticeModel m(g, pick_resolution(g, resolution, {a, b}));
      emit({{"equivalent", is_equivalent(m, divisor_from_json(m, a), divisor_from_json(m, b))},
            {"resolution", m.resolution()}},
           table);
    } else if (classify_cmd->parsed()) {
      emit(classify_report(g, pick_resolution(contract_bridges(g), resolution, {})), table);
    } else if (hyp_cmd->parsed()) {
      const auto h = is_hyperelliptic(g, pick_resolution(contract_bridges(g), resolution, {}), max_escalations);
      emit(to_json(h), table);
    } else if (martens_cmd->parsed() || bn_cmd->parsed()) {
      BNQuery q;
      q.d = d;
      q.r = r;
      q.resolution = resolution;
      q.mode = parse_mode(mode);
      q.max_escalations = max_escalations;
      q.jobs = jobs;
      if (martens_cmd->parsed()) {
        const auto gap = martens_gap(g, q);
        emit(to_json(gap), table);
        return gap.stable ? Ok : UnstableExit;
      }
      const auto b = bn_rank_lattice(g, q);
      emit(to_json(b), table);
      return b.stable ? Ok : UnstableExit;
    } else if (witness_cmd->parsed()) {
      const auto model = contract_bridges(g);
      const auto w = resolution > 0 ? generic_witness_divisor(g, d, resolution)
                                    : generic_witness_divisor_escalating(g, d, default_resolution(model));
      emit(to_json(w), table);
    }
    return Ok;
  } catch (const Error& err) {
    std::cout << json{{"error", std::string(to_string(err.code()))}, {"message", err.what()}}.dump(2) << "\n";
    std::cerr << err.what() << "\n";
    return exit_for(err.code());
  } catch (const std::exception& err) {
    std::cerr << "internal error: " << err.what() << "\n";
    return 1;
  }
}

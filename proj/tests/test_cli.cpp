#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
  int exit = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(TROPBN_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.exit = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string fx(const std::string& name) { return std::string(TROPBN_FIXTURE_DIR) + "/" + name + ".json"; }

nlohmann::json parse(const Run& r) { return nlohmann::json::parse(r.out); }

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("tropbn-cli-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST(Cli, Genus) {
  const auto r = run("genus " + fx("theta"));
  ASSERT_EQ(r.exit, 0);
  EXPECT_EQ(parse(r)["genus"], 2);
  const auto t = run("--table genus " + fx("fig3_chain"));
  EXPECT_EQ(t.out, "genus\t5\n");
}

TEST(Cli, BnrankFigure3) {
  const auto r = run("bnrank " + fx("fig3_chain") + " --d 4 --r 1");
  ASSERT_EQ(r.exit, 0);
  const auto j = parse(r);
  EXPECT_EQ(j["w"], 2);
  EXPECT_EQ(j["bound"], 2);
  EXPECT_EQ(j["equality"], true);
  EXPECT_EQ(j["status"], "stable");
  EXPECT_TRUE(j.contains("certificate_E"));
  EXPECT_TRUE(j.contains("completion"));
}

TEST(Cli, MartensFigure3) {
  const auto r = run("martens " + fx("fig3_chain") + " --d 3 --r 1");
  ASSERT_EQ(r.exit, 0);
  const auto j = parse(r);
  EXPECT_EQ(j["equality"], false);
  EXPECT_EQ(j["regime"], "d<=g-3+r");
}

TEST(Cli, ClassifyFigure7) {
  const auto r = run("classify " + fx("fig7_tree"));
  ASSERT_EQ(r.exit, 0);
  const auto j = parse(r);
  EXPECT_EQ(j["tree_of_cycles"], true);
  EXPECT_EQ(j["chain"], false);
  EXPECT_EQ(j["hyperelliptic"], false);
  EXPECT_EQ(j["martens_special"]["r"], 1);
  EXPECT_EQ(j["martens_special"]["k"], 3);
  for (const auto& p : j["martens_special"]["paths"]) EXPECT_EQ(p["label"], "P3");
}

TEST(Cli, ClassifyChainAndNonTree) {
  const auto c = parse(run("classify " + fx("fig3_chain")));
  EXPECT_EQ(c["m"], nlohmann::json::parse("[0,2,3,2,0]"));
  EXPECT_EQ(c["martens_special"]["indices"], nlohmann::json::parse("[3]"));
  const auto f = parse(run("classify " + fx("fig5")));
  EXPECT_EQ(f["tree_of_cycles"], false);
  EXPECT_TRUE(f.contains("reason"));
}

TEST(Cli, RankAndReduce) {
  const auto dir = scratch("rank");
  write(dir / "d.json", R"({"chips":[{"at":{"vertex":"v1"},"mult":1},{"at":{"vertex":"v2"},"mult":1}]})");
  write(dir / "e.json", R"({"chips":[{"at":{"edge":"e1","offset":"1/2"},"mult":2}]})");
  const auto r = parse(run("rank " + fx("theta") + " " + (dir / "d.json").string()));
  EXPECT_EQ(r["rank"], 1);
  EXPECT_EQ(r["mode"], "full");
  EXPECT_EQ(r["degree"], 2);
  const auto red = parse(run("reduce " + fx("theta") + " " + (dir / "e.json").string() + " --at v1"));
  EXPECT_EQ(red["q"], "v1");
  EXPECT_TRUE(red.contains("script"));
  const auto eq = parse(run("equiv " + fx("theta") + " " + (dir / "d.json").string() + " " + (dir / "e.json").string()));
  EXPECT_EQ(eq["equivalent"], true);
  fs::remove_all(dir);
}

TEST(Cli, WitnessFigure10) {
  const auto r = run("witness " + fx("fig10") + " --d 5");
  ASSERT_EQ(r.exit, 0);
  const auto j = parse(r);
  EXPECT_EQ(j["case"], "NH1a");
  EXPECT_EQ(j["generic"], true);
  EXPECT_EQ(j["divisor"]["chips"].size(), 4u);
}

TEST(Cli, ContractAndDot) {
  const auto c = parse(run("contract " + fx("dumbbell")));
  EXPECT_EQ(c["vertices"].size(), 1u);
  const auto dot = run("export-dot " + fx("theta_subdivided"));
  EXPECT_EQ(dot.exit, 0);
  EXPECT_EQ(dot.out.rfind("graph G {", 0), 0u);
  EXPECT_EQ(dot.out.find("\"m\""), std::string::npos);
}

TEST(Cli, DeterministicOutput) {
  const auto a = run("bnrank " + fx("fig3_chain") + " --d 3 --r 1");
  const auto b = run("bnrank " + fx("fig3_chain") + " --d 3 --r 1 --jobs 2");
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(run("classify " + fx("fig8_tree")).out, run("classify " + fx("fig8_tree")).out);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("").exit, 2);
  EXPECT_EQ(run("bnrank " + fx("fig3_chain") + " --r 1").exit, 2);
  EXPECT_EQ(run("nosuchcommand").exit, 2);
  EXPECT_EQ(run("bnrank " + fx("fig3_chain") + " --d 4 --r 1 --mode slow").exit, 2);
  EXPECT_EQ(run("verify --only nosuchfamily").exit, 2);
  const auto pre = run("martens " + fx("fig3_chain") + " --d 9 --r 1");
  EXPECT_EQ(pre.exit, 2);
  EXPECT_EQ(parse(pre)["error"], "PreconditionViolation");
}

TEST(Cli, InputErrorsExitThree) {
  const auto missing = run("genus /nonexistent/graph.json");
  EXPECT_EQ(missing.exit, 3);
  EXPECT_EQ(parse(missing)["error"], "IoError");
  const auto dir = scratch("bad");
  write(dir / "leaf.json", R"({"vertices":["a","b"],"edges":[{"id":"x","ends":["a","a"],"length":"1"},
    {"id":"y","ends":["a","b"],"length":"1"}]})");
  EXPECT_EQ(run("genus " + (dir / "leaf.json").string()).exit, 3);
  write(dir / "junk.json", "{");
  EXPECT_EQ(parse(run("genus " + (dir / "junk.json").string()))["error"], "ParseError");
  fs::remove_all(dir);
}

TEST(Cli, VerifySingleFamily) {
  const auto r = run("verify --only canonical");
  ASSERT_EQ(r.exit, 0);
  std::istringstream lines(r.out);
  std::string line;
  int rows = 0;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    ++rows;
    EXPECT_EQ(line.rfind("PASS", 0), 0u);
    EXPECT_NE(line.find("canonical"), std::string::npos);
  }
  EXPECT_EQ(rows, 1);
}

TEST(Cli, VerifyCorruptedFixtureExitsThree) {
  const auto dir = scratch("fixtures");
  for (const auto& entry : fs::directory_iterator(TROPBN_FIXTURE_DIR)) {
    fs::copy_file(entry.path(), dir / entry.path().filename());
  }
  EXPECT_EQ(run("verify --fixtures " + dir.string() + " --only trees").exit, 0);
  write(dir / "fig7_tree.json", R"({"vertices":["a"],"edges":[{"id":"l","ends":["a","q"],"length":"1"}]})");
  EXPECT_EQ(run("verify --fixtures " + dir.string() + " --only trees").exit, 3);
  fs::remove_all(dir);
  EXPECT_EQ(run("verify --fixtures " + dir.string() + " --only trees").exit, 3);
}

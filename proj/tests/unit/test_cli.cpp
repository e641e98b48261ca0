#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "signcop/graph.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome run(const std::string& args) {
  const std::string cmd = std::string(SIGNCOP_CLI_PATH) + " " + args + " 2>/dev/null";
  Outcome o;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return o;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) o.out.append(buf, n);
  const int status = pclose(p);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("signcop_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, SynthIsByteIdenticalAndReloadable) {
  ASSERT_EQ(run("synth --seed 4 --out " + path("a.txt")).code, 0);
  ASSERT_EQ(run("synth --seed 4 --out " + path("b.txt")).code, 0);
  EXPECT_EQ(slurp(path("a.txt")), slurp(path("b.txt")));
  const signcop::SignedGraph g = signcop::load_edge_list(path("a.txt"));
  EXPECT_EQ(g, signcop::generate_two_community(20, signcop::kDefaultPIntra,
                                               signcop::kDefaultPInter, 4));
  EXPECT_EQ(g.node_count, 40u);

  const Outcome stdout_run = run("synth --seed 4");
  EXPECT_EQ(stdout_run.code, 0);
  EXPECT_EQ(stdout_run.out, slurp(path("a.txt")));

  const json summary = json::parse(run("synth --seed 4 --n-per-group 5 --out " + path("c.txt")).out);
  EXPECT_EQ(summary["node_count"], 10);
  EXPECT_EQ(summary["command"], "synth");
}

TEST_F(Cli, TrainEvalEmitsJsonWithConfigEcho) {
  ASSERT_EQ(run("synth --out " + path("g.txt")).code, 0);
  const std::string args = "train-eval --data " + path("g.txt") +
                           " --repeats 1 --set d=16 --set max_epochs=100 --seed 3";
  const Outcome a = run(args), b = run(args + " --out " + path("r.json"));
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(b.code, 0);
  EXPECT_TRUE(b.out.empty());
  json ja = json::parse(a.out), jb = json::parse(slurp(path("r.json")));
  EXPECT_EQ(ja["command"], "train-eval");
  EXPECT_EQ(ja["config"]["d"], 16);
  EXPECT_EQ(ja["config"]["seed"], 3);
  EXPECT_EQ(ja["config"]["repeats"], 1);
  EXPECT_EQ(ja["config"]["eta"], 0.01);
  ASSERT_EQ(ja["result"]["runs"].size(), 1u);
  for (auto* j : {&ja, &jb}) {
    (*j)["result"].erase("total_seconds");
    for (auto& r : (*j)["result"]["runs"]) {
      r.erase("train_seconds");
      r.erase("infer_seconds");
    }
  }
  EXPECT_EQ(ja, jb);
  EXPECT_EQ(ja["result"]["mean_auc"], 1.0);
}

TEST_F(Cli, FlagsOverrideConfigFile) {
  ASSERT_EQ(run("synth --out " + path("g.txt")).code, 0);
  {
    std::ofstream cfg(path("run.cfg"));
    cfg << "eta = 0.02\nd = 8\nmax_epochs = 5\nrepeats = 4\n";
  }
  const Outcome o = run("train-eval --data " + path("g.txt") + " --config " + path("run.cfg") +
                        " --repeats 1 --set eta=0.03 --identity-correlation --inference-mode sample");
  ASSERT_EQ(o.code, 0);
  const json j = json::parse(o.out);
  EXPECT_EQ(j["config"]["eta"], 0.03);
  EXPECT_EQ(j["config"]["d"], 8);
  EXPECT_EQ(j["config"]["repeats"], 1);
  EXPECT_EQ(j["config"]["identity_correlation"], true);
  EXPECT_EQ(j["config"]["inference_mode"], "sample");
}

TEST_F(Cli, PredictionDump) {
  ASSERT_EQ(run("synth --out " + path("g.txt")).code, 0);
  ASSERT_EQ(run("train-eval --data " + path("g.txt") +
                " --repeats 1 --set d=8 --set max_epochs=20 --predictions " + path("p.txt"))
                .code,
            0);
  std::istringstream in(slurp(path("p.txt")));
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    unsigned src, dst;
    double score;
    int label;
    ASSERT_TRUE(ls >> src >> dst >> score >> label) << line;
    EXPECT_EQ(label, score >= 0.5 ? 1 : -1);
    ++rows;
  }
  EXPECT_GT(rows, 0u);
}

TEST_F(Cli, SweepRowsAndEmptyList) {
  const Outcome empty = run("sweep --param eta --values ''");
  ASSERT_EQ(empty.code, 0);
  const json je = json::parse(empty.out);
  EXPECT_TRUE(je["rows"].is_array());
  EXPECT_TRUE(je["rows"].empty());

  ASSERT_EQ(run("synth --out " + path("g.txt")).code, 0);
  const Outcome o = run("sweep --param epsilon --values 0.02,0.04 --repeats 1 --set d=8 "
                        "--set max_epochs=20 --data " + path("g.txt"));
  ASSERT_EQ(o.code, 0);
  const json j = json::parse(o.out);
  ASSERT_EQ(j["rows"].size(), 2u);
  EXPECT_EQ(j["rows"][1]["value"], 0.04);
  EXPECT_EQ(j["param"], "epsilon");

  EXPECT_EQ(run("sweep --param d --values 2.5 --data " + path("g.txt")).code, 1);
  EXPECT_EQ(run("sweep --param eta --values 0.7 --data " + path("g.txt")).code, 1);
  EXPECT_NE(run("sweep --param bogus --values 1").code, 0);
}

TEST_F(Cli, IdealCorrReportsObjective) {
  ASSERT_EQ(run("synth --n-per-group 8 --out " + path("g.txt")).code, 0);
  const Outcome o = run("ideal-corr --data " + path("g.txt") +
                        " --d 16 --repeats 1 --set max_epochs=50 --set ideal_steps=50");
  ASSERT_EQ(o.code, 0);
  const json j = json::parse(o.out);
  EXPECT_EQ(j["fit"]["d"], 16);
  EXPECT_LT(j["fit"]["final_objective"].get<double>(), j["fit"]["initial_objective"].get<double>());
}

TEST_F(Cli, SingleEdgeIdealCorrIsACleanError) {
  {
    std::ofstream g(path("one.txt"));
    g << "0 1 1\n";
  }
  const Outcome o = run("ideal-corr --data " + path("one.txt"));
  EXPECT_EQ(o.code, 1);
  EXPECT_TRUE(o.out.empty());
}

TEST_F(Cli, GradcheckPassesAndMutationFails) {
  const Outcome ok = run("gradcheck --set gradcheck_instances=5");
  ASSERT_EQ(ok.code, 0);
  const json j = json::parse(ok.out);
  EXPECT_EQ(j["passed"], true);
  EXPECT_LT(j["max_rel_error"].get<double>(), 1e-4);
  EXPECT_FALSE(j["worst_coordinate"].get<std::string>().empty());

  const Outcome bad = run("gradcheck --mutate --set gradcheck_instances=5");
  EXPECT_EQ(bad.code, 3);
  EXPECT_EQ(json::parse(bad.out)["passed"], false);
}

TEST_F(Cli, ErrorsExitNonzeroWithoutJson) {
  for (const std::string args :
       {"", "train-eval", "train-eval --data /nonexistent/graph.txt",
        "train-eval --data x --set nokey=1", "synth --set eta=0.9", "synth --inference-mode best",
        "frobnicate"}) {
    const Outcome o = run(args);
    EXPECT_NE(o.code, 0) << args;
    EXPECT_EQ(o.out.find('{'), std::string::npos) << args;
  }
  {
    std::ofstream g(path("bad.txt"));
    g << "0 1 2\n";
  }
  EXPECT_EQ(run("train-eval --data " + path("bad.txt")).code, 1);
}

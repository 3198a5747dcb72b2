// Exercises the fixnet executable as a separate process.

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("fixnet-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  int exec(const std::string& args, const std::string& env = "") {
    const std::string cmd = "cd " + dir_.string() + " && " + env + " " + FIXNET_CLI_PATH + " " + args + " > " +
                            (dir_ / "stdout.txt").string() + " 2> " + (dir_ / "stderr.txt").string();
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  }

  std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  std::string config(const std::string& scenario, const std::string& extra = "") {
    return R"({"scenario": )" + scenario + R"(, "max_iters": 2000, "out": "out")" + extra + "}";
  }

  fs::path dir_;
};

const std::string kFeas = R"({"preset": "feasibility-2halfspace"})";

TEST_F(Cli, RunSucceedsAndWritesFiles) {
  const auto cfg = write("c.json", config(kFeas));
  ASSERT_EQ(exec("run --quiet --config " + cfg.string()), 0) << slurp(dir_ / "stderr.txt");
  EXPECT_TRUE(fs::exists(dir_ / "out" / "trace.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "out" / "summary.json"));
  EXPECT_EQ(slurp(dir_ / "stdout.txt"), "");
}

TEST_F(Cli, MalformedConfigIsExit2) {
  const auto cfg = write("c.json", "{ not json");
  EXPECT_EQ(exec("run --config " + cfg.string()), 2);
  const auto typo = write("t.json", config(kFeas, R"(, "max_iter": 5)"));
  EXPECT_EQ(exec("run --config " + typo.string()), 2);
}

TEST_F(Cli, MissingConfigAndUnknownVerbAreExit2) {
  EXPECT_EQ(exec("run"), 2);
  EXPECT_EQ(exec("run --config " + (dir_ / "absent.json").string()), 2);
  EXPECT_EQ(exec("launch"), 2);
  EXPECT_EQ(exec("suite nonsense --out " + dir_.string()), 2);
}

TEST_F(Cli, BadRelaxationIsExit3) {
  const auto cfg = write("c.json", config(
      R"({"preset": "feasibility-2halfspace", "overrides": {"relaxation": {"floor": 0.6, "value": 0.6}}})"));
  EXPECT_EQ(exec("run --config " + cfg.string()), 3);
  EXPECT_NE(slurp(dir_ / "stderr.txt").find("(0, 1/2]"), std::string::npos) << slurp(dir_ / "stderr.txt");
}

TEST_F(Cli, KmWithTwoAgentsIsExit3) {
  const auto cfg = write("c.json", config(kFeas, R"(, "engine": "km")"));
  EXPECT_EQ(exec("run --config " + cfg.string()), 3);
}

TEST_F(Cli, DisconnectedVerifyIsExit3) {
  const auto cfg = write("c.json", config(
      R"({"preset": "feasibility-2halfspace", "overrides": {"graph": {"type": "static", "matrices": null, "window": null, "matrix": [[1, 0], [0, 1]]}}})"));
  EXPECT_EQ(exec("verify --config " + cfg.string()), 3);
  EXPECT_NE(slurp(dir_ / "stdout.txt").find("k=0"), std::string::npos) << slurp(dir_ / "stdout.txt");
}

TEST_F(Cli, DivergenceIsExit4) {
  const auto cfg = write("c.json", config(
      R"({"name": "far", "dimension": 1, "operators": [{"type": "identity"}],
          "graph": {"type": "complete"}, "relaxation": {"floor": 0.5, "value": 0.5},
          "errors": {"kind": "zero"}, "initial": {"points": [[1e13]]}})",
      R"(, "engine": "km")"));
  EXPECT_EQ(exec("run --config " + cfg.string()), 4) << slurp(dir_ / "stderr.txt");
}

TEST_F(Cli, SeedFlagBeatsEnvironment) {
  const std::string lin = R"({"preset": "linear-3x3"})";
  const auto cfg = write("c.json", config(lin, R"(, "seed": 1)"));
  const auto summary_seed = [&] {
    const auto s = slurp(dir_ / "out" / "summary.json");
    const auto pos = s.find("\"seed\"");
    return s.substr(pos, s.find_first_of(",}\n", pos) - pos);
  };
  ASSERT_EQ(exec("run --quiet --config " + cfg.string()), 0);
  EXPECT_EQ(summary_seed(), "\"seed\": 1");
  ASSERT_EQ(exec("run --quiet --config " + cfg.string(), "FIXNET_SEED=8"), 0);
  EXPECT_EQ(summary_seed(), "\"seed\": 8");
  ASSERT_EQ(exec("run --quiet --seed 9 --config " + cfg.string(), "FIXNET_SEED=8"), 0);
  EXPECT_EQ(summary_seed(), "\"seed\": 9");
}

TEST_F(Cli, FlagsOverrideConfig) {
  const auto cfg = write("c.json", config(kFeas));
  ASSERT_EQ(exec("run --quiet --iters 7 --tol 0 --repeats 2 --out o2 --config " + cfg.string()), 0);
  EXPECT_TRUE(fs::exists(dir_ / "o2" / "trace-1.csv"));
  std::ifstream in(dir_ / "o2" / "trace.csv");
  std::size_t lines = 0;
  for (std::string l; std::getline(in, l);) ++lines;
  EXPECT_EQ(lines, 2u + 8u);
}

TEST_F(Cli, ExportGraph) {
  const auto cfg = write("c.json", config(kFeas));
  ASSERT_EQ(exec("export-graph --quiet --iters 4 --config " + cfg.string()), 0);
  std::ifstream in(dir_ / "out" / "graph.txt");
  std::size_t lines = 0;
  for (std::string l; std::getline(in, l);) ++lines;
  EXPECT_EQ(lines, 1u + 5u);
}

}  // namespace

#include "fixnet/app.hpp"
#include "fixnet/error.hpp"
#include "fixnet/io.hpp"
#include "fixnet/trace.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

namespace fixnet {
namespace {

namespace fs = std::filesystem;

class AppTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("fixnet-app-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  RunConfig config(const std::string& preset, Json overrides = Json::object()) {
    Json doc = {{"scenario", {{"preset", preset}, {"overrides", overrides}}},
                {"max_iters", 3000},
                {"out", (dir_ / "out").string()}};
    return parse_run_config(doc);
  }

  int run(const RunConfig& cfg) { return cmd_run(cfg, io_); }

  fs::path dir_;
  std::ostringstream out_, err_;
  Console io_{out_, err_, true};
};

TEST_F(AppTest, RunWritesArtifacts) {
  const auto cfg = config("feasibility-2halfspace");
  ASSERT_EQ(run(cfg), kExitOk) << err_.str();
  for (const char* f : {"trace.csv", "summary.json", "residual_loglog.dat", "consensus.dat", "distance_sq.dat"})
    EXPECT_TRUE(fs::exists(cfg.out / f)) << f;
  std::istringstream in(read_file(cfg.out / "trace.csv"));
  const auto t = read_trace(in);
  EXPECT_EQ(t.stop_reason, "converged");
  const auto summary = Json::parse(read_file(cfg.out / "summary.json"));
  EXPECT_EQ(summary["format"], "fixnet-summary v1");
  EXPECT_EQ(summary["fingerprint"], config_fingerprint(cfg));
}

TEST_F(AppTest, RunIsByteReproducible) {
  auto cfg = config("linear-3x3");
  cfg.repeats = 2;
  ASSERT_EQ(run(cfg), kExitOk);
  const auto a = read_file(cfg.out / "trace.csv"), a1 = read_file(cfg.out / "trace-1.csv");
  const auto s = read_file(cfg.out / "summary.json");
  ASSERT_EQ(run(cfg), kExitOk);
  EXPECT_EQ(read_file(cfg.out / "trace.csv"), a);
  EXPECT_EQ(read_file(cfg.out / "trace-1.csv"), a1);
  EXPECT_EQ(read_file(cfg.out / "summary.json"), s);
  EXPECT_NE(a, a1);
}

TEST_F(AppTest, RelaxationOutsideRangeIsValidationFailure) {
  const auto cfg = config("feasibility-2halfspace", {{"relaxation", {{"floor", 0.7}, {"value", 0.7}}}});
  EXPECT_EQ(run(cfg), kExitValidation);
  EXPECT_NE(err_.str().find("alpha"), std::string::npos) << err_.str();
}

TEST_F(AppTest, KmWithTwoAgentsIsValidationFailure) {
  auto cfg = config("feasibility-2halfspace");
  cfg.engine = EngineKind::km;
  EXPECT_EQ(run(cfg), kExitValidation);
}

TEST_F(AppTest, DibkmWithoutBlocksIsValidationFailure) {
  auto cfg = config("feasibility-2halfspace");
  cfg.engine = EngineKind::dibkm;
  EXPECT_EQ(run(cfg), kExitValidation);
}

TEST_F(AppTest, DibkmRunWritesWeightedDistance) {
  auto cfg = config("feasibility-2halfspace",
                    {{"block_sizes", {1, 1}}, {"blocks", {{"probs", {0.5, 0.75}}}}});
  cfg.engine = EngineKind::dibkm;
  ASSERT_EQ(run(cfg), kExitOk) << err_.str();
  EXPECT_TRUE(fs::exists(cfg.out / "weighted_distance_sq.dat"));
}

TEST_F(AppTest, VerifyReportsHypotheses) {
  ASSERT_EQ(cmd_verify(config("feasibility-2halfspace"), io_), kExitOk) << err_.str();
  const auto rep = verify_scenario(build_scenario(resolve_scenario_spec({{"preset", "feasibility-2halfspace"}}), 0));
  EXPECT_TRUE(rep.assumption1);
  ASSERT_TRUE(rep.condition17.has_value());
  bool saw_a2 = false;
  for (const auto& l : rep.lines)
    if (l.name.find("regularity hypothesis") != std::string::npos) {
      saw_a2 = true;
      EXPECT_EQ(l.status, "pass") << l.detail;
    }
  EXPECT_TRUE(saw_a2);
}

TEST_F(AppTest, VerifyExamplePairFlagsNonRegularSquareMap) {
  const auto rep = verify_scenario(build_scenario(resolve_scenario_spec({{"preset", "example1"}}), 0));
  ASSERT_EQ(rep.linear_kappa.size(), 2u);
  EXPECT_GT(rep.linear_kappa[0], 50.0);
  ASSERT_TRUE(rep.regularity.has_value());
  EXPECT_LE(rep.regularity->nu, 2.0 + 1e-6);
}

TEST_F(AppTest, VerifyDisconnectedGraphFails) {
  const auto cfg = config("feasibility-2halfspace",
                          {{"graph", {{"type", "static"}, {"matrices", nullptr}, {"window", nullptr}, {"matrix", {{1.0, 0.0}, {0.0, 1.0}}}}}});
  EXPECT_EQ(cmd_verify(cfg, io_), kExitValidation);
}

TEST_F(AppTest, ExportGraphRoundTrips) {
  const auto cfg = config("feasibility-2halfspace");
  ASSERT_EQ(cmd_export_graph(cfg, 9, io_), kExitOk);
  std::istringstream in(read_file(cfg.out / "graph.txt"));
  const auto ms = read_matrix_list(in);
  ASSERT_EQ(ms.size(), 10u);
  const auto s = build_scenario(cfg.scenario, cfg.seed);
  for (std::size_t k = 0; k < ms.size(); ++k) EXPECT_EQ(ms[k], s.graph().matrix(k));
}

TEST_F(AppTest, MatrixListGraphReadsExport) {
  auto cfg = config("feasibility-2halfspace");
  ASSERT_EQ(cmd_export_graph(cfg, 3, io_), kExitOk);
  Json doc = {{"scenario",
               {{"preset", "feasibility-2halfspace"},
                {"overrides", {{"graph", {{"type", "matrix_list"}, {"matrices", nullptr}, {"path", "out/graph.txt"}, {"window", 2}}}}}}},
              {"out", "out2"}};
  const auto c2 = parse_run_config(doc, dir_);
  EXPECT_EQ(c2.out, dir_ / "out2");
  const auto s = build_scenario(c2.scenario, 0);
  EXPECT_EQ(s.graph().matrix(5), s.graph().matrix(1));
}

TEST_F(AppTest, UnknownSuiteIsUsageError) {
  EXPECT_EQ(cmd_suite("nonsense", dir_, 0, io_), kExitConfig);
}

TEST_F(AppTest, PropertySuitePasses) {
  EXPECT_EQ(cmd_suite("lemmas", dir_, 0, io_), kExitOk) << out_.str() << err_.str();
  EXPECT_TRUE(fs::exists(dir_ / "suite-lemmas.txt"));
  EXPECT_TRUE(fs::exists(dir_ / "suite-lemmas.json"));
}

TEST(RunConfig, ParsesAndRejects) {
  EXPECT_THROW(parse_run_config({{"scenario", {{"preset", "example1"}}}, {"bogus", 1}}), ConfigError);
  EXPECT_THROW(parse_run_config({{"scenario", {{"preset", "example1"}}}, {"engine", "xyz"}}), ConfigError);
  EXPECT_THROW(parse_run_config({{"scenario", {{"preset", "example1"}}}, {"max_iters", "many"}}), ConfigError);
  EXPECT_THROW(parse_run_config({{"engine", "dikm"}}), ConfigError);
  const auto cfg = parse_run_config({{"scenario", {{"preset", "example1"}}}, {"engine", "km"}, {"repeats", 4}});
  EXPECT_EQ(cfg.engine, EngineKind::km);
  EXPECT_EQ(cfg.repeats, 4u);
  const auto back = parse_run_config(run_config_to_json(cfg));
  EXPECT_EQ(run_config_to_json(back).dump(), run_config_to_json(cfg).dump());
}

TEST(RunConfig, SeedPrecedence) {
  RunConfig cfg = parse_run_config({{"scenario", {{"preset", "example1"}}}, {"seed", 5}});
  apply_overrides(cfg, {}, nullptr);
  EXPECT_EQ(cfg.seed, 5u);
  apply_overrides(cfg, {}, "17");
  EXPECT_EQ(cfg.seed, 17u);
  CliOverrides o;
  o.seed = 99;
  apply_overrides(cfg, o, "17");
  EXPECT_EQ(cfg.seed, 99u);
  EXPECT_THROW(apply_overrides(cfg, {}, "seventeen"), ConfigError);
}

TEST(RunConfig, FingerprintIgnoresOutput) {
  RunConfig a = parse_run_config({{"scenario", {{"preset", "example1"}}}, {"out", "x"}});
  RunConfig b = parse_run_config({{"scenario", {{"preset", "example1"}}}, {"out", "y"}});
  EXPECT_EQ(config_fingerprint(a), config_fingerprint(b));
  b.seed = 3;
  EXPECT_NE(config_fingerprint(a), config_fingerprint(b));
}

}  // namespace
}  // namespace fixnet

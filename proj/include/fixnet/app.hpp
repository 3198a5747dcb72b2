#pragma once

// Batch front end shared by the command-line tool and the acceptance suite.
// Every command returns a process exit status:
//   0 success, 2 configuration error, 3 validation failure, 4 divergence.

#include "fixnet/diagnostics.hpp"
#include "fixnet/engine.hpp"
#include "fixnet/json_fields.hpp"
#include "fixnet/mixing.hpp"
#include "fixnet/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fixnet {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitValidation = 3;
inline constexpr int kExitDivergence = 4;

struct RunConfig {
  Json scenario;  // resolved scenario document
  EngineKind engine = EngineKind::dikm;
  std::size_t max_iters = 1000;
  double stop_tolerance = 1e-8;
  std::size_t repeats = 1;
  std::filesystem::path out = "fixnet-out";
  std::uint64_t seed = 0;
  std::size_t mixing_horizon = 0;
};

/// Parses a run configuration document. Relative paths inside the scenario
/// (graph matrix lists) resolve against `base_dir`.
RunConfig parse_run_config(const Json& doc,
                           const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);
Json run_config_to_json(const RunConfig& cfg);

struct CliOverrides {
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> iters;
  std::optional<double> tol;
  std::optional<std::size_t> repeats;
};

/// Flags win over the FIXNET_SEED value (`env_seed`, may be null), which wins
/// over the config file.
void apply_overrides(RunConfig& cfg, const CliOverrides& o, const char* env_seed);

struct Console {
  std::ostream& out;
  std::ostream& err;
  bool quiet = false;
};

/// Builds and validates the scenario, runs `repeats` repetitions and writes
/// trace.csv (trace-<r>.csv for r >= 1), summary.json and the plot-data
/// files into cfg.out.
int cmd_run(const RunConfig& cfg, const Console& io);

struct HypothesisLine {
  std::string name;
  std::string status;  // "pass", "fail" or "n/a"
  std::string detail;
};

struct VerifyReport {
  ValidationReport validation;
  std::optional<MixingAnalysis> mixing;
  std::optional<RegularityEstimate> regularity;
  std::vector<double> linear_kappa;  // per-operator linear regularity estimate
  std::optional<ConditionReport> condition17;
  std::optional<ConditionReport> condition07;
  std::vector<HypothesisLine> lines;
  bool assumption1 = false;
};

/// Hypothesis checks without running an engine.
VerifyReport verify_scenario(const Scenario& s, std::size_t mixing_horizon = 0);
int cmd_verify(const RunConfig& cfg, const Console& io);

/// Writes A_0..A_{last_k} as a matrix list to cfg.out / "graph.txt".
int cmd_export_graph(const RunConfig& cfg, std::size_t last_k, const Console& io);

/// suite is "acceptance" or "lemmas"; writes suite-<name>.txt and .json.
int cmd_suite(const std::string& suite, const std::filesystem::path& out,
              std::uint64_t seed, const Console& io);

// Plot data: "# fixnet-plot v1 <title>", a column-name line, then
// space-separated rows.
struct PlotData {
  std::string title;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};
std::string format_plot_data(const PlotData& p);
PlotData parse_plot_data(const std::string& text);

/// Fingerprint of a configuration: FNV-1a of its canonical JSON dump.
std::string config_fingerprint(const RunConfig& cfg);

}  // namespace fixnet

// fixnet command-line front end: run, verify, suite, export-graph.

#include "fixnet/app.hpp"
#include "fixnet/error.hpp"
#include "fixnet/numfmt.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> iters;
  std::optional<double> tol;
  std::optional<std::size_t> repeats;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Flags& f, bool need_config) {
  auto* c = cmd->add_option("--config", f.config, "run configuration (JSON)");
  if (need_config) c->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--seed", f.seed, "master seed (overrides FIXNET_SEED)");
  cmd->add_option("--iters", f.iters, "iteration budget");
  cmd->add_option("--tol", f.tol, "stop tolerance");
  cmd->add_option("--repeats", f.repeats, "number of repetitions")->check(CLI::PositiveNumber);
  cmd->add_flag("--quiet", f.quiet, "print errors only");
}

fixnet::RunConfig load(const Flags& f) {
  fixnet::RunConfig cfg = fixnet::load_run_config(f.config);
  fixnet::CliOverrides o;
  if (!f.out.empty()) o.out = f.out;
  o.seed = f.seed;
  o.iters = f.iters;
  o.tol = f.tol;
  o.repeats = f.repeats;
  fixnet::apply_overrides(cfg, o, std::getenv("FIXNET_SEED"));
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fixnet: distributed inexact Krasnoselskii-Mann experiments"};
  app.require_subcommand(1);

  Flags f;
  std::string suite_name;
  auto* run = app.add_subcommand("run", "run a scenario and write trace, summary and plot data");
  add_common(run, f, true);
  auto* verify = app.add_subcommand("verify", "check the hypotheses of a scenario without running it");
  add_common(verify, f, true);
  auto* suite = app.add_subcommand("suite", "run the acceptance or lemma suite");
  suite->add_option("name", suite_name, "acceptance or lemmas")->required();
  add_common(suite, f, false);
  auto* graph = app.add_subcommand("export-graph", "write the weight matrices A_0..A_iters");
  add_common(graph, f, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return fixnet::kExitConfig;
  }

  const fixnet::Console io{std::cout, std::cerr, f.quiet};
  try {
    if (*suite) {
      std::uint64_t seed = 0;
      if (const char* env = std::getenv("FIXNET_SEED"); env && *env) {
        seed = fixnet::parse_size(env);
      }
      if (f.seed) seed = *f.seed;
      return fixnet::cmd_suite(suite_name, f.out.empty() ? "fixnet-suite" : f.out, seed, io);
    }
    const fixnet::RunConfig cfg = load(f);
    if (*run) return fixnet::cmd_run(cfg, io);
    if (*verify) return fixnet::cmd_verify(cfg, io);
    return fixnet::cmd_export_graph(cfg, f.iters.value_or(100), io);
  } catch (const fixnet::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return fixnet::kExitConfig;
  } catch (const fixnet::ValidationError& e) {
    std::cerr << "validation failed: " << e.what() << "\n";
    return fixnet::kExitValidation;
  }
}

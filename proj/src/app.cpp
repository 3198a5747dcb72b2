#include "fixnet/app.hpp"

#include "fixnet/acceptance.hpp"
#include "fixnet/error.hpp"
#include "fixnet/io.hpp"
#include "fixnet/lemmas.hpp"
#include "fixnet/numfmt.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace fixnet {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Configuration

RunConfig parse_run_config(const Json& doc, const fs::path& base_dir) {
  Fields f(doc, "config");
  RunConfig cfg;
  cfg.scenario = resolve_scenario_spec(f.raw("scenario"));
  if (f.has("engine")) cfg.engine = parse_engine(f.get<std::string>("engine"));
  cfg.max_iters = f.get_or("max_iters", cfg.max_iters);
  cfg.stop_tolerance = f.get_or("stop_tolerance", cfg.stop_tolerance);
  cfg.repeats = f.get_or("repeats", cfg.repeats);
  if (f.has("out")) cfg.out = f.get<std::string>("out");
  cfg.seed = f.get_or<std::uint64_t>("seed", cfg.seed);
  cfg.mixing_horizon = f.get_or("mixing_horizon", cfg.mixing_horizon);
  f.finish();

  if (cfg.repeats == 0) throw ConfigError("config.repeats must be at least 1");
  if (!(cfg.stop_tolerance >= 0.0)) {
    throw ConfigError("config.stop_tolerance must be nonnegative");
  }
  if (cfg.out.is_relative() && !base_dir.empty()) cfg.out = base_dir / cfg.out;

  Json& g = cfg.scenario["graph"];
  if (g.is_object() && g.value("type", "") == "matrix_list" && g.contains("path") &&
      g["path"].is_string()) {
    fs::path p = g["path"].get<std::string>();
    if (p.is_relative() && !base_dir.empty()) g["path"] = (base_dir / p).string();
  }
  return cfg;
}

RunConfig load_run_config(const fs::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError("cannot read config '" + path.string() + "': " + e.what());
  }
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_run_config(doc, path.parent_path());
}

Json run_config_to_json(const RunConfig& cfg) {
  return {{"scenario", cfg.scenario},
          {"engine", to_string(cfg.engine)},
          {"max_iters", cfg.max_iters},
          {"stop_tolerance", cfg.stop_tolerance},
          {"repeats", cfg.repeats},
          {"out", cfg.out.string()},
          {"seed", cfg.seed},
          {"mixing_horizon", cfg.mixing_horizon}};
}

void apply_overrides(RunConfig& cfg, const CliOverrides& o, const char* env_seed) {
  if (env_seed && *env_seed) {
    try {
      cfg.seed = parse_size(env_seed);
    } catch (const ConfigError&) {
      throw ConfigError(std::string("FIXNET_SEED is not an unsigned integer: ") + env_seed);
    }
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.out) cfg.out = *o.out;
  if (o.iters) cfg.max_iters = *o.iters;
  if (o.tol) {
    if (!(*o.tol >= 0.0)) throw ConfigError("--tol must be nonnegative");
    cfg.stop_tolerance = *o.tol;
  }
  if (o.repeats) {
    if (*o.repeats == 0) throw ConfigError("--repeats must be at least 1");
    cfg.repeats = *o.repeats;
  }
}

std::string config_fingerprint(const RunConfig& cfg) {
  Json j = run_config_to_json(cfg);
  j.erase("out");  // where results go does not change them
  const std::string text = j.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// Plot data

std::string format_plot_data(const PlotData& p) {
  std::string s = "# fixnet-plot v1 " + p.title + "\n";
  for (std::size_t c = 0; c < p.columns.size(); ++c) {
    s += (c ? " " : "") + p.columns[c];
  }
  s += "\n";
  for (const auto& row : p.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) s += ' ';
      s += format_double(row[c]);
    }
    s += "\n";
  }
  return s;
}

PlotData parse_plot_data(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  const std::string magic = "# fixnet-plot v1 ";
  if (!std::getline(in, line) || line.rfind(magic, 0) != 0) {
    throw ConfigError("plot data: missing or unsupported header");
  }
  PlotData p;
  p.title = line.substr(magic.size());
  if (!std::getline(in, line)) throw ConfigError("plot data: missing column line");
  for (auto f : split_fields(line, ' ')) p.columns.emplace_back(f);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (auto f : split_fields(line, ' ')) row.push_back(parse_double(f));
    if (row.size() != p.columns.size()) throw ConfigError("plot data: ragged row");
    p.rows.push_back(std::move(row));
  }
  return p;
}

// ---------------------------------------------------------------------------
// Commands

namespace {

template <class F>
int guarded(const Console& io, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    io.err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Json::exception& e) {
    io.err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ValidationError& e) {
    io.err << "validation failed: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    io.err << "validation failed: " << e.what() << "\n";
    return kExitValidation;
  } catch (const DivergenceError& e) {
    io.err << "divergence: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const DomainError& e) {
    io.err << "divergence: iterate left the operator domain: " << e.what() << "\n";
    return kExitDivergence;
  }
}

void print_validation(const ValidationReport& rep, const Console& io, bool failures_only) {
  for (const auto& e : rep.entries) {
    if (failures_only && e.pass) continue;
    auto& os = e.pass ? io.out : io.err;
    if (!e.pass || !io.quiet) {
      os << "  " << (e.pass ? "pass" : "FAIL") << "  " << e.check << ": " << e.detail << "\n";
    }
  }
}

Json validation_json(const ValidationReport& rep) {
  Json arr = Json::array();
  for (const auto& e : rep.entries) {
    arr.push_back({{"check", e.check}, {"pass", e.pass}, {"detail", e.detail}});
  }
  return arr;
}

void require_engine_fit(const Scenario& s, EngineKind engine) {
  if (engine == EngineKind::km && s.agents() != 1) {
    throw ValidationError("engine km requires exactly one agent; scenario has " +
                          std::to_string(s.agents()));
  }
  if (engine == EngineKind::dibkm && !s.blocks()) {
    throw ValidationError("engine dibkm requires a block scheme (scenario.blocks)");
  }
}

std::string trace_name(std::size_t rep) {
  return rep == 0 ? "trace.csv" : "trace-" + std::to_string(rep) + ".csv";
}

}  // namespace

int cmd_run(const RunConfig& cfg, const Console& io) {
  return guarded(io, [&] {
    const Scenario s = build_scenario(cfg.scenario, cfg.seed);
    require_engine_fit(s, cfg.engine);
    const ValidationReport rep = validate_scenario(s);
    if (!rep.pass) {
      io.err << "scenario '" << s.name() << "' failed validation:\n";
      print_validation(rep, io, true);
      return kExitValidation;
    }

    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    if (ec) throw ConfigError("cannot create output directory '" + cfg.out.string() + "'");

    const std::string fp = config_fingerprint(cfg);
    const Problem problem = s.problem();
    std::vector<RunTrace> traces;
    for (std::size_t r = 0; r < cfg.repeats; ++r) {
      RunOptions opt;
      opt.engine = cfg.engine;
      opt.max_iters = cfg.max_iters;
      opt.stop_tolerance = cfg.stop_tolerance;
      opt.seed = cfg.seed;
      opt.repetition = r;
      opt.mixing_horizon = cfg.mixing_horizon;
      opt.fingerprint = fp;
      traces.push_back(run(problem, opt));
    }

    Json runs = Json::array();
    Json files = Json::array();
    double mean_res = 0.0, mean_cons = 0.0;
    for (std::size_t r = 0; r < traces.size(); ++r) {
      const RunTrace& t = traces[r];
      std::ostringstream os;
      write_trace(os, t);
      write_file_atomic(cfg.out / trace_name(r), os.str());
      files.push_back(trace_name(r));
      const TraceRecord& last = t.records.back();
      Json jr = {{"repetition", r},
                 {"stop_reason", t.stop_reason},
                 {"iterations", last.k},
                 {"final_max_residual", last.max_residual},
                 {"final_max_consensus", last.max_consensus},
                 {"trace", trace_name(r)}};
      if (t.has_distance) jr["final_d2"] = last.d2;
      if (t.has_weighted) jr["final_weighted_d2"] = last.weighted_d2;
      runs.push_back(jr);
      mean_res += last.max_residual / double(traces.size());
      mean_cons += last.max_consensus / double(traces.size());
    }

    // Plot data from the first repetition.
    const RunTrace& t0 = traces.front();
    PlotData loglog{"log10 max residual vs log10 k", {"log10_k", "log10_max_residual"}, {}};
    PlotData cons{"max consensus error vs k", {"k", "max_consensus"}, {}};
    PlotData dist{"d_k^2 vs k", {"k", "d2"}, {}};
    PlotData wdist{"weighted squared distance vs k", {"k", "weighted_d2"}, {}};
    for (const auto& rec : t0.records) {
      if (rec.k > 0 && rec.max_residual > 0.0) {
        loglog.rows.push_back({std::log10(double(rec.k)), std::log10(rec.max_residual)});
      }
      cons.rows.push_back({double(rec.k), rec.max_consensus});
      dist.rows.push_back({double(rec.k), rec.d2});
      wdist.rows.push_back({double(rec.k), rec.weighted_d2});
    }
    auto emit = [&](const std::string& name, const PlotData& p) {
      write_file_atomic(cfg.out / name, format_plot_data(p));
      files.push_back(name);
    };
    emit("residual_loglog.dat", loglog);
    emit("consensus.dat", cons);
    if (t0.has_distance) emit("distance_sq.dat", dist);
    if (t0.has_weighted) emit("weighted_distance_sq.dat", wdist);

    Json cfg_json = run_config_to_json(cfg);
    cfg_json.erase("out");
    Json summary = {{"format", "fixnet-summary v1"},
                    {"fingerprint", fp},
                    {"scenario", s.name()},
                    {"engine", to_string(cfg.engine)},
                    {"seed", cfg.seed},
                    {"agents", s.agents()},
                    {"dimension", s.layout()->dim()},
                    {"repeats", cfg.repeats},
                    {"runs", runs},
                    {"mean_final_max_residual", mean_res},
                    {"mean_final_max_consensus", mean_cons},
                    {"validation", validation_json(rep)},
                    {"config", cfg_json}};
    files.push_back("summary.json");
    summary["files"] = files;
    write_file_atomic(cfg.out / "summary.json", summary.dump(2) + "\n");

    if (!io.quiet) {
      io.out << "scenario " << s.name() << ", engine " << to_string(cfg.engine) << ", "
             << cfg.repeats << " run(s)\n";
      for (const auto& jr : runs) {
        io.out << "  rep " << jr["repetition"].get<std::size_t>() << ": "
               << jr["stop_reason"].get<std::string>() << " at k="
               << jr["iterations"].get<std::size_t>()
               << ", max residual " << format_double(jr["final_max_residual"].get<double>())
               << ", max consensus " << format_double(jr["final_max_consensus"].get<double>())
               << "\n";
      }
      io.out << "wrote " << files.size() << " files to " << cfg.out.string() << "\n";
    }
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------
// verify

namespace {

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

const ValidationEntry* find_entry(const ValidationReport& r, const std::string& name) {
  for (const auto& e : r.entries) {
    if (e.check == name) return &e;
  }
  return nullptr;
}

// Above this a sampled linear-regularity constant is taken as evidence that
// no finite constant exists on the sampled ball.
constexpr double kNonRegularEvidence = 50.0;

}  // namespace

VerifyReport verify_scenario(const Scenario& s, std::size_t mixing_horizon) {
  VerifyReport vr;
  vr.validation = validate_scenario(s);
  const auto& v = s.validation();
  const auto& ops = s.ops();
  auto line = [&vr](std::string name, std::string status, std::string detail) {
    vr.lines.push_back({std::move(name), std::move(status), std::move(detail)});
  };

  const ValidationEntry* a1 = find_entry(vr.validation, "assumption1");
  vr.assumption1 = a1 && a1->pass;
  line("joint connectivity", vr.assumption1 ? "pass" : "fail",
       a1 ? a1->detail : "");

  if (vr.assumption1) {
    try {
      const auto& g = s.graph();
      const std::size_t h = mixing_horizon ? mixing_horizon : contraction_horizon(g);
      const std::size_t k_max = std::max<std::size_t>(64, 2 * g.period().value_or(g.window()));
      vr.mixing = compute_mixing(g, k_max, h);
      const auto& m = *vr.mixing;
      line("mixing constants", "pass",
           "varpi=" + num(m.varpi) + " xi=" + num(m.xi) + " pi_min=" + num(m.pi_floor) +
               (m.exact_mixing ? " (exact mixing)" : ""));
    } catch (const std::exception& e) {
      line("mixing constants", "fail", e.what());
    }
  }

  for (std::size_t i = 0; i < ops.size(); ++i) {
    double kappa = std::nan("");
    std::string detail;
    try {
      kappa = estimate_linear_regularity(ops[i], v.radius, v.samples,
                                         substream_seed(s.seed(), "verify/linear", i));
      detail = "kappa_" + std::to_string(i) + "=" + num(kappa);
    } catch (const std::exception& e) {
      detail = e.what();
    }
    vr.linear_kappa.push_back(kappa);
    const bool regular = std::isfinite(kappa) && kappa <= kNonRegularEvidence;
    line("linear regularity of " + ops[i].name() + " [" + std::to_string(i) + "]",
         std::isfinite(kappa) ? (regular ? "pass" : "fail") : "n/a",
         regular || !std::isfinite(kappa) ? detail : detail + " (non-regular on the sampled ball)");
  }

  if (ops.has_common_projector()) {
    if (vr.validation.regularity) {
      vr.regularity = vr.validation.regularity;
    } else {
      try {
        vr.regularity = estimate_regularity(ops, v.radius, v.samples,
                                            substream_seed(s.seed(), "validation/regularity"));
      } catch (const std::exception& e) {
        line("regularity constants", "fail", e.what());
      }
    }
  }
  if (vr.regularity) {
    const auto& r = *vr.regularity;
    line("power regularity", std::isfinite(r.nu) ? "pass" : "fail",
         "nu=" + num(r.nu) + " kappa_c=" + num(r.kappa_c) + " kappa_0=" + num(r.kappa_0));
  }

  if (const ValidationEntry* a2 = find_entry(vr.validation, "assumption2")) {
    line("regularity hypothesis", a2->pass && (s.interior_witness() || s.sets().empty())
                                          ? "pass" : "fail",
         a2->detail);
  } else {
    line("regularity hypothesis", "n/a", "not declared");
  }

  const double l1 = s.errors().l1_sum();
  line("summable errors", std::isfinite(l1) ? "pass" : "fail",
       s.errors().kind_name() + ", sum of error norms " + num(l1));

  if (vr.mixing && vr.regularity) {
    const auto& r = *vr.regularity;
    try {
      vr.condition17 = check_condition17(r, *vr.mixing, s.schedule(), s.agents());
      const auto& c = *vr.condition17;
      line("step-size condition (full updates)", c.satisfied ? "pass" : "fail",
           "alpha_c=" + num(c.alpha_c) + " bound=" + num(c.bound) + " margin=" + num(c.margin) +
               " gamma2=" + num(c.gamma2));
    } catch (const std::exception& e) {
      line("step-size condition (full updates)", "fail", e.what());
    }
    try {
      const double p0 = s.blocks() ? s.blocks()->p0() : 1.0;
      vr.condition07 = check_condition07(r.nu, *vr.mixing, s.schedule(), s.agents(), p0);
      const auto& c = *vr.condition07;
      std::string d = "p0=" + num(p0) + " alpha_c=" + num(c.alpha_c) + " bound=" +
                      num(c.bound) + " margin=" + num(c.margin);
      if (!c.note.empty()) d += "; " + c.note;
      line("step-size condition (block updates)", c.satisfied ? "pass" : "fail", d);
    } catch (const std::exception& e) {
      line("step-size condition (block updates)", "fail", e.what());
    }
  } else {
    line("step-size condition (full updates)", "n/a", "needs mixing and regularity estimates");
    line("step-size condition (block updates)", "n/a", "needs mixing and regularity estimates");
  }
  return vr;
}

int cmd_verify(const RunConfig& cfg, const Console& io) {
  return guarded(io, [&] {
    const Scenario s = build_scenario(cfg.scenario, cfg.seed);
    const VerifyReport vr = verify_scenario(s, cfg.mixing_horizon);
    io.out << "scenario " << s.name() << " (" << s.agents() << " agents, dimension "
           << s.layout()->dim() << ")\n";
    for (const auto& l : vr.lines) {
      io.out << "  " << std::left << std::setw(5) << l.status << " " << l.name;
      if (!l.detail.empty()) io.out << ": " << l.detail;
      io.out << "\n";
    }
    if (!vr.validation.pass) {
      io.err << "validation checks failed:\n";
      print_validation(vr.validation, io, true);
      return kExitValidation;
    }
    return kExitOk;
  });
}

int cmd_export_graph(const RunConfig& cfg, std::size_t last_k, const Console& io) {
  return guarded(io, [&] {
    const Scenario s = build_scenario(cfg.scenario, cfg.seed);
    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    if (ec) throw ConfigError("cannot create output directory '" + cfg.out.string() + "'");
    std::ostringstream os;
    write_matrix_list(os, s.graph(), last_k);
    write_file_atomic(cfg.out / "graph.txt", os.str());
    if (!io.quiet) {
      io.out << "wrote A_0..A_" << last_k << " (" << s.graph().description() << ") to "
             << (cfg.out / "graph.txt").string() << "\n";
    }
    return kExitOk;
  });
}

int cmd_suite(const std::string& suite, const fs::path& out, std::uint64_t seed,
              const Console& io) {
  if (suite != "acceptance" && suite != "lemmas") {
    io.err << "unknown suite '" << suite << "' (expected acceptance or lemmas)\n";
    return kExitConfig;
  }
  return guarded(io, [&] {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw ConfigError("cannot create output directory '" + out.string() + "'");
    std::vector<CriterionResult> rows;
    if (suite == "lemmas") {
      for (const auto& p : run_lemma_suite(seed)) {
        rows.push_back({p.name, "", p.pass() ? "pass" : "fail",
                        std::to_string(p.samples) + " samples, " +
                            std::to_string(p.violations) + " violations, worst margin " +
                            num(p.worst_margin) + "; " + p.detail,
                        0.0});
      }
    } else {
      rows = run_acceptance(seed, out / "acceptance-work", [&](const CriterionResult& r) {
        if (!io.quiet) io.out << format_criterion(r) << std::endl;
      });
    }
    std::string table;
    Json arr = Json::array();
    bool ok = true;
    for (const auto& r : rows) {
      table += format_criterion(r) + "\n";
      arr.push_back({{"id", r.id}, {"title", r.title}, {"status", r.status},
                     {"detail", r.detail}});
      ok = ok && r.status != "fail";
    }
    write_file_atomic(out / ("suite-" + suite + ".txt"), table);
    write_file_atomic(out / ("suite-" + suite + ".json"),
                      Json{{"suite", suite}, {"seed", seed}, {"results", arr}}.dump(2) + "\n");
    if (suite == "lemmas" && !io.quiet) io.out << table;
    if (!io.quiet) io.out << (ok ? "all checks passed" : "some checks FAILED") << "\n";
    return ok ? kExitOk : kExitValidation;
  });
}

}  // namespace fixnet

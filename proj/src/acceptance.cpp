#include "fixnet/acceptance.hpp"

#include "fixnet/app.hpp"
#include "fixnet/diagnostics.hpp"
#include "fixnet/error.hpp"
#include "fixnet/io.hpp"
#include "fixnet/lemmas.hpp"
#include "fixnet/mixing.hpp"
#include "fixnet/scenario.hpp"
#include "fixnet/trace.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>

namespace fixnet {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

Scenario preset(const std::string& name, const Json& params, const Json& overrides,
                std::uint64_t seed) {
  Json ref = {{"preset", name}, {"params", params}, {"overrides", overrides}};
  return build_scenario(resolve_scenario_spec(ref), seed);
}

RunOptions options(EngineKind engine, std::size_t iters, double tol, std::uint64_t seed,
                   std::uint64_t rep = 0, bool states = false) {
  RunOptions o;
  o.engine = engine;
  o.max_iters = iters;
  o.stop_tolerance = tol;
  o.seed = seed;
  o.repetition = rep;
  o.record_states = states;
  return o;
}

Json sym2(double a) { return Json{{a, 1.0 - a}, {1.0 - a, a}}; }

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

bool same_states(const RunTrace& a, const RunTrace& b, std::size_t& first_diff) {
  const auto& sa = a.log.states;
  const auto& sb = b.log.states;
  const std::size_t n = std::min(sa.size(), sb.size());
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < sa[k].size(); ++i) {
      if (!(sa[k][i].array() == sb[k][i].array()).all()) {
        first_diff = k;
        return false;
      }
    }
  }
  first_diff = n;
  return sa.size() == sb.size();
}

// --------------------------------------------------------------------------

Outcome ac1(std::uint64_t seed) {
  Outcome o;
  // Single agent on a fixed trivial graph: distributed and centralized
  // iterations must coincide.
  Json doc = {{"name", "single-agent"},
              {"dimension", 3},
              {"operators", {{{"type", "linear_equation"},
                              {"A", {{1.0, 2.0, 0.0}, {0.0, 1.0, -1.0}}},
                              {"b", {1.0, 0.5}}}}},
              {"graph", {{"type", "static"}, {"matrix", {{1.0}}}}},
              {"relaxation", {{"floor", 0.2}, {"values", {{0.3, 0.5, 0.7}}}}},
              {"errors", {{"kind", "geometric"}, {"scale", 0.1}, {"ratio", 0.99}}},
              {"initial", {{"points", {{3.0, -1.0, 2.0}}}}}};
  const Scenario one = build_scenario(doc, seed);
  const auto km = run(one.problem(), options(EngineKind::km, 1000, 0.0, seed, 0, true));
  const auto dk = run(one.problem(), options(EngineKind::dikm, 1000, 0.0, seed, 0, true));
  std::size_t at = 0;
  const bool eq1 = same_states(km, dk, at) && km.log.states.size() == 1001;
  o.require(eq1, "N=1 dikm == km over 1000 steps" +
                     (eq1 ? std::string() : " (first difference at k=" + std::to_string(at) + ")"));

  const Scenario full = preset("feasibility-2halfspace", {{"dimension", 4}},
                               {{"block_sizes", {2, 2}}, {"blocks", {{"probs", {1.0, 1.0}}}}},
                               seed);
  const auto bk = run(full.problem(), options(EngineKind::dibkm, 1000, 0.0, seed, 0, true));
  const auto dk2 = run(full.problem(), options(EngineKind::dikm, 1000, 0.0, seed, 0, true));
  const bool eq2 = same_states(bk, dk2, at) && bk.log.states.size() == 1001;
  o.require(eq2, "p=1 dibkm == dikm over 1000 steps" +
                     (eq2 ? std::string() : " (first difference at k=" + std::to_string(at) + ")"));
  return o;
}

// Long runs shared by AC-2 and AC-3.
struct ConvergenceRun {
  std::string name;
  RunTrace trace;
  bool assumption1 = false;
  double sup_norm = 0.0;
};

const std::vector<ConvergenceRun>& convergence_runs(std::uint64_t seed) {
  static std::map<std::uint64_t, std::vector<ConvergenceRun>> cache;
  auto it = cache.find(seed);
  if (it != cache.end()) return it->second;
  std::vector<ConvergenceRun> out;
  for (const char* name : {"feasibility-2halfspace", "linear-3x3"}) {
    const Scenario s = preset(name, Json::object(), Json::object(), seed);
    ConvergenceRun r;
    r.name = name;
    const auto rep = validate_scenario(s);
    for (const auto& e : rep.entries) {
      if (e.check == "assumption1") r.assumption1 = e.pass;
    }
    r.trace = run(s.problem(), options(EngineKind::dikm, 20000, 0.0, seed, 0, true));
    for (const auto& st : r.trace.log.states) {
      for (const auto& x : st) r.sup_norm = std::max(r.sup_norm, x.norm());
    }
    r.trace.log = {};
    out.push_back(std::move(r));
  }
  return cache.emplace(seed, std::move(out)).first->second;
}

Outcome ac2(std::uint64_t seed) {
  Outcome o;
  for (const auto& r : convergence_runs(seed)) {
    std::optional<std::size_t> hit;
    for (const auto& rec : r.trace.records) {
      const double dmax = *std::max_element(rec.distance.begin(), rec.distance.end());
      if (dmax < 1e-6 && rec.max_consensus < 1e-6) {
        hit = rec.k;
        break;
      }
    }
    const auto& last = r.trace.records.back();
    const double dlast = *std::max_element(last.distance.begin(), last.distance.end());
    const bool ok = r.assumption1 && hit && dlast < 1e-6 && last.max_consensus < 1e-6 &&
                    std::isfinite(r.sup_norm);
    o.require(ok, r.name + ": joint connectivity " + (r.assumption1 ? "ok" : "violated") +
                      ", dist<1e-6 and consensus<1e-6 from k=" +
                      (hit ? std::to_string(*hit) : std::string("never")) +
                      ", final dist " + num(dlast) + ", sup ||x|| " + num(r.sup_norm));
  }
  return o;
}

Outcome ac3(std::uint64_t seed) {
  Outcome o;
  for (const auto& r : convergence_runs(seed)) {
    double sup = 0.0, first = 0.0, lastd = 0.0;
    bool bounded = true;
    for (std::size_t i = 0; i < r.trace.agents; ++i) {
      const auto m = running_min_residual(r.trace, i);
      const auto rep = subsequence_rate(m, 100);
      sup = std::max(sup, rep.sup_scaled);
      first = std::max(first, rep.first_decade_max);
      lastd = std::max(lastd, rep.last_decade_max);
      bounded = bounded && rep.bounded;
    }
    o.require(bounded && std::isfinite(sup),
              r.name + ": sup_k sqrt(k) m_k = " + num(sup) + " (first decade " + num(first) +
                  ", last decade " + num(lastd) + ")");
  }
  return o;
}

// Tries graphs of increasing mixing speed until the step-size condition
// leaves a practical alpha_c; returns the armed scenario document.
constexpr double kMinPracticalAlpha = 0.01;

struct Armed {
  Json doc;
  VerifyReport verify;
  double alpha = 0.0;
  std::string graph;
};

std::vector<std::pair<std::string, Json>> candidate_graphs(const Json& preset_graph) {
  return {{"preset periodic", preset_graph},
          {"static a=0.6", {{"type", "static"}, {"matrix", sym2(0.6)}}},
          {"static a=0.55", {{"type", "static"}, {"matrix", sym2(0.55)}}},
          {"static a=0.52", {{"type", "static"}, {"matrix", sym2(0.52)}}}};
}

std::optional<Armed> arm(Json base, bool block, std::uint64_t seed, std::string& log) {
  for (const auto& [label, graph] : candidate_graphs(base["graph"])) {
    Json doc = base;
    doc["graph"] = graph;
    doc["relaxation"] = {{"floor", 0.25}, {"value", 0.25}};
    const VerifyReport probe = verify_scenario(build_scenario(doc, seed));
    const auto& cond = block ? probe.condition07 : probe.condition17;
    if (!cond) {
      log += label + ": condition not evaluable; ";
      continue;
    }
    const double alpha = std::min(0.5 * cond->bound, 0.5);
    log += label + ": bound " + num(cond->bound) + "; ";
    if (alpha < kMinPracticalAlpha) continue;
    doc["relaxation"] = {{"floor", alpha}, {"value", alpha}};
    Armed a{doc, verify_scenario(build_scenario(doc, seed)), alpha, label};
    const auto& c = block ? a.verify.condition07 : a.verify.condition17;
    if (c && c->satisfied && a.verify.mixing) return a;
  }
  return std::nullopt;
}

Outcome ac4(std::uint64_t seed) {
  Outcome o;
  Json base = resolve_scenario_spec({{"preset", "feasibility-2halfspace"}});
  base["errors"] = {{"kind", "zero"}};
  std::string log;
  const auto armed = arm(base, false, seed, log);
  if (!armed) {
    o.require(false, "could not arm: " + log);
    return o;
  }
  const Scenario s = build_scenario(armed->doc, seed);
  const double xi = armed->verify.mixing->xi;
  const auto t = run(s.problem(), options(EngineKind::dikm, 100000, 1e-8, seed));
  const double target = 2.0 * std::log(1.0 / xi);
  try {
    const auto cert = fit_rate(t.column_d2(), 0.5, target, 0.2);
    o.require(cert.passed, "graph " + armed->graph + ", xi=" + num(xi) + ", alpha_c=" +
                               num(armed->alpha) + " (margin " +
                               num(armed->verify.condition17->margin) + "), exponent " +
                               num(cert.exponent) + " >= " + num(target) + " - 0.2 over k=" +
                               std::to_string(cert.k_first) + ".." +
                               std::to_string(cert.k_last));
  } catch (const InsufficientDataError& e) {
    o.require(false, std::string("rate fit: ") + e.what());
  }
  return o;
}

Json block_doc() {
  Json doc = resolve_scenario_spec({{"preset", "feasibility-2halfspace"},
                                    {"params", {{"dimension", 4}}}});
  doc["block_sizes"] = {1, 1, 1, 1};
  doc["blocks"] = {{"probs", {0.25, 0.5, 0.75, 1.0}}};
  return doc;
}

Outcome ac5(std::uint64_t seed) {
  Outcome o;
  Json doc = block_doc();
  doc["errors"] = {{"kind", "geometric"}, {"scale", 0.01}, {"ratio", 0.9}};
  const Scenario s = build_scenario(doc, seed);
  const std::size_t reps = 32;
  double res = 0.0, cons = 0.0;
  std::size_t converged = 0;
  for (std::size_t r = 0; r < reps; ++r) {
    const auto t = run(s.problem(), options(EngineKind::dibkm, 20000, 1e-7, seed, r));
    res += t.records.back().max_residual / double(reps);
    cons += t.records.back().max_consensus / double(reps);
    converged += t.stop_reason == "converged";
  }
  o.require(res < 1e-4 && cons < 1e-4,
            "32 repetitions: mean final max residual " + num(res) + ", mean consensus " +
                num(cons) + " (" + std::to_string(converged) + " converged)");
  return o;
}

Outcome ac6(std::uint64_t seed) {
  Outcome o;
  Json base = block_doc();
  base["errors"] = {{"kind", "zero"}};
  std::string log;
  const auto armed = arm(base, true, seed, log);
  if (!armed) {
    o.require(false, "could not arm: " + log);
    return o;
  }
  const Scenario s = build_scenario(armed->doc, seed);
  const double xi = armed->verify.mixing->xi;
  std::vector<std::vector<double>> series;
  for (std::size_t r = 0; r < 32; ++r) {
    series.push_back(
        run(s.problem(), options(EngineKind::dibkm, 100000, 1e-8, seed, r)).column_weighted_d2());
  }
  const auto stats = series_stats(series);
  const double target = std::log(1.0 / xi);
  try {
    const auto cert = fit_rate(stats.mean, 0.5, target, 0.1);
    o.require(cert.passed, "graph " + armed->graph + ", xi=" + num(xi) + ", alpha_c=" +
                               num(armed->alpha) + " (margin " +
                               num(armed->verify.condition07->margin) +
                               "), exponent of the 32-run mean " + num(cert.exponent) +
                               " >= " + num(target) + " - 0.1");
  } catch (const InsufficientDataError& e) {
    o.require(false, std::string("rate fit: ") + e.what());
  }
  return o;
}

Outcome ac7(std::uint64_t seed) {
  Outcome o;
  const Scenario ex = build_example1_scenario(seed);
  const double nu = estimate_power_regularity(ex.ops(), 0.999, 100000,
                                              substream_seed(seed, "ac7/power"));
  o.require(nu <= 2.0 + 1e-6, "example pair nu = " + num(nu) + " <= 2");
  const double k1 = estimate_linear_regularity(ex.ops()[0], 0.99, 10000,
                                               substream_seed(seed, "ac7/linear"));
  o.require(k1 > 50.0, "T1 linear constant at radius 0.99 = " + num(k1) + " > 50");
  const Scenario hs = preset("feasibility-2halfspace", Json::object(), Json::object(), seed);
  const auto est = estimate_regularity(hs.ops(), 10.0, 10000, substream_seed(seed, "ac7/prop"));
  const double bound = check_proposition1(est.kappa_i, est.kappa_0);
  o.require(est.nu <= bound + 1e-9, "two halfspaces nu = " + num(est.nu) +
                                        " <= kappa_0 * kappa_c = " + num(bound));
  return o;
}

Outcome ac8(std::uint64_t seed) {
  Outcome o;
  for (const auto& p : run_lemma_suite(seed)) {
    o.require(p.pass(), p.name + " " + std::to_string(p.violations) + "/" +
                            std::to_string(p.samples));
  }
  return o;
}

Outcome ac9(std::uint64_t) {
  Outcome o;
  Eigen::MatrixXd pool1 = Eigen::MatrixXd::Zero(4, 4), pool2 = pool1, pool3 = pool1;
  pool1(1, 0) = pool1(2, 1) = 1;
  pool2(3, 2) = 1;
  pool3(0, 3) = pool3(2, 0) = 1;
  Eigen::MatrixXd ring = Eigen::MatrixXd::Zero(3, 3);
  ring(0, 2) = ring(1, 0) = ring(2, 1) = 1;
  Eigen::MatrixXd c(2, 2);
  c << 0.75, 0.25, 0.5, 0.5;
  std::vector<GraphSequence> gens{
      graphs::static_graph(c),
      graphs::static_graph(uniform_weights(ring)),
      graphs::complete(4),
      graphs::rotating(3),
      graphs::rotating(5),
      graphs::periodic({(Eigen::MatrixXd(2, 2) << 1, 0, 0.5, 0.5).finished(),
                        (Eigen::MatrixXd(2, 2) << 0.5, 0.5, 0, 1).finished()}),
      graphs::random_pool({pool1, pool2, pool3}, 7)};
  for (const auto& g : gens) {
    const std::string name = g.description() + " N=" + std::to_string(g.agents());
    const auto a1 = check_assumption1(g, 4 * g.window() + 64);
    if (!a1.pass) {
      o.require(false, name + ": generator output fails the joint connectivity check (" + a1.message + ")");
      continue;
    }
    const auto m = compute_mixing(g, 200, contraction_horizon(g));
    const bool ok = m.max_stationarity_error <= 1e-8 && m.pi_floor >= m.pi_floor_bound &&
                    m.xi > 0.0 && m.xi < 1.0;
    o.require(ok, name + ": stationarity " + num(m.max_stationarity_error) + ", pi_min " +
                      num(m.pi_floor) + " >= " + num(m.pi_floor_bound) + ", xi " + num(m.xi));
  }
  const auto m = compute_mixing(gens[0], 200, contraction_horizon(gens[0]));
  const double pe = std::max(std::abs(m.pi[0][0] - 2.0 / 3.0), std::abs(m.pi[0][1] - 1.0 / 3.0));
  o.require(pe <= 1e-8 && std::abs(m.xi - 0.25) <= 0.05,
            "[[.75,.25],[.5,.5]]: pi error " + num(pe) + ", xi " + num(m.xi) + " vs 0.25");
  return o;
}

std::map<std::string, std::string> dir_bytes(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file()) out[e.path().filename().string()] = read_file(e.path());
  }
  return out;
}

Outcome ac10(std::uint64_t seed, const fs::path& workdir) {
  Outcome o;
  std::ostringstream sink;
  const Console quiet{sink, sink, true};
  const Json configs[] = {
      {{"scenario", {{"preset", "feasibility-2halfspace"}}},
       {"engine", "dikm"}, {"max_iters", 3000}, {"repeats", 2}, {"seed", seed}},
      {{"scenario", {{"preset", "feasibility-2halfspace"}, {"params", {{"dimension", 4}}},
                     {"overrides", {{"block_sizes", {1, 1, 1, 1}},
                                    {"blocks", {{"probs", {0.25, 0.5, 0.75, 1.0}}}}}}}},
       {"engine", "dibkm"}, {"max_iters", 3000}, {"seed", seed}},
      {{"scenario", {{"preset", "example1"}}}, {"engine", "dikm"}, {"seed", seed}}};
  std::size_t idx = 0, files = 0;
  for (const auto& doc : configs) {
    const fs::path a = workdir / ("ac10-" + std::to_string(idx) + "-a");
    const fs::path b = workdir / ("ac10-" + std::to_string(idx) + "-b");
    ++idx;
    fs::remove_all(a);
    fs::remove_all(b);
    RunConfig ca = parse_run_config(doc), cb = ca;
    ca.out = a;
    cb.out = b;
    const int ra = cmd_run(ca, quiet), rb = cmd_run(cb, quiet);
    if (ra != 0 || rb != 0) {
      o.require(false, "run exit codes " + std::to_string(ra) + "/" + std::to_string(rb) +
                           ": " + sink.str());
      continue;
    }
    const auto fa = dir_bytes(a), fb = dir_bytes(b);
    o.require(fa == fb, "config " + std::to_string(idx) + ": " + std::to_string(fa.size()) +
                            " files byte-identical across runs");
    for (const auto& [name, bytes] : fa) {
      ++files;
      std::string again;
      if (name.ends_with(".csv")) {
        std::istringstream in(bytes);
        std::ostringstream os;
        write_trace(os, read_trace(in));
        again = os.str();
      } else if (name.ends_with(".json")) {
        again = Json::parse(bytes).dump(2) + "\n";
      } else if (name.ends_with(".dat")) {
        again = format_plot_data(parse_plot_data(bytes));
      }
      if (again != bytes) o.require(false, name + " does not round-trip");
    }
  }
  // Graph export.
  RunConfig gc = parse_run_config(configs[0]);
  gc.out = workdir / "ac10-graph";
  if (cmd_export_graph(gc, 50, quiet) != 0) {
    o.require(false, "export-graph failed: " + sink.str());
  } else {
    std::istringstream in(read_file(gc.out / "graph.txt"));
    const auto ms = read_matrix_list(in);
    const Scenario s = build_scenario(gc.scenario, gc.seed);
    bool same = ms.size() == 51;
    for (std::size_t k = 0; same && k < ms.size(); ++k) {
      same = (ms[k].array() == s.graph().matrix(k).array()).all();
    }
    ++files;
    o.require(same, "graph export re-reads to the same 51 matrices");
  }
  o.require(true, std::to_string(files) + " files re-parsed through their readers");
  return o;
}

const std::vector<std::pair<std::string, std::string>>& titles() {
  static const std::vector<std::pair<std::string, std::string>> t{
      {"AC-1", "reduction to centralized and full-block iterations"},
      {"AC-2", "distributed convergence under summable errors"},
      {"AC-3", "subsequence residual rate"},
      {"AC-4", "distance rate under the full-update step condition"},
      {"AC-5", "block-coordinate convergence"},
      {"AC-6", "expected rate under the block step condition"},
      {"AC-7", "power regularity of the example pair"},
      {"AC-8", "auxiliary inequality suite"},
      {"AC-9", "absorption vectors and mixing constants"},
      {"AC-10", "determinism and file round-trips"}};
  return t;
}

}  // namespace

std::vector<std::string> acceptance_ids() {
  std::vector<std::string> ids;
  for (const auto& [id, title] : titles()) ids.push_back(id);
  return ids;
}

CriterionResult run_criterion(const std::string& id, std::uint64_t seed,
                              const fs::path& workdir) {
  CriterionResult r;
  r.id = id;
  for (const auto& [tid, title] : titles()) {
    if (tid == id) r.title = title;
  }
  if (r.title.empty()) throw std::invalid_argument("unknown criterion " + id);
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    if (id == "AC-1") o = ac1(seed);
    else if (id == "AC-2") o = ac2(seed);
    else if (id == "AC-3") o = ac3(seed);
    else if (id == "AC-4") o = ac4(seed);
    else if (id == "AC-5") o = ac5(seed);
    else if (id == "AC-6") o = ac6(seed);
    else if (id == "AC-7") o = ac7(seed);
    else if (id == "AC-8") o = ac8(seed);
    else if (id == "AC-9") o = ac9(seed);
    else {
      fs::create_directories(workdir);
      o = ac10(seed, workdir);
    }
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail += std::string(o.detail.empty() ? "" : "; ") + "exception: " + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.status = o.pass ? "pass" : "fail";
  r.detail = o.detail;
  return r;
}

std::vector<CriterionResult> run_acceptance(
    std::uint64_t seed, const fs::path& workdir,
    const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<CriterionResult> out;
  for (const auto& id : acceptance_ids()) {
    out.push_back(run_criterion(id, seed, workdir));
    if (on_result) on_result(out.back());
  }
  return out;
}

std::string format_criterion(const CriterionResult& r) {
  std::ostringstream os;
  std::string status = r.status;
  for (auto& c : status) c = char(std::toupper(static_cast<unsigned char>(c)));
  os << std::left << std::setw(6) << r.id << " " << std::setw(5) << status << " ";
  if (!r.title.empty()) os << r.title << ": ";
  os << r.detail;
  if (r.seconds > 0.0) os << "  (" << std::fixed << std::setprecision(1) << r.seconds << " s)";
  return os.str();
}

}  // namespace fixnet

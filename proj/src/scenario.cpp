#include "fixnet/scenario.hpp"

#include "fixnet/error.hpp"
#include "fixnet/seeds.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fixnet {

// ---------------------------------------------------------------------------
// Sets

SetSpec SetSpec::halfspace(Eigen::VectorXd a, double b) {
  SetSpec s;
  s.kind = Kind::halfspace;
  s.a = std::move(a);
  s.b = b;
  return s;
}

SetSpec SetSpec::ball(Eigen::VectorXd center, double radius) {
  SetSpec s;
  s.kind = Kind::ball;
  s.a = std::move(center);
  s.b = radius;
  return s;
}

SetSpec SetSpec::box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
  SetSpec s;
  s.kind = Kind::box;
  s.a = std::move(lo);
  s.hi = std::move(hi);
  return s;
}

SetSpec SetSpec::affine(Eigen::MatrixXd a, Eigen::VectorXd b) {
  SetSpec s;
  s.kind = Kind::affine;
  s.mat = std::move(a);
  s.rhs = std::move(b);
  return s;
}

Json SetSpec::to_json() const {
  switch (kind) {
    case Kind::halfspace:
      return {{"type", "halfspace"}, {"a", vector_to_json(a)}, {"b", b}};
    case Kind::ball:
      return {{"type", "ball"}, {"center", vector_to_json(a)}, {"radius", b}};
    case Kind::box:
      return {{"type", "box"}, {"lo", vector_to_json(a)}, {"hi", vector_to_json(hi)}};
    case Kind::affine:
      return {{"type", "affine"}, {"A", matrix_to_json(mat)}, {"b", vector_to_json(rhs)}};
  }
  return {};
}

bool SetSpec::interior(const Eigen::VectorXd& x, double margin) const {
  switch (kind) {
    case Kind::halfspace:
      return a.dot(x) - b <= -margin * a.norm();
    case Kind::ball:
      return (x - a).norm() <= b - margin;
    case Kind::box:
      return ((x.array() - a.array()) >= margin).all() &&
             ((hi.array() - x.array()) >= margin).all();
    case Kind::affine:
      return false;  // proper affine subspaces have empty interior
  }
  return false;
}

bool SetSpec::contains(const Eigen::VectorXd& x, double slack) const {
  return distance(x) <= slack;
}

double SetSpec::distance(const Eigen::VectorXd& x) const {
  switch (kind) {
    case Kind::halfspace:
      return std::max(0.0, a.dot(x) - b) / a.norm();
    case Kind::ball:
      return std::max(0.0, (x - a).norm() - b);
    case Kind::box:
      return (x - x.cwiseMax(a).cwiseMin(hi)).norm();
    case Kind::affine:
      return (x - AffineSet(mat, rhs).project(x)).norm();
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Building blocks

namespace {

// Fixed set of an operator written as {A_eq x = b_eq, A_in x <= b_in}, when it
// is polyhedral. Collected to build the exact X* projector.
struct Polyhedron {
  bool valid = false;
  std::vector<Eigen::VectorXd> in_rows, eq_rows;
  std::vector<double> in_rhs, eq_rhs;

  void ineq(Eigen::VectorXd a, double b) {
    in_rows.push_back(std::move(a));
    in_rhs.push_back(b);
  }
  void eq(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
      eq_rows.push_back(a.row(r).transpose());
      eq_rhs.push_back(b[r]);
    }
  }
};

struct BuiltOp {
  NonexpansiveOp op;
  std::optional<SetSpec> set;
  Polyhedron fixed;
};

template <class F>
auto catalog_call(const std::string& ctx, F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw ValidationError(ctx + ": " + e.what());
  }
}

BuiltOp set_op(SetSpec s) {
  Polyhedron poly;
  switch (s.kind) {
    case SetSpec::Kind::halfspace: {
      poly.valid = true;
      poly.ineq(s.a, s.b);
      return {ops::halfspace(s.a, s.b), std::move(s), std::move(poly)};
    }
    case SetSpec::Kind::ball:
      return {ops::ball(s.a, s.b), std::move(s), std::move(poly)};
    case SetSpec::Kind::box: {
      poly.valid = true;
      const auto n = s.a.size();
      for (Eigen::Index j = 0; j < n; ++j) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
        e[j] = 1.0;
        poly.ineq(e, s.hi[j]);
        poly.ineq(-e, -s.a[j]);
      }
      return {ops::box(s.a, s.hi), std::move(s), std::move(poly)};
    }
    case SetSpec::Kind::affine:
      poly.valid = true;
      poly.eq(s.mat, s.rhs);
      return {ops::affine(s.mat, s.rhs), std::move(s), std::move(poly)};
  }
  throw ValidationError("unsupported set type");
}

BuiltOp parse_operator(const Json& j, std::size_t dim, const std::string& ctx) {
  Fields f(j, ctx);
  const auto type = f.get<std::string>("type");
  BuiltOp out = catalog_call(ctx, [&]() -> BuiltOp {
    if (type == "halfspace") {
      auto a = f.vector("a");
      return set_op(SetSpec::halfspace(a, f.get<double>("b")));
    }
    if (type == "ball") {
      auto c = f.vector("center");
      return set_op(SetSpec::ball(c, f.get<double>("radius")));
    }
    if (type == "box") {
      auto lo = f.vector("lo");
      return set_op(SetSpec::box(lo, f.vector("hi")));
    }
    if (type == "affine") {
      auto a = f.matrix("A");
      return set_op(SetSpec::affine(a, f.vector("b")));
    }
    if (type == "linear_equation") {
      auto a = f.matrix("A");
      auto b = f.vector("b");
      Polyhedron poly;
      poly.valid = true;
      poly.eq(a, b);
      return {ops::linear_equation(a, b), std::nullopt, std::move(poly)};
    }
    if (type == "gradient_quadratic") {
      auto q = f.matrix("Q");
      auto c = f.vector("c");
      const double step = f.get<double>("step");
      Polyhedron poly;
      poly.valid = true;
      poly.eq(q, -c);
      return {ops::gradient_quadratic(q, c, step), std::nullopt, std::move(poly)};
    }
    if (type == "identity") {
      Polyhedron poly;
      poly.valid = true;
      return {ops::identity(dim), std::nullopt, std::move(poly)};
    }
    if (type == "negation") {
      Polyhedron poly;
      poly.valid = true;
      poly.eq(Eigen::MatrixXd::Identity(Eigen::Index(dim), Eigen::Index(dim)),
              Eigen::VectorXd::Zero(Eigen::Index(dim)));
      return {ops::negation(dim), std::nullopt, std::move(poly)};
    }
    if (type == "example1_square") {
      // Fix = {0} on the domain [0, 1).
      Polyhedron poly;
      poly.valid = true;
      poly.eq(Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Zero(1));
      return {ops::example1_square(), std::nullopt, std::move(poly)};
    }
    if (type == "example1_interval") {
      Polyhedron poly;
      poly.valid = true;
      poly.ineq(Eigen::VectorXd::Ones(1), 0.5);
      poly.ineq(-Eigen::VectorXd::Ones(1), 0.0);
      return {ops::example1_interval(), std::nullopt, std::move(poly)};
    }
    throw ConfigError(ctx + ": unsupported operator type '" + type + "'");
  });
  f.finish();
  if (out.op.dim() != dim) {
    throw ValidationError(ctx + ": operator dimension " +
                          std::to_string(out.op.dim()) +
                          " differs from scenario dimension " +
                          std::to_string(dim));
  }
  return out;
}

std::optional<PolyhedralProjector> polyhedral_solution(
    const std::vector<BuiltOp>& built, std::size_t dim) {
  std::vector<Eigen::VectorXd> in_rows, eq_rows;
  std::vector<double> in_rhs, eq_rhs;
  for (const auto& b : built) {
    if (!b.fixed.valid) return std::nullopt;
    in_rows.insert(in_rows.end(), b.fixed.in_rows.begin(), b.fixed.in_rows.end());
    in_rhs.insert(in_rhs.end(), b.fixed.in_rhs.begin(), b.fixed.in_rhs.end());
    eq_rows.insert(eq_rows.end(), b.fixed.eq_rows.begin(), b.fixed.eq_rows.end());
    eq_rhs.insert(eq_rhs.end(), b.fixed.eq_rhs.begin(), b.fixed.eq_rhs.end());
  }
  if (in_rows.size() > PolyhedralProjector::kMaxInequalities) return std::nullopt;
  const auto n = Eigen::Index(dim);
  Eigen::MatrixXd ai(Eigen::Index(in_rows.size()), n), ae(Eigen::Index(eq_rows.size()), n);
  Eigen::VectorXd bi(ai.rows()), be(ae.rows());
  for (std::size_t r = 0; r < in_rows.size(); ++r) {
    ai.row(Eigen::Index(r)) = in_rows[r].transpose();
    bi[Eigen::Index(r)] = in_rhs[r];
  }
  for (std::size_t r = 0; r < eq_rows.size(); ++r) {
    ae.row(Eigen::Index(r)) = eq_rows[r].transpose();
    be[Eigen::Index(r)] = eq_rhs[r];
  }
  return PolyhedralProjector(ai, bi, ae, be);
}

std::vector<Eigen::MatrixXd> matrix_array(const Json& j, const std::string& ctx) {
  if (!j.is_array() || j.empty()) {
    throw ConfigError(ctx + ": expected a nonempty array of matrices");
  }
  std::vector<Eigen::MatrixXd> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(json_to_matrix(j[i], ctx + "[" + std::to_string(i) + "]"));
  }
  return out;
}

GraphSequence parse_graph(const Json& j, std::size_t agents, std::uint64_t seed) {
  Fields f(j, "graph");
  const auto type = f.get<std::string>("type");
  if (const Json* declared = f.optional_raw("agents")) {
    if (!declared->is_number_unsigned() || declared->get<std::size_t>() != agents) {
      throw ValidationError("graph.agents must equal the number of operators (" +
                            std::to_string(agents) + ")");
    }
  }
  std::optional<std::size_t> window;
  if (f.has("window")) window = f.get<std::size_t>("window");
  GraphSequence g = catalog_call("graph", [&]() -> GraphSequence {
    if (type == "static") return graphs::static_graph(f.matrix("matrix"), window.value_or(1));
    if (type == "complete") return graphs::complete(agents);
    if (type == "rotating") return graphs::rotating(agents);
    if (type == "periodic") return graphs::periodic(matrix_array(f.raw("matrices"), "graph.matrices"), window);
    if (type == "random_pool") {
      return graphs::random_pool(matrix_array(f.raw("templates"), "graph.templates"),
                                 substream_seed(seed, "graph"));
    }
    if (type == "matrix_list") {
      const auto path = f.get<std::string>("path");
      std::ifstream in(path);
      if (!in) throw ConfigError("graph.path: cannot open '" + path + "'");
      std::vector<Eigen::MatrixXd> ms;
      try {
        ms = read_matrix_list(in);
      } catch (const std::runtime_error& e) {
        throw ConfigError("graph.path: " + std::string(e.what()));
      }
      return graphs::periodic(std::move(ms), window);
    }
    throw ConfigError("graph: unsupported type '" + type + "'");
  });
  f.finish();
  if (g.agents() != agents) {
    throw ValidationError("graph has " + std::to_string(g.agents()) +
                          " agents but the scenario has " + std::to_string(agents));
  }
  return g;
}

RelaxationSchedule parse_relaxation(const Json& j) {
  Fields f(j, "relaxation");
  const double floor = f.get<double>("floor");
  std::optional<RelaxationSchedule> out;
  int forms = 0;
  if (f.has("value")) {
    ++forms;
    out = RelaxationSchedule::constant(floor, f.get<double>("value"));
  }
  if (f.has("per_agent")) {
    ++forms;
    out = RelaxationSchedule::per_agent(floor, f.get<std::vector<double>>("per_agent"));
  }
  if (f.has("values")) {
    ++forms;
    out = RelaxationSchedule(floor, f.get<std::vector<std::vector<double>>>("values"));
  }
  f.finish();
  if (forms != 1) {
    throw ConfigError("relaxation: give exactly one of value, per_agent, values");
  }
  return *out;
}

ErrorModel parse_errors(const Json& j) {
  Fields f(j, "errors");
  const auto kind = f.get<std::string>("kind");
  ErrorModel e = catalog_call("errors", [&]() -> ErrorModel {
    if (kind == "zero") return ErrorModel::zero();
    if (kind == "geometric") {
      const double scale = f.get<double>("scale");
      return ErrorModel::geometric(scale, f.get<double>("ratio"));
    }
    if (kind == "power") {
      const double scale = f.get<double>("scale");
      return ErrorModel::power(scale, f.get<double>("exponent"));
    }
    if (kind == "custom") return ErrorModel::custom(f.get<std::vector<double>>("norms"));
    throw ConfigError("errors: unsupported kind '" + kind + "'");
  });
  f.finish();
  return e;
}

Eigen::VectorXd scalar_or_vector(const Json& j, std::size_t dim, const std::string& ctx) {
  if (j.is_number()) return Eigen::VectorXd::Constant(Eigen::Index(dim), j.get<double>());
  Eigen::VectorXd v = json_to_vector(j, ctx);
  if (std::size_t(v.size()) != dim) {
    throw ValidationError(ctx + ": expected " + std::to_string(dim) + " entries");
  }
  return v;
}

std::vector<Point> parse_initial(const Json& j, const LayoutPtr& layout,
                                 std::size_t agents, std::uint64_t seed) {
  Fields f(j, "initial");
  std::vector<Point> out;
  const std::size_t dim = layout->dim();
  if (const Json* pts = f.optional_raw("points")) {
    if (!pts->is_array() || (pts->size() != 1 && pts->size() != agents)) {
      throw ValidationError("initial.points: give one point or one per agent");
    }
    for (std::size_t i = 0; i < agents; ++i) {
      const Json& pj = (*pts)[pts->size() == 1 ? 0 : i];
      out.emplace_back(layout, scalar_or_vector(pj, dim, "initial.points"));
    }
  } else if (const Json* box = f.optional_raw("box")) {
    Fields b(*box, "initial.box");
    const Eigen::VectorXd lo = scalar_or_vector(b.raw("lo"), dim, "initial.box.lo");
    const Eigen::VectorXd hi = scalar_or_vector(b.raw("hi"), dim, "initial.box.hi");
    b.finish();
    if (!((lo.array() <= hi.array()).all())) {
      throw ValidationError("initial.box: lo exceeds hi");
    }
    for (std::size_t i = 0; i < agents; ++i) {
      Rng rng = make_rng(seed, "initial", i);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      Eigen::VectorXd x(lo.size());
      for (Eigen::Index c = 0; c < x.size(); ++c) x[c] = lo[c] + (hi[c] - lo[c]) * u(rng);
      out.emplace_back(layout, std::move(x));
    }
  } else {
    throw ConfigError("initial: give 'points' or 'box'");
  }
  f.finish();
  return out;
}

ValidationSettings parse_validation(const Json& j) {
  Fields f(j, "validation");
  ValidationSettings v;
  v.radius = f.get_or("radius", v.radius);
  v.pairs = f.get_or("pairs", v.pairs);
  v.samples = f.get_or("samples", v.samples);
  v.domain_starts = f.get_or("domain_starts", v.domain_starts);
  v.horizon = f.get_or("horizon", v.horizon);
  f.finish();
  if (!(v.radius > 0.0)) throw ValidationError("validation.radius must be positive");
  return v;
}

// S_j intersected with the interior of every other set.
bool interior_criterion(const std::vector<SetSpec>& sets, const Eigen::VectorXd& x) {
  constexpr double kMargin = 1e-9;
  for (std::size_t j = 0; j < sets.size(); ++j) {
    if (!sets[j].contains(x, 0.0)) continue;
    bool ok = true;
    for (std::size_t i = 0; i < sets.size() && ok; ++i) {
      if (i != j) ok = sets[i].interior(x, kMargin);
    }
    if (ok) return true;
  }
  return false;
}

std::optional<Eigen::VectorXd> find_witness(const std::vector<SetSpec>& sets,
                                            const LayoutPtr& layout, double radius,
                                            std::uint64_t seed) {
  std::vector<Eigen::VectorXd> candidates;
  for (const auto& s : sets) {
    if (s.kind == SetSpec::Kind::ball) candidates.push_back(s.a);
    if (s.kind == SetSpec::Kind::box) candidates.push_back((s.a + s.hi) / 2.0);
  }
  for (const auto& p : sample_ball(layout, radius, 4000, substream_seed(seed, "witness"))) {
    candidates.push_back(p.coords());
  }
  for (const auto& x : candidates) {
    if (interior_criterion(sets, x)) return x;
    // Pulling a candidate onto one set can land it inside the others.
    for (const auto& s : sets) {
      const auto b = set_op(s);
      const Eigen::VectorXd y = b.op.eval(Point(layout, x)).coords();
      if (interior_criterion(sets, y)) return y;
    }
  }
  return std::nullopt;
}

bool contains_str(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

// ---------------------------------------------------------------------------
// Scenario

Scenario::Scenario(OperatorSet ops, GraphSequence graph,
                   RelaxationSchedule schedule, ErrorModel errors)
    : ops_(std::move(ops)),
      graph_(std::move(graph)),
      schedule_(std::move(schedule)),
      errors_(std::move(errors)) {}

Problem Scenario::problem() const {
  Problem p;
  p.ops = &ops_;
  p.graph = &graph_;
  p.schedule = schedule_;
  p.errors = errors_;
  p.blocks = blocks_;
  p.initial = initial_;
  return p;
}

Scenario build_scenario(const Json& spec, std::uint64_t seed) {
  Fields f(spec, "scenario");
  const auto name = f.get_or<std::string>("name", "custom");
  const auto dim = f.get<std::size_t>("dimension");
  if (dim == 0) throw ValidationError("scenario.dimension must be positive");

  LayoutPtr layout = BlockLayout::single(dim);
  if (f.has("block_sizes")) {
    auto sizes = f.get<std::vector<std::size_t>>("block_sizes");
    std::size_t total = 0;
    for (auto s : sizes) {
      if (s == 0) throw ValidationError("block_sizes entries must be positive");
      total += s;
    }
    if (total != dim) throw ValidationError("block_sizes must sum to the dimension");
    layout = std::make_shared<const BlockLayout>(std::move(sizes));
  }

  const Json& ops_json = f.raw("operators");
  if (!ops_json.is_array() || ops_json.empty()) {
    throw ConfigError("scenario.operators: expected a nonempty array");
  }
  std::vector<BuiltOp> built;
  for (std::size_t i = 0; i < ops_json.size(); ++i) {
    built.push_back(parse_operator(ops_json[i], dim,
                                   "operators[" + std::to_string(i) + "]"));
  }
  const std::size_t agents = built.size();

  // X* oracle.
  PointMap common;
  std::string solution = "auto";
  std::optional<Eigen::VectorXd> solution_point;
  if (const Json* s = f.optional_raw("solution")) {
    if (s->is_string()) {
      solution = s->get<std::string>();
      if (solution != "auto" && solution != "none") {
        throw ConfigError("scenario.solution: expected auto, none or {point}");
      }
    } else {
      Fields sf(*s, "solution");
      solution_point = sf.vector("point");
      sf.finish();
      if (std::size_t(solution_point->size()) != dim) {
        throw ValidationError("solution.point has the wrong dimension");
      }
      solution = "point";
    }
  }
  if (solution == "auto") {
    bool any_constraint = false;
    for (const auto& b : built) {
      any_constraint = any_constraint || !b.fixed.in_rows.empty() || !b.fixed.eq_rows.empty();
    }
    if (auto poly = polyhedral_solution(built, dim)) {
      if (!any_constraint) {
        common = [](const Point& x) { return x; };
      } else {
        if (!poly->nonempty()) {
          throw ValidationError("operators have no common fixed point (X* is empty)");
        }
        common = [p = *poly](const Point& x) { return x.with_coords(p.project(x.coords())); };
      }
    } else if (built.front().op.has_fixed_projector() &&
               std::all_of(ops_json.begin(), ops_json.end(),
                           [&](const Json& o) { return o == ops_json.front(); })) {
      // Identical operators share one fixed set.
      common = [op = built.front().op](const Point& x) { return op.project_fixed(x); };
    }
  } else if (solution == "point") {
    common = [v = *solution_point](const Point& x) { return x.with_coords(v); };
  }

  std::vector<NonexpansiveOp> op_list;
  std::vector<SetSpec> sets;
  for (auto& b : built) {
    op_list.push_back(b.op);
    if (b.set) sets.push_back(*b.set);
  }
  if (sets.size() != agents) sets.clear();

  GraphSequence graph = parse_graph(f.raw("graph"), agents, seed);
  RelaxationSchedule schedule = catalog_call("relaxation", [&] {
    return parse_relaxation(f.raw("relaxation"));
  });
  ErrorModel errors = f.has("errors") ? parse_errors(f.raw("errors")) : ErrorModel::zero();

  Scenario s(OperatorSet(std::move(op_list), std::move(common)), std::move(graph),
             std::move(schedule), std::move(errors));
  s.name_ = name;
  s.spec_ = spec;
  s.seed_ = seed;
  s.layout_ = layout;
  s.sets_ = std::move(sets);

  if (const Json* bj = f.optional_raw("blocks")) {
    Fields bf(*bj, "blocks");
    auto probs = bf.get<std::vector<double>>("probs");
    bf.finish();
    s.blocks_ = catalog_call("blocks", [&] { return BlockScheme(std::move(probs)); });
    if (s.blocks_->blocks() != layout->blocks()) {
      throw ValidationError("blocks.probs has " + std::to_string(s.blocks_->blocks()) +
                            " entries but the layout has " +
                            std::to_string(layout->blocks()) + " blocks");
    }
  }

  s.initial_ = parse_initial(f.raw("initial"), layout, agents, seed);
  if (f.has("expects")) s.expects_ = f.get<std::vector<std::string>>("expects");
  if (const Json* vj = f.optional_raw("validation")) s.validation_ = parse_validation(*vj);

  std::optional<Eigen::VectorXd> declared;
  if (f.has("interior_witness")) {
    declared = f.vector("interior_witness");
    if (std::size_t(declared->size()) != dim) {
      throw ValidationError("interior_witness has the wrong dimension");
    }
  }
  f.finish();

  if (!s.sets_.empty()) {
    if (declared) {
      if (interior_criterion(s.sets_, *declared)) s.witness_ = declared;
    } else {
      s.witness_ = find_witness(s.sets_, layout, s.validation_.radius, seed);
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Presets

Json graph_spec_json(const std::string& type, const Json& params) {
  Json j = params.is_object() ? params : Json::object();
  j["type"] = type;
  return j;
}

namespace {

Json linear_equation_doc(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                         std::size_t agents, const Json& graph_spec) {
  if (a.rows() != b.size()) throw ValidationError("linear system: rows(A) != len(b)");
  if (agents == 0 || agents > std::size_t(a.rows())) {
    throw ValidationError("linear system: cannot split " + std::to_string(a.rows()) +
                          " rows into " + std::to_string(agents) +
                          " nonempty blocks");
  }
  if (!AffineSet(a, b).consistent()) {
    throw ValidationError("linear system is inconsistent");
  }
  const auto rows = std::size_t(a.rows());
  Json ops = Json::array();
  for (std::size_t i = 0; i < agents; ++i) {
    const std::size_t r0 = i * rows / agents, r1 = (i + 1) * rows / agents;
    const auto cnt = Eigen::Index(r1 - r0);
    ops.push_back({{"type", "linear_equation"},
                   {"A", matrix_to_json(a.middleRows(Eigen::Index(r0), cnt))},
                   {"b", vector_to_json(b.segment(Eigen::Index(r0), cnt))}});
  }
  return {{"name", "linear-equation"},
          {"dimension", a.cols()},
          {"operators", ops},
          {"graph", graph_spec},
          {"relaxation", {{"floor", 0.25}, {"value", 0.5}}},
          {"errors", {{"kind", "zero"}}},
          {"initial", {{"box", {{"lo", -5.0}, {"hi", 5.0}}}}},
          {"expects", {"assumption1", "assumption2"}}};
}

Json feasibility_doc(const std::vector<SetSpec>& sets, std::size_t agents,
                     const Json& graph_spec) {
  if (sets.empty()) throw ValidationError("feasibility scenario needs at least one set");
  if (sets.size() != agents) {
    throw ValidationError("feasibility scenario needs one set per agent");
  }
  Json ops = Json::array();
  std::size_t dim = 0;
  for (const auto& s : sets) {
    ops.push_back(s.to_json());
    dim = std::size_t(s.kind == SetSpec::Kind::affine ? s.mat.cols() : s.a.size());
  }
  return {{"name", "feasibility"},
          {"dimension", dim},
          {"operators", ops},
          {"graph", graph_spec},
          {"relaxation", {{"floor", 0.25}, {"value", 0.5}}},
          {"errors", {{"kind", "zero"}}},
          {"initial", {{"box", {{"lo", 2.0}, {"hi", 5.0}}}}},
          {"expects", {"assumption1", "assumption2"}}};
}

Json example1_doc() {
  return {{"name", "example1"},
          {"dimension", 1},
          {"operators", {{{"type", "example1_square"}}, {{"type", "example1_interval"}}}},
          {"graph", graph_spec_json("complete")},
          {"relaxation", {{"floor", 0.25}, {"value", 0.5}}},
          {"errors", {{"kind", "zero"}}},
          {"initial", {{"points", {{0.9}, {0.9}}}}},
          {"expects", {"assumption1", "power_regular"}},
          {"validation", {{"radius", 1.0}}}};
}

// Even/odd steps each carry one directed edge; their union is strongly
// connected, so Q = 2.
Json alternating_pair_graph() {
  return graph_spec_json("periodic",
                         {{"matrices", {{{1.0, 0.0}, {0.5, 0.5}}, {{0.5, 0.5}, {0.0, 1.0}}}},
                          {"window", 2}});
}

// Two halfspaces whose unit normals have disjoint supports (first and second
// half of the coordinates), both at offset 1.
std::vector<SetSpec> two_halfspaces(std::size_t dim) {
  if (dim < 2) throw ConfigError("feasibility-2halfspace: dimension must be at least 2");
  const auto n = Eigen::Index(dim), h = Eigen::Index((dim + 1) / 2);
  Eigen::VectorXd a1 = Eigen::VectorXd::Zero(n), a2 = Eigen::VectorXd::Zero(n);
  a1.head(h).setConstant(1.0 / std::sqrt(double(h)));
  a2.tail(n - h).setConstant(1.0 / std::sqrt(double(n - h)));
  return {SetSpec::halfspace(a1, 1.0), SetSpec::halfspace(a2, 1.0)};
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"feasibility-2halfspace", "linear-3x3", "example1", "ball-box-3d"};
}

Json preset_spec(const std::string& name, const Json& params) {
  Fields p(params, "params");
  Json doc;
  if (name == "feasibility-2halfspace") {
    const auto dim = p.get_or<std::size_t>("dimension", 2);
    doc = feasibility_doc(two_halfspaces(dim), 2, alternating_pair_graph());
    doc["name"] = name;
    doc["errors"] = {{"kind", "geometric"}, {"scale", 0.01}, {"ratio", 0.9}};
    doc["expects"] = {"assumption1", "assumption2", "regularity"};
  } else if (name == "linear-3x3") {
    Eigen::MatrixXd a(3, 3);
    a << 4, 1, 0, 1, 3, 1, 0, 1, 2;
    const Eigen::Vector3d b(1, 2, 3);
    const auto agents = p.get_or<std::size_t>("agents", 3);
    doc = linear_equation_doc(a, b, agents,
                              agents == 1 ? graph_spec_json("complete")
                                          : graph_spec_json("rotating"));
    doc["name"] = name;
    doc["errors"] = {{"kind", "geometric"}, {"scale", 0.01}, {"ratio", 0.9}};
  } else if (name == "example1") {
    doc = example1_doc();
  } else if (name == "ball-box-3d") {
    std::vector<SetSpec> sets{
        SetSpec::ball(Eigen::Vector3d::Zero(), 2.0),
        SetSpec::box(Eigen::Vector3d(-1, -1, 0.5), Eigen::Vector3d(1, 1, 3))};
    Eigen::MatrixXd w(2, 2);
    w << 0.6, 0.4, 0.4, 0.6;
    doc = feasibility_doc(sets, 2, graph_spec_json("static", {{"matrix", matrix_to_json(w)}}));
    doc["name"] = name;
    doc["errors"] = {{"kind", "geometric"}, {"scale", 0.01}, {"ratio", 0.9}};
    doc["initial"] = {{"box", {{"lo", -4.0}, {"hi", 4.0}}}};
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  p.finish();
  return doc;
}

Json resolve_scenario_spec(const Json& ref) {
  if (!ref.is_object()) throw ConfigError("scenario: expected an object");
  if (!ref.contains("preset")) return ref;
  Fields f(ref, "scenario");
  const auto name = f.get<std::string>("preset");
  const Json* params = f.optional_raw("params");
  Json doc = preset_spec(name, params ? *params : Json::object());
  if (const Json* over = f.optional_raw("overrides")) {
    if (!over->is_object()) throw ConfigError("scenario.overrides: expected an object");
    doc.merge_patch(*over);
  }
  f.finish();
  return doc;
}

Scenario build_linear_equation_scenario(const Eigen::MatrixXd& a,
                                        const Eigen::VectorXd& b,
                                        std::size_t agents,
                                        const Json& graph_spec,
                                        std::uint64_t seed) {
  return build_scenario(linear_equation_doc(a, b, agents, graph_spec), seed);
}

Scenario build_feasibility_scenario(const std::vector<SetSpec>& sets,
                                    std::size_t agents, const Json& graph_spec,
                                    std::uint64_t seed) {
  return build_scenario(feasibility_doc(sets, agents, graph_spec), seed);
}

Scenario build_example1_scenario(std::uint64_t seed) {
  return build_scenario(example1_doc(), seed);
}

// ---------------------------------------------------------------------------
// Validation

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

DomainPredicate joint_domain(const OperatorSet& ops) {
  bool any = false;
  for (const auto& op : ops.ops()) any = any || op.has_domain();
  if (!any) return {};
  return [&ops](const Point& x) {
    for (const auto& op : ops.ops()) {
      if (!op.in_domain(x)) return false;
    }
    return true;
  };
}

}  // namespace

ValidationReport validate_scenario(const Scenario& s) {
  ValidationReport rep;
  const auto& v = s.validation();
  const auto& ops = s.ops();
  auto add = [&rep](std::string check, bool pass, std::string detail) {
    rep.entries.push_back({std::move(check), pass, std::move(detail)});
    rep.pass = rep.pass && pass;
  };

  {
    const auto& g = s.graph();
    std::size_t horizon = v.horizon;
    if (horizon == 0) {
      horizon = std::max<std::size_t>(64, 4 * g.window());
      if (g.period()) horizon = std::max(horizon, 2 * *g.period() + g.window());
    }
    const auto r = check_assumption1(g, horizon);
    std::string detail = r.pass ? "Q=" + std::to_string(g.window()) + " checked to k=" +
                                      std::to_string(horizon)
                                : r.rule + " at k=" + std::to_string(*r.first_violation) +
                                      ": " + r.message;
    add("assumption1", r.pass, detail);
  }

  const DomainPredicate dom = joint_domain(ops);
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const auto& op = ops[i];
    const std::string tag = "nonexpansive[" + std::to_string(i) + "]";
    if (!op.checked_nonexpansive()) {
      add(tag, true, op.name() + " exempt: not globally nonexpansive on its domain");
      continue;
    }
    const auto r = check_nonexpansive(op, v.radius, v.pairs,
                                      substream_seed(s.seed(), "validation/nonexpansive", i));
    add(tag, r.violations == 0,
        op.name() + ": " + std::to_string(r.violations) + "/" + std::to_string(r.pairs) +
            " violations, worst ratio " + fmt(r.worst_ratio));
  }

  const auto samples = sample_ball(s.layout(), v.radius, v.samples,
                                   substream_seed(s.seed(), "validation/fixed"), dom);
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const auto& op = ops[i];
    if (!op.has_fixed_projector()) continue;
    std::size_t bad = 0;
    for (const auto& x : samples) {
      const Point y = op.project_fixed(x);
      const double scale = 1e-9 * (1.0 + norm(y));
      if (!op.in_domain(y) || distance(op.eval(y), y) > scale ||
          distance(op.project_fixed(y), y) > scale) {
        ++bad;
      }
    }
    add("fixed_projector[" + std::to_string(i) + "]", bad == 0,
        std::to_string(bad) + "/" + std::to_string(samples.size()) + " inconsistent");
  }

  if (ops.has_common_projector()) {
    std::size_t bad = 0;
    for (const auto& x : samples) {
      const Point q = ops.project_common(x);
      const double dstar = distance(q, x);
      for (const auto& op : ops.ops()) {
        const double scale = 1e-9 * (1.0 + norm(q));
        if (!op.in_domain(q) || distance(op.eval(q), q) > scale) ++bad;
        if (op.has_fixed_projector() && op.distance_to_fixed(x) > dstar + 1e-9 * (1.0 + dstar)) {
          ++bad;
        }
      }
    }
    add("common_fixed_set", bad == 0,
        std::to_string(bad) + " violations over " + std::to_string(samples.size()) + " samples");
  }

  if (dom) {
    std::size_t bad = 0;
    for (const auto& x : s.initial()) bad += dom(x) ? 0 : 1;
    const auto starts = sample_ball(s.layout(), v.radius, v.domain_starts,
                                    substream_seed(s.seed(), "validation/domain"), dom);
    const double alphas[2] = {s.schedule().floor(), s.schedule().cap()};
    for (const auto& x : starts) {
      for (const auto& op : ops.ops()) {
        const Point t = op.eval(x);
        if (!dom(t)) ++bad;
        for (double a : alphas) {
          if (!dom(x + a * (t - x))) ++bad;
        }
      }
    }
    add("domain", bad == 0,
        std::to_string(bad) + " exits over " + std::to_string(starts.size()) +
            " random starts and the initial points");
  }

  const auto& exp = s.expects();
  if (!s.sets().empty()) {
    const bool ok = s.interior_witness().has_value();
    const bool required = contains_str(exp, "assumption2");
    add("assumption2", ok || !required,
        ok ? "interior-point criterion met" : "no interior witness found");
  } else if (contains_str(exp, "assumption2")) {
    // Finitely many polyhedral fixed sets of linearly regular maps.
    bool ok = ops.has_common_projector();
    for (const auto& op : ops.ops()) ok = ok && op.checked_nonexpansive() && !op.has_domain();
    add("assumption2", ok, ok ? "polyhedral fixed sets" : "cannot certify");
  }

  if (ops.has_common_projector() &&
      (contains_str(exp, "regularity") || contains_str(exp, "power_regular"))) {
    try {
      auto est = estimate_regularity(ops, v.radius, v.samples,
                                     substream_seed(s.seed(), "validation/regularity"));
      const bool ok = std::isfinite(est.nu) && std::isfinite(est.kappa_0);
      add("regularity", ok,
          "kappa_c=" + fmt(est.kappa_c) + " kappa_0=" + fmt(est.kappa_0) +
              " nu=" + fmt(est.nu));
      rep.regularity = std::move(est);
    } catch (const InsufficientDataError& e) {
      add("regularity", false, e.what());
    }
  }
  return rep;
}

}  // namespace fixnet

#include "fixnet/graph.hpp"

#include "fixnet/error.hpp"
#include "fixnet/seeds.hpp"
#include "fixnet/tolerances.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "fixnet/numfmt.hpp"

namespace fixnet {

GraphSequence::GraphSequence(std::size_t agents, Generator generator,
                             std::size_t window, double weight_floor,
                             std::string description,
                             std::optional<std::size_t> period)
    : agents_(agents),
      generator_(std::move(generator)),
      window_(window),
      weight_floor_(weight_floor),
      description_(std::move(description)),
      period_(period) {
  if (agents_ == 0) throw ShapeError("graph needs at least one agent");
  if (window_ == 0) throw std::invalid_argument("window Q must be positive");
  if (!(weight_floor_ > 0.0 && weight_floor_ < 1.0) && agents_ > 1) {
    throw std::invalid_argument("weight floor must lie in (0, 1)");
  }
  if (period_ && *period_ == 0) throw std::invalid_argument("period must be positive");
}

Eigen::MatrixXd GraphSequence::matrix(std::size_t k) const {
  Eigen::MatrixXd a = generator_(period_ ? k % *period_ : k);
  if (a.rows() != Eigen::Index(agents_) || a.cols() != Eigen::Index(agents_)) {
    throw ShapeError("generator produced a matrix of the wrong size");
  }
  return a;
}

Eigen::MatrixXd uniform_weights(const Eigen::MatrixXd& adjacency) {
  if (adjacency.rows() != adjacency.cols()) {
    throw ShapeError("adjacency matrix must be square");
  }
  const Eigen::Index n = adjacency.rows();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<Eigen::Index> support{i};
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i && adjacency(i, j) != 0.0) support.push_back(j);
    }
    const double w = 1.0 / double(support.size());
    for (Eigen::Index j : support) a(i, j) = w;
  }
  return a;
}

namespace graphs {

double positive_floor(const Eigen::MatrixXd& a, double current = 1.0) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a.data()[i] > 0.0) current = std::min(current, a.data()[i]);
  }
  return current;
}

// A floor of 1 only arises when every weight is 1 (self-loops only); any
// value in (0, 1) is then admissible.
double admissible_floor(double floor) { return floor >= 1.0 ? 0.5 : floor; }

GraphSequence static_graph(Eigen::MatrixXd a, std::size_t window) {
  const auto n = std::size_t(a.rows());
  const double floor = admissible_floor(positive_floor(a));
  return GraphSequence(
      n, [a = std::move(a)](std::size_t) { return a; }, window, floor,
      "static", std::size_t{1});
}

GraphSequence complete(std::size_t agents) {
  const auto n = Eigen::Index(agents);
  Eigen::MatrixXd a = Eigen::MatrixXd::Constant(n, n, 1.0 / double(agents));
  return GraphSequence(
      agents, [a = std::move(a)](std::size_t) { return a; }, 1,
      admissible_floor(1.0 / double(agents)), "complete", std::size_t{1});
}

GraphSequence rotating(std::size_t agents) {
  const auto n = Eigen::Index(agents);
  auto gen = [n](std::size_t k) {
    Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(n, n);
    if (n > 1) {
      const Eigen::Index from = Eigen::Index(k % std::size_t(n));
      const Eigen::Index to = (from + 1) % n;
      adj(to, from) = 1.0;
    }
    return uniform_weights(adj);
  };
  return GraphSequence(agents, gen, agents, admissible_floor(1.0 / double(agents)),
                       "rotating", agents);
}

GraphSequence periodic(std::vector<Eigen::MatrixXd> matrices,
                       std::optional<std::size_t> window) {
  if (matrices.empty()) throw std::invalid_argument("periodic graph needs matrices");
  const auto n = std::size_t(matrices.front().rows());
  double floor = 1.0;
  for (const auto& a : matrices) {
    if (std::size_t(a.rows()) != n || std::size_t(a.cols()) != n) {
      throw ShapeError("periodic graph matrices differ in size");
    }
    floor = positive_floor(a, floor);
  }
  const std::size_t period = matrices.size();
  return GraphSequence(
      n, [m = std::move(matrices)](std::size_t k) { return m[k % m.size()]; },
      window.value_or(period), admissible_floor(floor), "periodic", period);
}

GraphSequence random_pool(std::vector<Eigen::MatrixXd> templates,
                          std::uint64_t seed) {
  if (templates.empty()) throw std::invalid_argument("random pool needs templates");
  const auto n = std::size_t(templates.front().rows());
  std::vector<Eigen::MatrixXd> weighted;
  for (const auto& t : templates) {
    if (std::size_t(t.rows()) != n || std::size_t(t.cols()) != n) {
      throw ShapeError("random pool templates differ in size");
    }
    weighted.push_back(uniform_weights(t));
  }
  const std::size_t pool = weighted.size();
  auto gen = [weighted = std::move(weighted), seed](std::size_t k) {
    const std::size_t t = weighted.size();
    std::vector<std::size_t> perm(t);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng = make_rng(seed, "graph-block", k / t);
    // Fisher-Yates with explicit draws keeps the order platform-independent.
    for (std::size_t i = t; i > 1; --i) {
      std::swap(perm[i - 1], perm[rng() % i]);
    }
    return weighted[perm[k % t]];
  };
  return GraphSequence(n, gen, 2 * pool - 1, admissible_floor(1.0 / double(n)),
                       "random_pool");
}

}  // namespace graphs

bool strongly_connected(const Eigen::MatrixXd& support) {
  const Eigen::Index n = support.rows();
  if (n <= 1) return true;
  // Edge j -> i whenever support(i, j) != 0.
  auto sweep = [&](bool reverse) {
    std::vector<char> seen(std::size_t(n), 0);
    std::vector<Eigen::Index> stack{0};
    seen[0] = 1;
    Eigen::Index count = 1;
    while (!stack.empty()) {
      const Eigen::Index u = stack.back();
      stack.pop_back();
      for (Eigen::Index v = 0; v < n; ++v) {
        const double w = reverse ? support(u, v) : support(v, u);
        if (w != 0.0 && !seen[std::size_t(v)]) {
          seen[std::size_t(v)] = 1;
          ++count;
          stack.push_back(v);
        }
      }
    }
    return count == n;
  };
  return sweep(false) && sweep(true);
}

Assumption1Report check_assumption1(const GraphSequence& g,
                                    std::size_t horizon) {
  Assumption1Report rep;
  if (horizon < g.window()) {
    throw std::invalid_argument("horizon must be at least the window Q");
  }
  auto fail = [&rep](std::size_t k, std::string rule, std::string msg) {
    rep.pass = false;
    rep.first_violation = k;
    rep.rule = std::move(rule);
    rep.message = std::move(msg);
    return rep;
  };
  const Eigen::Index n = Eigen::Index(g.agents());
  const double floor = g.weight_floor();
  std::vector<Eigen::MatrixXd> mats;
  mats.reserve(horizon + g.window() + 1);
  for (std::size_t k = 0; k <= horizon + g.window(); ++k) {
    mats.push_back(g.matrix(k));
  }
  for (std::size_t k = 0; k <= horizon; ++k) {
    const Eigen::MatrixXd& a = mats[k];
    for (Eigen::Index i = 0; i < n; ++i) {
      std::ostringstream where;
      where << "k=" << k << " row " << i;
      if ((a.row(i).array() < 0.0).any()) {
        return fail(k, "nonnegative", "negative weight at " + where.str());
      }
      if (std::abs(a.row(i).sum() - 1.0) > tol::kSumAbs) {
        return fail(k, "row-stochastic", "row sum != 1 at " + where.str());
      }
      if (!(a(i, i) > 0.0)) {
        return fail(k, "positive-diagonal", "zero self-weight at " + where.str());
      }
      for (Eigen::Index j = 0; j < n; ++j) {
        if (a(i, j) > 0.0 && a(i, j) < floor - 1e-15) {
          return fail(k, "weight-floor",
                      "weight below declared floor at " + where.str());
        }
      }
    }
    // Union of G_{k+1} .. G_{k+Q}.
    Eigen::MatrixXd uni = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t l = 1; l <= g.window(); ++l) {
      uni += (mats[k + l].array() != 0.0).cast<double>().matrix();
    }
    if (!strongly_connected(uni)) {
      std::ostringstream msg;
      msg << "union of graphs " << k + 1 << ".." << k + g.window()
          << " is not strongly connected";
      return fail(k, "joint-connectivity", msg.str());
    }
  }
  return rep;
}

Eigen::MatrixXd backward_product(const GraphSequence& g, std::size_t s,
                                 std::size_t k) {
  if (s < k) throw std::invalid_argument("backward_product needs s >= k");
  const Eigen::Index n = Eigen::Index(g.agents());
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n, n);
  for (std::size_t t = k; t < s; ++t) p = g.matrix(t) * p;
  return p;
}

void write_matrix_list(std::ostream& out, const GraphSequence& g,
                       std::size_t last_k) {
  out << "# fixnet matrix-list v1 agents=" << g.agents() << "\n";
  for (std::size_t k = 0; k <= last_k; ++k) {
    const Eigen::MatrixXd a = g.matrix(k);
    out << k;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      for (Eigen::Index j = 0; j < a.cols(); ++j) {
        out << ',' << format_double(a(i, j));
      }
    }
    out << '\n';
  }
}

std::vector<Eigen::MatrixXd> read_matrix_list(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# fixnet matrix-list v1", 0) != 0) {
    throw ConfigError("matrix list: missing header");
  }
  const auto pos = line.find("agents=");
  if (pos == std::string::npos) throw ConfigError("matrix list: no agent count");
  const auto n = Eigen::Index(std::stoul(line.substr(pos + 7)));
  std::vector<Eigen::MatrixXd> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_fields(line, ',');
    if (fields.size() != std::size_t(1 + n * n)) {
      throw ConfigError("matrix list: wrong field count");
    }
    if (parse_size(fields[0]) != out.size()) {
      throw ConfigError("matrix list: steps out of order");
    }
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        a(i, j) = parse_double(fields[std::size_t(1 + i * n + j)]);
      }
    }
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace fixnet

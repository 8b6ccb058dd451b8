#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "ctsplit/harness.hpp"
#include "ctsplit/instances.hpp"
#include "ctsplit/metric.hpp"
#include "ctsplit/oracles.hpp"

namespace ctsplit::harness {
namespace {

int line_of(const YAML::Node& n) { return n.Mark().line + 1; }

[[noreturn]] void fail(const YAML::Node& n, const std::string& msg) { throw ConfigError(line_of(n), msg); }

void check_keys(const YAML::Node& map, const std::string& section, const std::set<std::string>& allowed) {
  if (!map.IsMap()) fail(map, "'" + section + "' must be a mapping");
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(kv.first, "unknown key '" + key + "' in '" + section + "'");
  }
}

YAML::Node require(const YAML::Node& map, const std::string& key, const std::string& section) {
  YAML::Node n = map[key];
  if (!n) fail(map, "missing required key '" + key + "' in '" + section + "'");
  return n;
}

template <typename T>
T scalar(const YAML::Node& n, const std::string& what) {
  if (!n.IsScalar()) fail(n, "'" + what + "' must be a scalar");
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    fail(n, "'" + what + "' has an invalid value '" + n.Scalar() + "'");
  }
}

double finite_number(const YAML::Node& n, const std::string& what) {
  const double v = scalar<double>(n, what);
  if (!std::isfinite(v)) fail(n, "'" + what + "' must be finite");
  return v;
}

double positive_number(const YAML::Node& n, const std::string& what) {
  const double v = finite_number(n, what);
  if (!(v > 0)) fail(n, "'" + what + "' must be positive");
  return v;
}

int positive_int(const YAML::Node& n, const std::string& what) {
  const int v = scalar<int>(n, what);
  if (v <= 0) fail(n, "'" + what + "' must be a positive integer");
  return v;
}

VectorXd vector_of(const YAML::Node& n, const std::string& what, Eigen::Index expected) {
  if (!n.IsSequence()) fail(n, "'" + what + "' must be a list of numbers");
  if (Eigen::Index(n.size()) != expected)
    fail(n, "'" + what + "' has " + std::to_string(n.size()) + " entries, expected " + std::to_string(expected));
  VectorXd v(expected);
  for (std::size_t i = 0; i < n.size(); ++i) v[Eigen::Index(i)] = finite_number(n[i], what);
  return v;
}

LinearMapXd matrix_of(const YAML::Node& n) {
  if (!n.IsSequence() || n.size() == 0) fail(n, "'A' must be a non-empty list of rows");
  const std::size_t rows = n.size();
  if (!n[0].IsSequence() || n[0].size() == 0) fail(n[0], "rows of 'A' must be non-empty lists");
  const std::size_t cols = n[0].size();
  MatrixXd M(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const VectorXd r = vector_of(n[i], "A row", Eigen::Index(cols));
    M.row(Eigen::Index(i)) = r.transpose();
  }
  return LinearMapXd(std::move(M));
}

ProxFunctionXd function_of(const YAML::Node& n, const std::string& name, Eigen::Index dim) {
  if (!n.IsMap()) fail(n, "'" + name + "' must be a mapping with a 'kind'");
  const auto kind = scalar<std::string>(require(n, "kind", name), name + ".kind");
  try {
    if (kind == "l1") {
      check_keys(n, name, {"kind", "mu"});
      return ProxFunctionXd::l1(positive_number(require(n, "mu", name), name + ".mu"), dim);
    }
    if (kind == "quadratic") {
      check_keys(n, name, {"kind", "center", "weight"});
      const double w = n["weight"] ? positive_number(n["weight"], name + ".weight") : 1.0;
      return ProxFunctionXd::quadratic_distance(vector_of(require(n, "center", name), name + ".center", dim), w);
    }
    if (kind == "point") {
      check_keys(n, name, {"kind", "point"});
      return ProxFunctionXd::indicator_point(vector_of(require(n, "point", name), name + ".point", dim));
    }
    if (kind == "box") {
      check_keys(n, name, {"kind", "lower", "upper"});
      return ProxFunctionXd::indicator_box(vector_of(require(n, "lower", name), name + ".lower", dim),
                                           vector_of(require(n, "upper", name), name + ".upper", dim));
    }
    if (kind == "zero") {
      check_keys(n, name, {"kind"});
      return ProxFunctionXd::zero(dim);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    fail(n, name + ": " + e.what());
  }
  fail(n["kind"], "unknown function kind '" + kind + "' (expected l1|quadratic|point|box|zero)");
}

ProblemConfig problem_of(const YAML::Node& n) {
  ProblemConfig p;
  const auto kind = scalar<std::string>(require(n, "kind", "problem"), "problem.kind");
  if (kind == "lasso") {
    check_keys(n, "problem", {"kind", "rows", "cols", "seed", "mu", "unit_norm"});
    p.kind = ProblemKind::Lasso;
    p.mu = positive_number(require(n, "mu", "problem"), "problem.mu");
  } else if (kind == "quadratic") {
    check_keys(n, "problem", {"kind", "rows", "cols", "seed", "weight_f", "weight_g", "unit_norm"});
    p.kind = ProblemKind::Quadratic;
    if (n["weight_f"]) p.weight_f = positive_number(n["weight_f"], "problem.weight_f");
    if (n["weight_g"]) p.weight_g = positive_number(n["weight_g"], "problem.weight_g");
  } else if (kind == "custom-dense") {
    check_keys(n, "problem", {"kind", "A", "f", "g"});
    p.kind = ProblemKind::CustomDense;
    p.A = matrix_of(require(n, "A", "problem"));
    p.rows = int(p.A->rows());
    p.cols = int(p.A->cols());
    p.f = function_of(require(n, "f", "problem"), "f", p.A->cols());
    p.g = function_of(require(n, "g", "problem"), "g", p.A->rows());
    return p;
  } else {
    fail(n["kind"], "unknown problem kind '" + kind + "' (expected lasso|quadratic|custom-dense)");
  }
  p.rows = positive_int(require(n, "rows", "problem"), "problem.rows");
  p.cols = positive_int(require(n, "cols", "problem"), "problem.cols");
  p.seed = scalar<std::uint64_t>(require(n, "seed", "problem"), "problem.seed");
  if (n["unit_norm"]) p.unit_norm = scalar<bool>(n["unit_norm"], "problem.unit_norm");
  return p;
}

SolverSection solver_of(const YAML::Node& n) {
  check_keys(n, "solver", {"kernel", "lambda", "lambda_x", "lambda_z", "lambda_y"});
  SolverSection s;
  const auto kernel = scalar<std::string>(require(n, "kernel", "solver"), "solver.kernel");
  if (kernel == "ct")
    s.kernel = Kernel::ChenTeboulle;
  else if (kernel == "vmetric")
    s.kernel = Kernel::VMetric;
  else
    fail(n["kernel"], "unknown kernel '" + kernel + "' (expected ct|vmetric)");

  const bool has_split = n["lambda_x"] || n["lambda_z"] || n["lambda_y"];
  if (n["lambda"] && has_split) fail(n, "give either 'lambda' or 'lambda_x/lambda_z/lambda_y', not both");
  if (has_split) {
    if (s.kernel == Kernel::ChenTeboulle) fail(n, "the ct kernel takes a single 'lambda'");
    s.auto_step = false;
    s.steps = {positive_number(require(n, "lambda_x", "solver"), "solver.lambda_x"),
               positive_number(require(n, "lambda_z", "solver"), "solver.lambda_z"),
               positive_number(require(n, "lambda_y", "solver"), "solver.lambda_y")};
    return s;
  }
  const YAML::Node l = n["lambda"];
  if (!l || (l.IsScalar() && l.Scalar() == "auto")) {
    s.auto_step = true;
  } else {
    s.auto_step = false;
    s.steps = StepSizes<double>::uniform(positive_number(l, "solver.lambda"));
  }
  return s;
}

RunSection run_of(const YAML::Node& n) {
  check_keys(n, "run", {"max_iter", "tol", "output", "record_v_norm"});
  RunSection r;
  if (n["max_iter"]) {
    r.max_iter = scalar<int>(n["max_iter"], "run.max_iter");
    if (r.max_iter < 0) fail(n["max_iter"], "'run.max_iter' must be nonnegative");
  }
  if (n["tol"]) r.tol = positive_number(n["tol"], "run.tol");
  if (n["output"]) r.output = scalar<std::string>(n["output"], "run.output");
  if (n["record_v_norm"]) r.record_v_norm = scalar<bool>(n["record_v_norm"], "run.record_v_norm");
  return r;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.mark.line + 1, e.msg);
  }
  if (!root || !root.IsMap()) throw ConfigError(1, "configuration must be a mapping");
  check_keys(root, "top level", {"problem", "solver", "run"});
  RunConfig cfg;
  cfg.problem = problem_of(require(root, "problem", "top level"));
  if (root["solver"]) cfg.solver = solver_of(root["solver"]);
  if (root["run"]) cfg.run = run_of(root["run"]);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot read configuration file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

BuiltProblem build_problem(const ProblemConfig& cfg) {
  switch (cfg.kind) {
    case ProblemKind::Lasso: {
      const auto inst = make_lasso(cfg.rows, cfg.cols, cfg.seed, cfg.mu, cfg.unit_norm);
      BuiltProblem out{inst.problem(), std::nullopt};
      if (cfg.cols <= 12) out.reference = lasso_oracle(inst.M, inst.b, inst.mu).state();
      return out;
    }
    case ProblemKind::Quadratic: {
      auto P = make_quadratic(cfg.rows, cfg.cols, cfg.seed, cfg.weight_f, cfg.weight_g);
      if (cfg.unit_norm) P = SaddleProblem<double>(P.f(), P.g(), normalized(P.A()));
      BuiltProblem out{P, quadratic_saddle_oracle(P).state()};
      return out;
    }
    case ProblemKind::CustomDense: {
      SaddleProblem<double> P(*cfg.f, *cfg.g, *cfg.A);
      BuiltProblem out{P, std::nullopt};
      if (P.f().is_quadratic() && P.g().is_quadratic()) {
        out.reference = quadratic_saddle_oracle(P).state();
      } else if (P.f().is<kinds::L1<double>>() && P.g().is_quadratic() && P.n() <= 12) {
        const auto& g = std::get<kinds::QuadraticDistance<double>>(P.g().kind());
        if (g.weight == 1.0)
          out.reference = lasso_oracle(P.A(), g.center, std::get<kinds::L1<double>>(P.f().kind()).mu).state();
      }
      return out;
    }
  }
  throw ConfigError(0, "unknown problem kind");
}

StepSizes<double> resolve_steps(const SolverSection& solver, const SaddleProblem<double>& P) {
  if (!solver.auto_step) return solver.steps;
  return StepSizes<double>::uniform(0.99 * stepsize_bound_new(op_norm(P.A())));
}

SolverConfig<double> solver_config(const RunConfig& cfg, const BuiltProblem& built) {
  SolverConfig<double> sc;
  sc.kernel = cfg.solver.kernel;
  sc.steps = resolve_steps(cfg.solver, built.problem);
  sc.max_iter = cfg.run.max_iter;
  sc.tol_fixed_point = cfg.run.tol;
  if (cfg.run.record_v_norm) {
    if (!built.reference) throw ConfigError(0, "record_v_norm needs a problem with an oracle reference point");
    sc.record_v_norm = true;
    sc.reference_point = built.reference;
  }
  return sc;
}

}  // namespace ctsplit::harness

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ctsplit/saddle.hpp"
#include "ctsplit/solvers.hpp"

namespace ctsplit::harness {

/// Malformed or schema-invalid run configuration. `line` is 1-based, 0 when
/// no location is known.
class ConfigError : public Error {
 public:
  ConfigError(int line, const std::string& msg) : Error(msg), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

enum class ProblemKind { Lasso, Quadratic, CustomDense };

struct ProblemConfig {
  ProblemKind kind = ProblemKind::Lasso;
  int rows = 0;
  int cols = 0;
  std::uint64_t seed = 0;
  double mu = 1.0;
  double weight_f = 1.0;
  double weight_g = 1.0;
  bool unit_norm = false;
  // custom-dense only
  std::optional<LinearMapXd> A;
  std::optional<ProxFunctionXd> f;
  std::optional<ProxFunctionXd> g;
};

struct SolverSection {
  Kernel kernel = Kernel::VMetric;
  bool auto_step = true;
  StepSizes<double> steps = StepSizes<double>::uniform(0.5);
};

struct RunSection {
  int max_iter = 10000;
  double tol = 1e-10;
  std::string output;
  bool record_v_norm = false;
};

struct RunConfig {
  ProblemConfig problem;
  SolverSection solver;
  RunSection run;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

struct BuiltProblem {
  SaddleProblem<double> problem;
  /// Oracle saddle point when the problem family has one.
  std::optional<SaddleStateXd> reference;
};

BuiltProblem build_problem(const ProblemConfig& cfg);

/// Resolves "auto" to 0.99 * stepsize_bound_new(op_norm(A)) for all three steps.
StepSizes<double> resolve_steps(const SolverSection& solver, const SaddleProblem<double>& P);

SolverConfig<double> solver_config(const RunConfig& cfg, const BuiltProblem& built);

/// Round-trip formatting (17 significant digits); +inf prints as "inf".
std::string format_number(double v);

void write_trace_csv(std::ostream& os, const IterationTrace<double>& trace);

enum ExitCode : int { kConverged = 0, kConfigError = 1, kIterLimit = 2, kDiverged = 3 };

int exit_code(StopReason r);

struct CommandOptions {
  std::optional<std::string> output;
  bool quiet = false;
};

int cmd_solve(const std::string& config_path, const CommandOptions& opts, std::ostream& out, std::ostream& err);

int cmd_bounds(double start, double stop, double step, std::ostream& out, std::ostream& err);

struct SweepRow {
  double lambda;
  bool pd_certified;
  StopReason reason;
  int iterations;
  double final_kkt_max;
};

std::vector<SweepRow> sweep(const RunConfig& cfg, const std::vector<double>& lambdas);

int cmd_sweep(const std::string& config_path, const std::vector<double>& lambdas, const CommandOptions& opts,
              std::ostream& out, std::ostream& err);

/// Parses "0.4,0.6,0.7" (whitespace tolerated). Throws ConfigError.
std::vector<double> parse_lambda_list(const std::string& text);

}  // namespace ctsplit::harness

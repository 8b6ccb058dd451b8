#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>
#include <ostream>
#include <sstream>

#include "ctsplit/harness.hpp"
#include "ctsplit/metric.hpp"

namespace ctsplit::harness {

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trace_csv(std::ostream& os, const IterationTrace<double>& trace) {
  os << "iter,r_f,r_g,r_c,fixed_point_res,primal_obj,v_dist\n";
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const auto& r = trace[k];
    os << (k + 1) << ',' << format_number(r.kkt.r_f) << ',' << format_number(r.kkt.r_g) << ','
       << format_number(r.kkt.r_c) << ',' << format_number(r.fixed_point_res) << ','
       << format_number(r.primal_obj) << ',' << (r.v_dist ? format_number(*r.v_dist) : "") << '\n';
  }
}

int exit_code(StopReason r) {
  switch (r) {
    case StopReason::Converged: return kConverged;
    case StopReason::IterLimit: return kIterLimit;
    case StopReason::Diverged: return kDiverged;
  }
  return kConfigError;
}

namespace {

void report_config_error(std::ostream& err, const std::string& path, const ConfigError& e) {
  err << path;
  if (e.line() > 0) err << ':' << e.line();
  err << ": error: " << e.what() << '\n';
}

void warn_if_boundary(const SaddleProblem<double>& P, const StepSizes<double>& steps, std::ostream& err,
                      bool quiet) {
  if (quiet) return;
  if (classify_definiteness(kernel_metric(P, steps)) == Definiteness::Boundary)
    err << "warning: step sizes sit on the positivity boundary of the metric; V is singular\n";
}

}  // namespace

int cmd_solve(const std::string& config_path, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  std::optional<BuiltProblem> built;
  SolverConfig<double> sc;
  try {
    cfg = load_config(config_path);
    built.emplace(build_problem(cfg.problem));
    sc = solver_config(cfg, *built);
    validate(built->problem, sc);
  } catch (const ConfigError& e) {
    report_config_error(err, config_path, e);
    return kConfigError;
  } catch (const Error& e) {
    err << config_path << ": error: " << e.what() << '\n';
    return kConfigError;
  }
  warn_if_boundary(built->problem, sc.steps, err, opts.quiet);

  const auto result = run(built->problem, sc, SaddleStateXd::zeros(built->problem.n(), built->problem.m()));

  const std::string path = opts.output ? *opts.output : (cfg.run.output.empty() ? "trace.csv" : cfg.run.output);
  std::ofstream trace_file(path);
  if (!trace_file) {
    err << path << ": error: cannot open trace file for writing\n";
    return kConfigError;
  }
  write_trace_csv(trace_file, result.trace);

  const auto kkt = kkt_residual(built->problem, result.state);
  out << "stop_reason=" << to_string(result.reason) << " iterations=" << result.trace.size()
      << " kernel=" << to_string(sc.kernel) << " lambda_x=" << format_number(sc.steps.lambda_x)
      << " lambda_z=" << format_number(sc.steps.lambda_z) << " lambda_y=" << format_number(sc.steps.lambda_y)
      << '\n';
  out << "kkt r_f=" << format_number(kkt.r_f) << " r_g=" << format_number(kkt.r_g)
      << " r_c=" << format_number(kkt.r_c) << " max=" << format_number(kkt.max()) << '\n';
  return exit_code(result.reason);
}

int cmd_bounds(double start, double stop, double step, std::ostream& out, std::ostream& err) {
  if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step) || start < 0 || !(step > 0) ||
      stop < start) {
    err << "error: invalid grid (need 0 <= start <= stop and step > 0)\n";
    return kConfigError;
  }
  // Grid points are start + i*step so rounding does not accumulate.
  const auto count = static_cast<long long>(std::floor((stop - start) / step + 1e-9)) + 1;
  out << "norm_A,bound_ct,bound_new\n";
  for (long long i = 0; i < count; ++i) {
    const double t = start + double(i) * step;
    out << format_number(t) << ',' << format_number(stepsize_bound_ct(t)) << ','
        << format_number(stepsize_bound_new(t)) << '\n';
  }
  return kConverged;
}

std::vector<SweepRow> sweep(const RunConfig& cfg, const std::vector<double>& lambdas) {
  for (double l : lambdas)
    if (!(l > 0) || !std::isfinite(l)) throw ConfigError(0, "sweep: every lambda must be positive");
  if (lambdas.empty()) throw ConfigError(0, "sweep: the lambda grid is empty");
  const BuiltProblem built = build_problem(cfg.problem);

  std::vector<std::future<SweepRow>> jobs;
  jobs.reserve(lambdas.size());
  for (double lambda : lambdas) {
    jobs.push_back(std::async(std::launch::async, [&built, &cfg, lambda] {
      SolverConfig<double> sc;
      sc.kernel = cfg.solver.kernel;
      sc.steps = StepSizes<double>::uniform(lambda);
      sc.max_iter = cfg.run.max_iter;
      sc.tol_fixed_point = cfg.run.tol;
      const auto& P = built.problem;
      const bool pd = is_positive_definite(kernel_metric(P, sc.steps));
      const auto res = run(P, sc, SaddleStateXd::zeros(P.n(), P.m()));
      const double kkt = res.reason == StopReason::Diverged ? std::numeric_limits<double>::infinity()
                                                            : kkt_residual(P, res.state).max();
      return SweepRow{lambda, pd, res.reason, int(res.trace.size()), kkt};
    }));
  }
  std::vector<SweepRow> rows;
  rows.reserve(jobs.size());
  for (auto& j : jobs) rows.push_back(j.get());
  return rows;
}

int cmd_sweep(const std::string& config_path, const std::vector<double>& lambdas, const CommandOptions& opts,
              std::ostream& out, std::ostream& err) {
  std::vector<SweepRow> rows;
  try {
    rows = sweep(load_config(config_path), lambdas);
  } catch (const ConfigError& e) {
    report_config_error(err, config_path, e);
    return kConfigError;
  } catch (const Error& e) {
    err << config_path << ": error: " << e.what() << '\n';
    return kConfigError;
  }

  std::ofstream file;
  if (opts.output) {
    file.open(*opts.output);
    if (!file) {
      err << *opts.output << ": error: cannot open output file for writing\n";
      return kConfigError;
    }
  }
  std::ostream& os = opts.output ? static_cast<std::ostream&>(file) : out;
  os << "lambda,pd_certified,stop_reason,iterations,final_kkt_max\n";
  for (const auto& r : rows) {
    os << format_number(r.lambda) << ',' << (r.pd_certified ? "true" : "false") << ',' << to_string(r.reason)
       << ',' << r.iterations << ',' << format_number(r.final_kkt_max) << '\n';
  }
  return kConverged;
}

std::vector<double> parse_lambda_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const auto b = tok.find_first_not_of(" \t");
    const auto e = tok.find_last_not_of(" \t");
    if (b == std::string::npos) throw ConfigError(0, "empty entry in lambda list");
    tok = tok.substr(b, e - b + 1);
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw ConfigError(0, "invalid lambda '" + tok + "'");
    }
    if (used != tok.size()) throw ConfigError(0, "invalid lambda '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace ctsplit::harness

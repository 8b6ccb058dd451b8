#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "ctsplit/metric.hpp"
#include "ctsplit/oracles.hpp"
#include "ctsplit/prox.hpp"
#include "ctsplit/saddle.hpp"

namespace ctsplit {

/// One Chen-Teboulle predictor-corrector step:
///     p' = y + lambda (Ax - z)
///     x' = (df + I/lambda)^{-1}(x/lambda - A^T p')
///     z' = (dg + I/lambda)^{-1}(z/lambda + p')
///     y' = y + lambda (Ax' - z')
template <typename Scalar>
SaddleState<Scalar> ct_iterate(const SaddleProblem<Scalar>& P, const SaddleState<Scalar>& s, Scalar lambda) {
  detail::require_positive(lambda, "ct_iterate");
  check_conforms(P, s);
  const Scalar tau = Scalar(1) / lambda;
  SaddleState<Scalar> out;
  out.p = s.y + lambda * (apply(P.A(), s.x) - s.z);
  out.x = resolvent_scaled(P.f(), tau, s.x / lambda - adjoint_apply(P.A(), *out.p));
  out.z = resolvent_scaled(P.g(), tau, s.z / lambda + *out.p);
  out.y = s.y + lambda * (apply(P.A(), out.x) - out.z);
  return out;
}

/// One proximal point step in the block metric with B = I:
///     x' = (df + I/lambda_x)^{-1}(x/lambda_x - A^T y)
///     z' = (dg + I/lambda_z)^{-1}(z/lambda_z + y)
///     y' = y + lambda_y (2Ax' - Ax - 2z' + z)
template <typename Scalar>
SaddleState<Scalar> vmetric_iterate(const SaddleProblem<Scalar>& P, const SaddleState<Scalar>& s,
                                    Scalar lambda_x, Scalar lambda_z, Scalar lambda_y) {
  detail::require_positive(lambda_x, "vmetric_iterate");
  detail::require_positive(lambda_z, "vmetric_iterate");
  detail::require_positive(lambda_y, "vmetric_iterate");
  check_conforms(P, s);
  SaddleState<Scalar> out;
  const Vector<Scalar> Ax = apply(P.A(), s.x);
  out.x = resolvent_scaled(P.f(), Scalar(1) / lambda_x,
                           s.x / lambda_x - adjoint_apply(P.A(), s.y));
  out.z = resolvent_scaled(P.g(), Scalar(1) / lambda_z, s.z / lambda_z + s.y);
  out.y = s.y + lambda_y * (Scalar(2) * apply(P.A(), out.x) - Ax - Scalar(2) * out.z + s.z);
  return out;
}

/// Maps a Chen-Teboulle state onto the coordinates of the block-metric
/// kernel with equal steps: x and z agree, and the metric kernel's dual is
/// the next predictor y + lambda (Ax - z).
template <typename Scalar>
SaddleState<Scalar> ct_to_vmetric_state(const SaddleProblem<Scalar>& P, const SaddleState<Scalar>& s,
                                        Scalar lambda) {
  return {s.x, s.z, Vector<Scalar>(s.y + lambda * (apply(P.A(), s.x) - s.z)), std::nullopt};
}

/// ||vmetric_iterate(s) - (V + T)^{-1} V s|| for quadratic f and g, where the
/// right-hand side comes from a dense solve. B must be the identity.
template <typename Scalar>
Scalar ppa_identity_check(const SaddleProblem<Scalar>& P, const SaddleState<Scalar>& s,
                          const MetricParams<Scalar>& params) {
  if (!P.f().is_quadratic() || !P.g().is_quadratic())
    throw ParameterError("ppa_identity_check: f and g must both be QuadraticDistance");
  if (params.B.rows() != P.m() || params.B.cols() != P.m() ||
      params.B.matrix() != Matrix<Scalar>::Identity(P.m(), P.m()))
    throw ParameterError("ppa_identity_check: the block-coordinate kernel requires B = I");
  const MetricV<Scalar> V(params, P.A());
  const SaddleState<Scalar> direct = ppa_direct_step(P, V, s);
  const SaddleState<Scalar> kernel = vmetric_iterate(P, s, Scalar(1) / params.tau_x,
                                                     Scalar(1) / params.tau_z, Scalar(1) / params.tau_y);
  return (kernel.stacked() - direct.stacked()).norm();
}

enum class Kernel { ChenTeboulle, VMetric };
enum class StopReason { Converged, IterLimit, Diverged };

inline std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::Converged: return "Converged";
    case StopReason::IterLimit: return "IterLimit";
    case StopReason::Diverged: return "Diverged";
  }
  return "?";
}

inline std::string_view to_string(Kernel k) { return k == Kernel::ChenTeboulle ? "ct" : "vmetric"; }

template <typename Scalar>
struct StepSizes {
  Scalar lambda_x;
  Scalar lambda_z;
  Scalar lambda_y;

  static StepSizes uniform(Scalar lambda) { return {lambda, lambda, lambda}; }
  bool equal() const { return lambda_x == lambda_z && lambda_z == lambda_y; }
};

template <typename Scalar>
struct SolverConfig {
  Kernel kernel = Kernel::VMetric;
  StepSizes<Scalar> steps = StepSizes<Scalar>::uniform(Scalar(0.5));
  int max_iter = 10000;
  Scalar tol_fixed_point = Scalar(1e-10);
  bool record_v_norm = false;
  std::optional<SaddleState<Scalar>> reference_point;
};

template <typename Scalar>
struct IterationRecord {
  KktResidual<Scalar> kkt;
  Scalar fixed_point_res;
  Scalar primal_obj;
  std::optional<Scalar> v_dist;
};

template <typename Scalar>
using IterationTrace = std::vector<IterationRecord<Scalar>>;

template <typename Scalar>
struct RunResult {
  SaddleState<Scalar> state;
  IterationTrace<Scalar> trace;
  StopReason reason;
};

/// Metric in which the kernel is a proximal point iteration.
template <typename Scalar>
MetricV<Scalar> kernel_metric(const SaddleProblem<Scalar>& P, const StepSizes<Scalar>& steps) {
  return MetricV<Scalar>(MetricParams<Scalar>::from_steps(steps.lambda_x, steps.lambda_z, steps.lambda_y, P.m()),
                         P.A());
}

template <typename Scalar>
void validate(const SaddleProblem<Scalar>& P, const SolverConfig<Scalar>& cfg) {
  const auto& st = cfg.steps;
  for (Scalar l : {st.lambda_x, st.lambda_z, st.lambda_y})
    if (!(l > Scalar(0)) || !std::isfinite(double(l))) throw ParameterError("run: step sizes must be positive");
  if (cfg.kernel == Kernel::ChenTeboulle && !st.equal())
    throw ParameterError("run: the Chen-Teboulle kernel takes a single step size");
  if (cfg.max_iter < 0) throw ParameterError("run: max_iter must be nonnegative");
  if (!(cfg.tol_fixed_point > Scalar(0))) throw ParameterError("run: tol_fixed_point must be positive");
  if (cfg.record_v_norm) {
    if (!cfg.reference_point) throw ParameterError("run: record_v_norm requires a reference point");
    check_conforms(P, *cfg.reference_point);
    if (!is_positive_definite(kernel_metric(P, st)))
      throw ParameterError("run: record_v_norm requires a positive definite metric");
  }
}

/// Iterates the selected kernel from s0 until ||s_{k+1} - s_k|| <= tol
/// (Converged), max_iter steps (IterLimit) or a non-finite state or
/// residual (Diverged).
/// One trace record per completed step.
template <typename Scalar>
RunResult<Scalar> run(const SaddleProblem<Scalar>& P, const SolverConfig<Scalar>& cfg,
                      SaddleState<Scalar> s0) {
  validate(P, cfg);
  check_conforms(P, s0);
  std::optional<MetricV<Scalar>> V;
  if (cfg.record_v_norm) V.emplace(kernel_metric(P, cfg.steps));
  const Scalar lambda = cfg.steps.lambda_x;

  RunResult<Scalar> out{std::move(s0), {}, StopReason::IterLimit};
  out.trace.reserve(std::size_t(std::min(cfg.max_iter, 100000)));
  for (int k = 0; k < cfg.max_iter; ++k) {
    SaddleState<Scalar> next = cfg.kernel == Kernel::ChenTeboulle
                                   ? ct_iterate(P, out.state, lambda)
                                   : vmetric_iterate(P, out.state, cfg.steps.lambda_x, cfg.steps.lambda_z,
                                                     cfg.steps.lambda_y);
    if (!next.finite()) {
      out.reason = StopReason::Diverged;
      return out;
    }
    IterationRecord<Scalar> rec;
    rec.fixed_point_res = std::sqrt((next.x - out.state.x).squaredNorm() +
                                    (next.z - out.state.z).squaredNorm() +
                                    (next.y - out.state.y).squaredNorm());
    rec.kkt = kkt_residual(P, next);
    if (!std::isfinite(double(rec.fixed_point_res)) || !std::isfinite(double(rec.kkt.max()))) {
      out.reason = StopReason::Diverged;
      return out;
    }
    rec.primal_obj = primal_objective(P, next.x);
    if (V) {
      const SaddleState<Scalar> cur =
          cfg.kernel == Kernel::ChenTeboulle ? ct_to_vmetric_state(P, next, lambda) : next;
      SaddleState<Scalar> diff{cur.x - cfg.reference_point->x, cur.z - cfg.reference_point->z,
                               cur.y - cfg.reference_point->y, std::nullopt};
      rec.v_dist = v_norm(*V, diff);
    }
    out.trace.push_back(rec);
    out.state = std::move(next);
    if (rec.fixed_point_res <= cfg.tol_fixed_point) {
      out.reason = StopReason::Converged;
      return out;
    }
  }
  return out;
}

}  // namespace ctsplit

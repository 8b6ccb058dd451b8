#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "ctsplit/core_linalg.hpp"
#include "ctsplit/saddle.hpp"

namespace ctsplit {

/// Diagonal weights of the block metric together with the z/y coupling B.
/// Step sizes are the reciprocals: lambda_i = 1 / tau_i.
template <typename Scalar>
struct MetricParams {
  Scalar tau_x;
  Scalar tau_z;
  Scalar tau_y;
  LinearMap<Scalar> B;

  static MetricParams from_steps(Scalar lambda_x, Scalar lambda_z, Scalar lambda_y, Eigen::Index m) {
    return {Scalar(1) / lambda_x, Scalar(1) / lambda_z, Scalar(1) / lambda_y, LinearMap<Scalar>::identity(m)};
  }
  static MetricParams uniform(Scalar lambda, Eigen::Index m) { return from_steps(lambda, lambda, lambda, m); }
};

/// Block metric
///
///     [ tau_x I     0      -A^T  ]
///     [   0      tau_z I    B^T  ]
///     [  -A         B     tau_y I]
///
/// over the stacked space (x, z, y). With B = I the upper triangle cancels
/// that of the saddle operator, so (V + T)^{-1} V decouples x from z.
template <typename Scalar>
class MetricV {
 public:
  MetricV(MetricParams<Scalar> params, LinearMap<Scalar> A)
      : params_(std::move(params)), A_(std::move(A)) {
    const auto m = A_.rows();
    if (params_.B.rows() != m || params_.B.cols() != m)
      throw DimensionError("build_V: B must be " + std::to_string(m) + "x" + std::to_string(m));
    if (!std::isfinite(double(params_.tau_x)) || !std::isfinite(double(params_.tau_z)) ||
        !std::isfinite(double(params_.tau_y)))
      throw ParameterError("build_V: metric weights must be finite");
    assemble();
  }

  const MetricParams<Scalar>& params() const { return params_; }
  const LinearMap<Scalar>& A() const { return A_; }
  const Matrix<Scalar>& assembled() const { return V_; }
  Eigen::Index n() const { return A_.cols(); }
  Eigen::Index m() const { return A_.rows(); }

 private:
  void assemble() {
    const auto n = A_.cols(), m = A_.rows();
    const auto& A = A_.matrix();
    const auto& B = params_.B.matrix();
    V_ = Matrix<Scalar>::Zero(n + 2 * m, n + 2 * m);
    V_.block(0, 0, n, n).diagonal().setConstant(params_.tau_x);
    V_.block(n, n, m, m).diagonal().setConstant(params_.tau_z);
    V_.block(n + m, n + m, m, m).diagonal().setConstant(params_.tau_y);
    V_.block(0, n + m, n, m) = -A.transpose();
    V_.block(n + m, 0, m, n) = -A;
    V_.block(n, n + m, m, m) = B.transpose();
    V_.block(n + m, n, m, m) = B;
  }

  MetricParams<Scalar> params_;
  LinearMap<Scalar> A_;
  Matrix<Scalar> V_;
};

using MetricVXd = MetricV<double>;

template <typename Scalar>
MetricV<Scalar> build_V(MetricParams<Scalar> params, LinearMap<Scalar> A) {
  return MetricV<Scalar>(std::move(params), std::move(A));
}

enum class Definiteness { PositiveDefinite, Boundary, NotPositiveDefinite };

/// Schur reduction of V onto the y block:
///     tau_y I - tau_x^{-1} A A^T - tau_z^{-1} B B^T.
/// Only meaningful when tau_x > 0 and tau_z > 0.
template <typename Scalar>
Matrix<Scalar> schur_complement(const MetricV<Scalar>& V) {
  const auto& p = V.params();
  const auto& A = V.A().matrix();
  const auto& B = p.B.matrix();
  Matrix<Scalar> S = -(A * A.transpose()) / p.tau_x - (B * B.transpose()) / p.tau_z;
  S.diagonal().array() += p.tau_y;
  return Scalar(0.5) * (S + S.transpose());
}

/// Classifies V through the double Schur complement test. A smallest
/// eigenvalue of the reduced block within a few ulps of the block's scale is
/// reported as Boundary: V is then singular up to rounding.
template <typename Scalar>
Definiteness classify_definiteness(const MetricV<Scalar>& V) {
  const auto& p = V.params();
  if (!(p.tau_x > Scalar(0)) || !(p.tau_z > Scalar(0))) return Definiteness::NotPositiveDefinite;
  const Matrix<Scalar> S = schur_complement(V);
  const Scalar lam = min_eig_sym(S);
  const auto& A = V.A().matrix();
  const auto& B = p.B.matrix();
  const Scalar scale = std::max({std::abs(p.tau_y), (A * A.transpose()).norm() / p.tau_x,
                                 (B * B.transpose()).norm() / p.tau_z, Scalar(1e-300)});
  const Scalar band = Scalar(64) * std::numeric_limits<Scalar>::epsilon() * scale;
  if (lam > band) return Definiteness::PositiveDefinite;
  if (lam >= -band) return Definiteness::Boundary;
  return Definiteness::NotPositiveDefinite;
}

/// tau_x > 0, tau_z > 0 and tau_y I > tau_x^{-1} A A^T + tau_z^{-1} B B^T, strictly.
template <typename Scalar>
bool is_positive_definite(const MetricV<Scalar>& V) {
  return classify_definiteness(V) == Definiteness::PositiveDefinite;
}

/// <V a, b> on stacked (x, z, y).
template <typename Scalar>
Scalar v_inner(const MetricV<Scalar>& V, const SaddleState<Scalar>& a, const SaddleState<Scalar>& b) {
  const Vector<Scalar> sa = a.stacked();
  const Vector<Scalar> sb = b.stacked();
  if (sa.size() != V.assembled().rows() || sb.size() != V.assembled().rows() ||
      a.x.size() != V.n() || b.x.size() != V.n())
    throw DimensionError("v_inner: state does not conform to the metric");
  return sb.dot(V.assembled() * sa);
}

/// sqrt(<V a, a>). Values down to -1e-12 clamp to zero; anything more
/// negative means V is indefinite.
template <typename Scalar>
Scalar v_norm(const MetricV<Scalar>& V, const SaddleState<Scalar>& a) {
  const Scalar sq = v_inner(V, a, a);
  if (sq < Scalar(-1e-12)) throw IndefiniteMetricError("v_norm: <Va,a> is negative");
  return std::sqrt(std::max(sq, Scalar(0)));
}

/// Chen-Teboulle step bound 1 / (2 max(||A||, 1)); steps must be strictly below it.
template <typename Scalar>
Scalar stepsize_bound_ct(Scalar norm_a) {
  if (!(norm_a >= Scalar(0))) throw ParameterError("stepsize_bound_ct: norm must be nonnegative");
  return Scalar(1) / (Scalar(2) * std::max(norm_a, Scalar(1)));
}

/// Bound from positivity of the block metric: 1 / sqrt(||A||^2 + 1).
template <typename Scalar>
Scalar stepsize_bound_new(Scalar norm_a) {
  if (!(norm_a >= Scalar(0))) throw ParameterError("stepsize_bound_new: norm must be nonnegative");
  return Scalar(1) / std::sqrt(norm_a * norm_a + Scalar(1));
}

}  // namespace ctsplit

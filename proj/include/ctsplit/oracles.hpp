#pragma once

// Ground-truth computations that share no code path with the solvers:
// cyclic Jacobi instead of power iteration, support enumeration and direct
// linear solves instead of proximal iterations.

#include <algorithm>
#include <cmath>
#include <limits>
#include <type_traits>
#include <vector>

#include "ctsplit/core_linalg.hpp"
#include "ctsplit/metric.hpp"
#include "ctsplit/saddle.hpp"

namespace ctsplit {

template <typename Scalar>
struct OracleSolution {
  Vector<Scalar> x_star;
  Vector<Scalar> z_star;
  Vector<Scalar> y_star;
  KktResidual<Scalar> certificate;

  SaddleState<Scalar> state() const { return {x_star, z_star, y_star, std::nullopt}; }
};

template <typename Scalar>
struct SymmetricEigen {
  Vector<Scalar> values;  // ascending
  Matrix<Scalar> vectors;
};

/// Full spectrum of a symmetric matrix by the cyclic Jacobi method.
/// Certified by the reconstruction residual ||M - Q diag(values) Q^T||.
template <typename Scalar>
SymmetricEigen<Scalar> jacobi_eigen(const Matrix<Scalar>& M_in, int max_sweeps = 100) {
  if (M_in.rows() != M_in.cols()) throw DimensionError("dense_eigs_sym: matrix is not square");
  const Eigen::Index n = M_in.rows();
  if (n > 200) throw DimensionError("dense_eigs_sym: oracle is limited to n <= 200");
  Matrix<Scalar> M = Scalar(0.5) * (M_in + M_in.transpose());
  Matrix<Scalar> Q = Matrix<Scalar>::Identity(n, n);
  const Scalar fro = std::max(M.norm(), std::numeric_limits<Scalar>::min());
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();

  bool converged = false;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    Scalar off = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) off += M(i, j) * M(i, j);
    if (std::sqrt(off) <= eps * fro) {
      converged = true;
      break;
    }
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Scalar apq = M(p, q);
        if (apq == Scalar(0)) continue;
        const Scalar theta = (M(q, q) - M(p, p)) / (Scalar(2) * apq);
        const Scalar t = (theta >= 0 ? Scalar(1) : Scalar(-1)) /
                         (std::abs(theta) + std::sqrt(theta * theta + Scalar(1)));
        const Scalar c = Scalar(1) / std::sqrt(t * t + Scalar(1));
        const Scalar s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar mkp = M(k, p), mkq = M(k, q);
          M(k, p) = c * mkp - s * mkq;
          M(k, q) = s * mkp + c * mkq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar mpk = M(p, k), mqk = M(q, k);
          M(p, k) = c * mpk - s * mqk;
          M(q, k) = s * mpk + c * mqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar qkp = Q(k, p), qkq = Q(k, q);
          Q(k, p) = c * qkp - s * qkq;
          Q(k, q) = s * qkp + c * qkq;
        }
      }
    }
  }
  if (!converged) throw OracleFailure("dense_eigs_sym: Jacobi sweeps did not converge");

  std::vector<Eigen::Index> order(n);
  for (Eigen::Index i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return M(a, a) < M(b, b); });
  SymmetricEigen<Scalar> out{Vector<Scalar>(n), Matrix<Scalar>(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values[i] = M(order[i], order[i]);
    out.vectors.col(i) = Q.col(order[i]);
  }

  const Matrix<Scalar> recon = out.vectors * out.values.asDiagonal() * out.vectors.transpose();
  if ((recon - M_in).norm() > Scalar(1e-9) * std::max(Scalar(1), M_in.norm()))
    throw OracleFailure("dense_eigs_sym: reconstruction certificate failed");
  return out;
}

template <typename Scalar>
Vector<Scalar> dense_eigs_sym(const Matrix<Scalar>& M) {
  return jacobi_eigen(M).values;
}

/// Largest singular value as sqrt of the top Jacobi eigenvalue of A^T A.
template <typename Scalar>
Scalar dense_svd_max(const LinearMap<Scalar>& A) {
  const Matrix<Scalar> G = A.matrix().transpose() * A.matrix();
  const Vector<Scalar> ev = dense_eigs_sym(G);
  return std::sqrt(std::max(ev[ev.size() - 1], Scalar(0)));
}

/// Exact minimizer of mu ||x||_1 + 1/2 ||Mx - b||^2, i.e. the saddle problem
/// with f = L1(mu), g = QuadraticDistance(b, 1) and A = M.
///
/// Every sign pattern in {-1, 0, +1}^n is tried: the reduced stationarity
/// system M_S^T M_S x_S = M_S^T b - mu s_S is solved on the support S and the
/// candidate is kept when its signs match and the off-support subgradient
/// bound |M_j^T (b - Mx)| <= mu holds. The dual is y* = Mx* - b, the gradient
/// of g at z* = Mx*.
template <typename Scalar>
OracleSolution<Scalar> lasso_oracle(const LinearMap<Scalar>& M, const std::type_identity_t<Vector<Scalar>>& b,
                                    std::type_identity_t<Scalar> mu) {
  const Eigen::Index n = M.cols(), m = M.rows();
  if (n > 12) throw DimensionError("lasso_oracle: n <= 12 required for enumeration");
  if (b.size() != m) throw DimensionError("lasso_oracle: dim(b) != rows(M)");
  if (!(mu > Scalar(0))) throw ParameterError("lasso_oracle: mu must be positive");

  const auto& Mm = M.matrix();
  const SaddleProblem<Scalar> P(ProxFunction<Scalar>::l1(mu, n),
                                ProxFunction<Scalar>::quadratic_distance(b, Scalar(1)), M);

  std::vector<int> signs(n, -1);
  std::optional<OracleSolution<Scalar>> best;
  for (;;) {
    std::vector<Eigen::Index> support;
    for (Eigen::Index i = 0; i < n; ++i)
      if (signs[i] != 0) support.push_back(i);

    Vector<Scalar> x = Vector<Scalar>::Zero(n);
    bool ok = true;
    if (!support.empty()) {
      const auto k = Eigen::Index(support.size());
      Matrix<Scalar> Ms(m, k);
      Vector<Scalar> s(k);
      for (Eigen::Index j = 0; j < k; ++j) {
        Ms.col(j) = Mm.col(support[j]);
        s[j] = Scalar(signs[support[j]]);
      }
      const Matrix<Scalar> G = Ms.transpose() * Ms;
      Eigen::FullPivLU<Matrix<Scalar>> lu(G);
      if (lu.rank() < k) {
        ok = false;
      } else {
        const Vector<Scalar> xs = lu.solve(Vector<Scalar>(Ms.transpose() * b - mu * s));
        for (Eigen::Index j = 0; j < k && ok; ++j) {
          if (xs[j] * s[j] <= Scalar(0)) ok = false;
          x[support[j]] = xs[j];
        }
      }
    }
    if (ok) {
      const Vector<Scalar> corr = Mm.transpose() * (b - Mm * x);
      for (Eigen::Index i = 0; i < n && ok; ++i)
        if (signs[i] == 0 && std::abs(corr[i]) > mu * (Scalar(1) + Scalar(1e-12))) ok = false;
    }
    if (ok) {
      const Vector<Scalar> z = Mm * x;
      OracleSolution<Scalar> cand{x, z, Vector<Scalar>(z - b), {}};
      cand.certificate = kkt_residual(P, cand.state());
      if (!best || cand.certificate.max() < best->certificate.max()) best = cand;
    }

    Eigen::Index i = 0;
    while (i < n && signs[i] == 1) signs[i++] = -1;
    if (i == n) break;
    ++signs[i];
  }
  if (!best || best->certificate.max() > Scalar(1e-8))
    throw OracleFailure("lasso_oracle: no sign pattern passed certification");
  return *best;
}

namespace detail {

template <typename Scalar>
struct QuadraticData {
  Scalar wf, wg;
  Vector<Scalar> c, b;
};

template <typename Scalar>
QuadraticData<Scalar> quadratic_data(const SaddleProblem<Scalar>& P) {
  const auto* f = std::get_if<kinds::QuadraticDistance<Scalar>>(&P.f().kind());
  const auto* g = std::get_if<kinds::QuadraticDistance<Scalar>>(&P.g().kind());
  if (!f || !g) throw ParameterError("quadratic oracle: f and g must both be QuadraticDistance");
  return {f->weight, g->weight, f->center, g->center};
}

/// Affine saddle operator T(s) = K s - r for quadratic f and g.
template <typename Scalar>
void quadratic_operator(const SaddleProblem<Scalar>& P, Matrix<Scalar>& K, Vector<Scalar>& r) {
  const auto q = quadratic_data(P);
  const auto n = P.n(), m = P.m();
  const auto& A = P.A().matrix();
  K = Matrix<Scalar>::Zero(n + 2 * m, n + 2 * m);
  K.block(0, 0, n, n).diagonal().setConstant(q.wf);
  K.block(0, n + m, n, m) = A.transpose();
  K.block(n, n, m, m).diagonal().setConstant(q.wg);
  K.block(n, n + m, m, m).diagonal().setConstant(Scalar(-1));
  K.block(n + m, 0, m, n) = -A;
  K.block(n + m, n, m, m).diagonal().setConstant(Scalar(1));
  r = Vector<Scalar>::Zero(n + 2 * m);
  r.head(n) = q.wf * q.c;
  r.segment(n, m) = q.wg * q.b;
}

}  // namespace detail

/// Saddle point of a problem with quadratic f and g from the linear KKT system
///     wf (x - c) + A^T y = 0,  wg (z - b) - y = 0,  z - Ax = 0.
template <typename Scalar>
OracleSolution<Scalar> quadratic_saddle_oracle(const SaddleProblem<Scalar>& P) {
  Matrix<Scalar> K;
  Vector<Scalar> r;
  detail::quadratic_operator(P, K, r);
  Eigen::FullPivLU<Matrix<Scalar>> lu(K);
  if (!lu.isInvertible()) throw SingularSystemError("quadratic_saddle_oracle: KKT matrix is singular");
  const Vector<Scalar> s = lu.solve(r);
  auto st = SaddleState<Scalar>::from_stacked(s, P.n(), P.m());
  OracleSolution<Scalar> out{st.x, st.z, st.y, kkt_residual(P, st)};
  const Scalar scale = Scalar(1) + r.norm();
  if (out.certificate.max() > Scalar(1e-10) * scale)
    throw OracleFailure("quadratic_saddle_oracle: KKT certificate failed");
  return out;
}

/// One proximal point step in the V-metric by a dense solve of
/// (V + T) s' = V s for quadratic f, g.
template <typename Scalar>
SaddleState<Scalar> ppa_direct_step(const SaddleProblem<Scalar>& P, const MetricV<Scalar>& V,
                                    const SaddleState<Scalar>& s) {
  Matrix<Scalar> K;
  Vector<Scalar> r;
  detail::quadratic_operator(P, K, r);
  if (V.n() != P.n() || V.m() != P.m()) throw DimensionError("ppa_direct_step: metric does not conform");
  check_conforms(P, s);
  const Matrix<Scalar> lhs = V.assembled() + K;
  Eigen::FullPivLU<Matrix<Scalar>> lu(lhs);
  if (!lu.isInvertible()) throw SingularSystemError("ppa_direct_step: V + T is singular");
  const Vector<Scalar> next = lu.solve(Vector<Scalar>(V.assembled() * s.stacked() + r));
  return SaddleState<Scalar>::from_stacked(next, P.n(), P.m());
}

}  // namespace ctsplit

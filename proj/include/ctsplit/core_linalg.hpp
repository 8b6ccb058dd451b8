#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "ctsplit/errors.hpp"

namespace ctsplit {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VectorXd = Vector<double>;
using MatrixXd = Matrix<double>;

/// A bounded linear operator between R^cols and R^rows, stored densely.
template <typename Scalar>
class LinearMap {
 public:
  using MatrixType = Matrix<Scalar>;

  LinearMap() = default;

  explicit LinearMap(MatrixType m) : m_(std::move(m)) {
    if (m_.rows() <= 0 || m_.cols() <= 0)
      throw DimensionError("LinearMap: rows and cols must be positive");
  }

  static LinearMap identity(Eigen::Index n) { return LinearMap(MatrixType::Identity(n, n)); }
  static LinearMap zero(Eigen::Index rows, Eigen::Index cols) {
    return LinearMap(MatrixType::Zero(rows, cols));
  }

  Eigen::Index rows() const { return m_.rows(); }
  Eigen::Index cols() const { return m_.cols(); }
  const MatrixType& matrix() const { return m_; }

  LinearMap scaled(Scalar c) const { return LinearMap(MatrixType(c * m_)); }

 private:
  MatrixType m_;
};

using LinearMapXd = LinearMap<double>;

template <typename Derived>
Vector<typename Derived::Scalar> apply(const LinearMap<typename Derived::Scalar>& A,
                                       const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != A.cols())
    throw DimensionError("apply: dim(x)=" + std::to_string(x.size()) +
                         " but cols(A)=" + std::to_string(A.cols()));
  return A.matrix() * x;
}

template <typename Derived>
Vector<typename Derived::Scalar> adjoint_apply(const LinearMap<typename Derived::Scalar>& A,
                                               const Eigen::MatrixBase<Derived>& y) {
  if (y.size() != A.rows())
    throw DimensionError("adjoint_apply: dim(y)=" + std::to_string(y.size()) +
                         " but rows(A)=" + std::to_string(A.rows()));
  return A.matrix().transpose() * y;
}

template <typename Scalar>
bool all_finite(const Vector<Scalar>& v) {
  return v.allFinite();
}

/// Largest singular value of A by power iteration on A^T A.
///
/// The start vector is drawn from a fixed-seed generator so the result is
/// reproducible. Iteration stops once the eigen-residual
/// ||A^T A v - mu v|| drops below tol * mu, which bounds the relative error
/// of mu (and hence of sqrt(mu)) by tol. The zero map returns exactly 0.
template <typename Scalar>
Scalar op_norm(const LinearMap<Scalar>& A, Scalar tol = Scalar(1e-10), int max_iter = 10000) {
  if (!(tol > Scalar(0))) throw ParameterError("op_norm: tol must be positive");
  const auto& M = A.matrix();
  if (M.isZero(Scalar(0))) return Scalar(0);

  std::mt19937_64 rng(0x5eedULL);
  std::uniform_real_distribution<double> unif(0.5, 1.5);
  Vector<Scalar> v(M.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = Scalar(unif(rng));
  v.normalize();

  Scalar mu = Scalar(0);
  for (int k = 0; k < max_iter; ++k) {
    Vector<Scalar> w = M.transpose() * (M * v);
    mu = v.dot(w);
    const Scalar res = (w - mu * v).norm();
    if (res <= tol * mu) return std::sqrt(mu);
    v = w / w.norm();
  }
  throw EstimationFailure("op_norm: power iteration did not converge in " +
                              std::to_string(max_iter) + " iterations",
                          double(std::sqrt(std::max(mu, Scalar(0)))));
}

/// Smallest eigenvalue of a symmetric matrix (symmetry checked to 1e-12).
template <typename Derived>
typename Derived::Scalar min_eig_sym(const Eigen::MatrixBase<Derived>& M) {
  using Scalar = typename Derived::Scalar;
  if (M.rows() != M.cols()) throw DimensionError("min_eig_sym: matrix is not square");
  const Scalar scale = std::max(Scalar(1), M.cwiseAbs().maxCoeff());
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-12) * scale)
    throw DimensionError("min_eig_sym: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace ctsplit

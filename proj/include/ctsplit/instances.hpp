#pragma once

#include <cstdint>
#include <random>

#include "ctsplit/core_linalg.hpp"
#include "ctsplit/prox.hpp"
#include "ctsplit/saddle.hpp"

namespace ctsplit {

/// Seeded dense test instances shared by the CLI, the unit tests and the
/// acceptance suite.
class InstanceGenerator {
 public:
  explicit InstanceGenerator(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  VectorXd gaussian_vector(Eigen::Index n) {
    std::normal_distribution<double> nd;
    VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = nd(rng_);
    return v;
  }

  MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<double> nd;
    MatrixXd M(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) M(i, j) = nd(rng_);
    return M;
  }

  MatrixXd symmetric_matrix(Eigen::Index n) {
    const MatrixXd M = gaussian_matrix(n, n);
    return 0.5 * (M + M.transpose());
  }

  /// Random member of the prox catalog of dimension n.
  ProxFunctionXd catalog_function(Eigen::Index n) {
    switch (integer(0, 4)) {
      case 0: return ProxFunctionXd::l1(uniform(0.1, 2.0), n);
      case 1: return ProxFunctionXd::quadratic_distance(gaussian_vector(n), uniform(0.2, 3.0));
      case 2: return ProxFunctionXd::indicator_point(gaussian_vector(n));
      case 3: {
        const VectorXd lo = gaussian_vector(n) - VectorXd::Constant(n, 0.5);
        const VectorXd width = (gaussian_vector(n).cwiseAbs().array() + 0.1).matrix();
        return ProxFunctionXd::indicator_box(lo, lo + width);
      }
      default: return ProxFunctionXd::zero(n);
    }
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Rescales A so that its largest singular value is 1 (to rounding).
/// Uses a full SVD so instances are exact and independent of op_norm.
inline LinearMapXd normalized(const LinearMapXd& A) {
  Eigen::JacobiSVD<MatrixXd> svd(A.matrix());
  const double s = svd.singularValues()(0);
  if (s == 0.0) return A;
  return LinearMapXd(MatrixXd(A.matrix() / s));
}

struct LassoInstance {
  LinearMapXd M;
  VectorXd b;
  double mu;

  SaddleProblem<double> problem() const {
    return {ProxFunctionXd::l1(mu, M.cols()), ProxFunctionXd::quadratic_distance(b, 1.0), M};
  }
};

inline LassoInstance make_lasso(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed, double mu,
                                bool unit_norm) {
  InstanceGenerator gen(seed);
  LinearMapXd M(gen.gaussian_matrix(rows, cols));
  if (unit_norm) M = normalized(M);
  VectorXd b = gen.gaussian_vector(rows);
  return {std::move(M), std::move(b), mu};
}

/// f = (wf/2)||x - c||^2, g = (wg/2)||z - b||^2 with Gaussian A, c, b.
inline SaddleProblem<double> make_quadratic(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed,
                                            double weight_f, double weight_g) {
  InstanceGenerator gen(seed);
  LinearMapXd A(gen.gaussian_matrix(rows, cols));
  VectorXd c = gen.gaussian_vector(cols);
  VectorXd b = gen.gaussian_vector(rows);
  return {ProxFunctionXd::quadratic_distance(std::move(c), weight_f),
          ProxFunctionXd::quadratic_distance(std::move(b), weight_g), std::move(A)};
}

}  // namespace ctsplit

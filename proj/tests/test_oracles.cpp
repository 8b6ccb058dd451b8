#include "doctest.h"

#include "ctsplit/instances.hpp"
#include "ctsplit/oracles.hpp"
#include "ctsplit/solvers.hpp"

using namespace ctsplit;

TEST_CASE("lasso_oracle") {
  const LinearMapXd I1 = LinearMapXd::identity(1);
  CHECK(lasso_oracle(I1, VectorXd::Constant(1, 2.0), 1.0).x_star[0] == doctest::Approx(1.0));
  CHECK(lasso_oracle(I1, VectorXd::Constant(1, 0.5), 1.0).x_star[0] == 0.0);

  SUBCASE("seeded 6x4 instance is certified") {
    const auto inst = make_lasso(6, 4, 2718, 0.5, false);
    const auto sol = lasso_oracle(inst.M, inst.b, inst.mu);
    CHECK(sol.certificate.max() <= 1e-10);
    CHECK(kkt_residual(inst.problem(), sol.state()).max() <= 1e-10);
  }

  SUBCASE("wide matrix (more columns than rows)") {
    const auto inst = make_lasso(3, 6, 4, 0.3, false);
    const auto sol = lasso_oracle(inst.M, inst.b, inst.mu);
    CHECK(sol.certificate.max() <= 1e-10);
  }

  CHECK_THROWS_AS(lasso_oracle(LinearMapXd::identity(13), VectorXd(VectorXd::Ones(13)), 1.0), DimensionError);
  CHECK_THROWS_AS(lasso_oracle(I1, VectorXd::Constant(1, 1.0), 0.0), ParameterError);
}

TEST_CASE("quadratic_saddle_oracle") {
  SUBCASE("A = I, f = ||x||^2/2, g = ||z-b||^2/2 gives x = b/2") {
    const VectorXd b = (VectorXd(3) << 2, -4, 1).finished();
    const SaddleProblem<double> P(ProxFunctionXd::quadratic_distance(VectorXd::Zero(3)),
                                  ProxFunctionXd::quadratic_distance(b), LinearMapXd::identity(3));
    const auto sol = quadratic_saddle_oracle(P);
    CHECK((sol.x_star - b / 2).norm() <= 1e-14);
    CHECK((sol.z_star - b / 2).norm() <= 1e-14);
    CHECK((sol.y_star + b / 2).norm() <= 1e-14);
  }

  SUBCASE("b = 0 gives the origin") {
    const SaddleProblem<double> P(ProxFunctionXd::quadratic_distance(VectorXd::Zero(2), 2.0),
                                  ProxFunctionXd::quadratic_distance(VectorXd::Zero(3), 0.5),
                                  LinearMapXd(InstanceGenerator(1).gaussian_matrix(3, 2)));
    CHECK(quadratic_saddle_oracle(P).state().stacked().norm() == 0.0);
  }

  SUBCASE("the metric kernel converges to the oracle") {
    const auto P = make_quadratic(4, 3, 15, 0.7, 1.4);
    const auto sol = quadratic_saddle_oracle(P);
    CHECK(sol.certificate.max() <= 1e-10);
    SolverConfig<double> c;
    c.steps = StepSizes<double>::uniform(0.95 * stepsize_bound_new(op_norm(P.A())));
    c.max_iter = 100000;
    c.tol_fixed_point = 1e-12;
    const auto res = run(P, c, SaddleStateXd::zeros(3, 4));
    CHECK((res.state.stacked() - sol.state().stacked()).norm() <= 1e-8);
  }

  const auto lasso = make_lasso(3, 2, 1, 0.1, false);
  CHECK_THROWS_AS(quadratic_saddle_oracle(lasso.problem()), ParameterError);
}

TEST_CASE("lasso and quadratic oracles agree when both reduce to least squares") {
  // mu -> 0 and wf -> 0 both approach the least-squares solution.
  const auto inst = make_lasso(8, 4, 31, 1e-9, false);
  const auto lsol = lasso_oracle(inst.M, inst.b, inst.mu);
  const SaddleProblem<double> Q(ProxFunctionXd::quadratic_distance(VectorXd::Zero(4), 1e-9),
                                ProxFunctionXd::quadratic_distance(inst.b), inst.M);
  const auto qsol = quadratic_saddle_oracle(Q);
  CHECK((lsol.x_star - qsol.x_star).norm() <= 1e-6);
  CHECK((lsol.y_star - qsol.y_star).norm() <= 1e-6);
  CHECK((lsol.x_star.array() != 0).all());
}

TEST_CASE("dense_eigs_sym and dense_svd_max") {
  CHECK(dense_svd_max(LinearMapXd::identity(5)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(dense_eigs_sym(MatrixXd(MatrixXd::Identity(5, 5))) == VectorXd::Ones(5));
  const VectorXd ev = dense_eigs_sym(MatrixXd(Eigen::Vector2d(-3, 2).asDiagonal()));
  CHECK(ev[0] == -3.0);
  CHECK(ev[1] == 2.0);

  InstanceGenerator gen(77);
  for (int k = 0; k < 20; ++k) {
    const MatrixXd S = gen.symmetric_matrix(gen.integer(1, 12));
    const auto eig = jacobi_eigen(S);
    const MatrixXd recon = eig.vectors * eig.values.asDiagonal() * eig.vectors.transpose();
    CHECK((recon - S).norm() <= 1e-9);
    for (Eigen::Index i = 1; i < eig.values.size(); ++i) CHECK(eig.values[i - 1] <= eig.values[i]);
  }

  const LinearMapXd A(gen.gaussian_matrix(7, 4));
  Eigen::JacobiSVD<MatrixXd> svd(A.matrix());
  CHECK(std::abs(dense_svd_max(A) - svd.singularValues()(0)) <= 1e-10);
  CHECK_THROWS_AS(dense_eigs_sym(MatrixXd(MatrixXd::Ones(2, 3))), DimensionError);
}

TEST_CASE("ppa_direct_step rejects singular systems") {
  // V + T with every weight zero and A = 0 is singular in the x block.
  const SaddleProblem<double> P(ProxFunctionXd::quadratic_distance(VectorXd::Zero(1), 1.0),
                                ProxFunctionXd::quadratic_distance(VectorXd::Zero(1), 1.0), LinearMapXd::zero(1, 1));
  const MetricVXd V(MetricParams<double>{-1.0, 1.0, 1.0, LinearMapXd::identity(1)}, P.A());
  CHECK_THROWS_AS(ppa_direct_step(P, V, SaddleStateXd::zeros(1, 1)), SingularSystemError);
}

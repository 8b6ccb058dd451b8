// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "ctsplit/instances.hpp"
#include "ctsplit/metric.hpp"
#include "ctsplit/oracles.hpp"
#include "ctsplit/solvers.hpp"
#include "../support/prox_checks.hpp"

using namespace ctsplit;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& why) {
    if (!cond && ok) {
      ok = false;
      detail = why;
    }
  }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

struct Criterion {
  std::string id;
  std::string title;
  double limit_s;
  bool counted;
  std::function<Outcome()> body;
};

SolverConfig<double> uniform_config(Kernel k, double lambda, double tol = 1e-10) {
  SolverConfig<double> c;
  c.kernel = k;
  c.steps = StepSizes<double>::uniform(lambda);
  c.max_iter = 200000;
  c.tol_fixed_point = tol;
  return c;
}

Outcome bound_dominance() {
  Outcome o;
  double worst_gap = INFINITY;
  for (int i = 0; i <= 1000; ++i) {
    const double t = 0.01 * i;
    const double gap = stepsize_bound_new(t) - stepsize_bound_ct(t);
    worst_gap = std::min(worst_gap, gap);
    o.require(gap > 0, fmt("new bound not above classical bound at ||A|| = %.2f", t));
  }
  // Direct substitution at ||A|| = 1.
  const double bn = stepsize_bound_new(1.0), bc = stepsize_bound_ct(1.0);
  o.require(std::abs(bn - 1.0 / std::sqrt(2.0)) <= 1e-15, fmt("bound_new(1) = %.17g", bn));
  o.require(bc == 0.5, fmt("bound_ct(1) = %.17g", bc));
  o.require(std::abs(bn / bc - std::sqrt(2.0)) <= 1e-15, fmt("ratio = %.17g", bn / bc));
  if (o.ok) o.detail = fmt("min gap %.3g over 1001 points; ratio at 1 = %.15f", worst_gap, bn / bc);
  return o;
}

Outcome schur_vs_spectrum() {
  Outcome o;
  InstanceGenerator gen(20240501);
  int compared = 0, pd = 0, skipped = 0;
  for (int k = 0; k < 500; ++k) {
    const int m = gen.integer(1, 8), n = gen.integer(1, 8);
    const LinearMapXd A = normalized(LinearMapXd(gen.gaussian_matrix(m, n))).scaled(gen.uniform(0.0, 2.0));
    const LinearMapXd B = normalized(LinearMapXd(gen.gaussian_matrix(m, m))).scaled(gen.uniform(0.0, 2.0));
    const MetricParams<double> params{gen.uniform(-0.5, 3.0), gen.uniform(-0.5, 3.0), gen.uniform(-0.5, 6.0), B};
    const MetricVXd V = build_V(params, A);
    const double lo = dense_eigs_sym(V.assembled())[0];
    if (std::abs(lo) < 1e-12) {
      ++skipped;
      continue;
    }
    ++compared;
    const bool expected = lo > 0;
    pd += expected;
    o.require(is_positive_definite(V) == expected, fmt("sample %.0f disagrees (oracle min eig %.3g)", k, lo));
  }
  o.require(pd > 0 && pd < compared, "samples did not cover both outcomes");
  if (o.ok)
    o.detail = std::to_string(compared) + " compared (" + std::to_string(pd) + " PD), " + std::to_string(skipped) +
               " in the ambiguity band";
  return o;
}

Outcome formulation_equivalence() {
  Outcome o;
  InstanceGenerator gen(3003);
  double worst = 0;
  for (int inst = 0; inst < 20; ++inst) {
    const int m = gen.integer(1, 6), n = gen.integer(1, 6);
    auto f = gen.catalog_function(n);
    auto g = gen.catalog_function(m);
    const SaddleProblem<double> P(std::move(f), std::move(g), LinearMapXd(gen.gaussian_matrix(m, n)));
    const double lambda = gen.uniform(0.2, 0.95) * stepsize_bound_new(op_norm(P.A()));
    SaddleStateXd ct{gen.gaussian_vector(n), gen.gaussian_vector(m), gen.gaussian_vector(m), std::nullopt};
    SaddleStateXd vm = ct_to_vmetric_state(P, ct, lambda);
    for (int k = 0; k < 200; ++k) {
      ct = ct_iterate(P, ct, lambda);
      vm = vmetric_iterate(P, vm, lambda, lambda, lambda);
      const auto mapped = ct_to_vmetric_state(P, ct, lambda);
      worst = std::max(worst, (mapped.stacked() - vm.stacked()).cwiseAbs().maxCoeff());
    }
  }
  o.require(worst <= 1e-12, fmt("max component difference %.3g", worst));
  if (o.ok) o.detail = fmt("max component difference %.3g over 20 x 200 steps", worst);
  return o;
}

Outcome ppa_identity() {
  Outcome o;
  InstanceGenerator gen(4004);
  double worst = 0;
  for (int k = 0; k < 50; ++k) {
    const int m = gen.integer(1, 6), n = gen.integer(1, 6);
    const auto P = make_quadratic(m, n, 9000 + k, gen.uniform(0.2, 3.0), gen.uniform(0.2, 3.0));
    const double nA = dense_svd_max(P.A());
    // Independent steps; lambda_y chosen inside the positive definite region.
    const double lx = gen.uniform(0.1, 2.0) / std::max(nA, 1.0), lz = gen.uniform(0.1, 2.0);
    const double need = nA * nA * lx + lz;
    const double ly = gen.uniform(0.1, 0.95) / need;
    const auto params = MetricParams<double>::from_steps(lx, lz, ly, m);
    o.require(is_positive_definite(build_V(params, P.A())), "sampled parameters not positive definite");
    const SaddleStateXd s{gen.gaussian_vector(n), gen.gaussian_vector(m), gen.gaussian_vector(m), std::nullopt};
    worst = std::max(worst, ppa_identity_check(P, s, params));
  }
  o.require(worst <= 1e-10, fmt("max residual %.3g", worst));
  if (o.ok) o.detail = fmt("max residual %.3g over 50 states", worst);
  return o;
}

Outcome enlarged_steps() {
  Outcome o;
  const auto inst = make_lasso(12, 8, 2024, 0.2, true);
  const auto P = inst.problem();
  const auto sol = lasso_oracle(inst.M, inst.b, inst.mu);
  const double nA = op_norm(P.A());
  o.require(std::abs(nA - 1.0) <= 1e-9, fmt("||A|| = %.17g", nA));
  std::string detail;
  for (double lambda : {0.55, 0.6, 0.65, 0.7}) {
    o.require(lambda > stepsize_bound_ct(nA) && lambda < stepsize_bound_new(nA), "step outside the claimed window");
    o.require(is_positive_definite(kernel_metric(P, StepSizes<double>::uniform(lambda))),
              fmt("metric not certified at lambda %.2f", lambda));
    const auto res = run(P, uniform_config(Kernel::ChenTeboulle, lambda), SaddleStateXd::zeros(8, 12));
    const double kkt = kkt_residual(P, res.state).max();
    const double err = (res.state.stacked() - sol.state().stacked()).norm();
    o.require(res.reason == StopReason::Converged, fmt("lambda %.2f stopped without converging", lambda));
    o.require(kkt <= 1e-6, fmt("lambda %.2f: KKT %.3g", lambda, kkt));
    o.require(err <= 1e-6, fmt("lambda %.2f: distance to oracle %.3g", lambda, err));
    detail += fmt("%.2f:%.0f it ", lambda, double(res.trace.size()));
  }
  if (o.ok) o.detail = "iterations " + detail + fmt("(oracle certificate %.2g)", sol.certificate.max());
  return o;
}

Outcome fejer() {
  Outcome o;
  int rows = 0;
  double worst_ratio = 0;
  for (int inst = 0; inst < 10; ++inst) {
    const bool lasso = inst % 2 == 0;
    const std::uint64_t seed = 6000 + inst;
    SaddleProblem<double> P = lasso ? make_lasso(7, 5, seed, 0.3, false).problem() : make_quadratic(6, 4, seed, 0.8, 1.2);
    const OracleSolution<double> ref =
        lasso ? [&] {
          const auto l = make_lasso(7, 5, seed, 0.3, false);
          return lasso_oracle(l.M, l.b, l.mu);
        }()
              : quadratic_saddle_oracle(P);
    const Kernel k = inst % 4 < 2 ? Kernel::VMetric : Kernel::ChenTeboulle;
    auto c = uniform_config(k, 0.9 * stepsize_bound_new(op_norm(P.A())));
    c.record_v_norm = true;
    c.reference_point = ref.state();
    o.require(is_positive_definite(kernel_metric(P, c.steps)), "metric not certified");
    const auto res = run(P, c, SaddleStateXd::zeros(P.n(), P.m()));
    o.require(res.reason == StopReason::Converged, "run did not converge");
    for (std::size_t i = 1; i < res.trace.size(); ++i) {
      ++rows;
      const double prev = *res.trace[i - 1].v_dist, cur = *res.trace[i].v_dist;
      if (prev > 0) worst_ratio = std::max(worst_ratio, cur / prev);
      o.require(cur <= prev * (1 + 1e-10), fmt("increase %.3g -> %.3g", prev, cur));
    }
  }
  if (o.ok) o.detail = std::to_string(rows) + " consecutive pairs, max ratio " + fmt("%.12f", worst_ratio);
  return o;
}

Outcome unequal_run(double lambda_x, double lambda_z, double lambda_y, const SaddleProblem<double>& P) {
  Outcome o;
  const StepSizes<double> steps{lambda_x, lambda_z, lambda_y};
  const auto V = kernel_metric(P, steps);
  const double schur = min_eig_sym(schur_complement(V));
  o.require(is_positive_definite(V), fmt("metric not positive definite (Schur min eigenvalue %.3g)", schur));
  SolverConfig<double> c;
  c.kernel = Kernel::VMetric;
  c.steps = steps;
  c.max_iter = 200000;
  c.tol_fixed_point = 1e-12;
  const auto res = run(P, c, SaddleStateXd::zeros(P.n(), P.m()));
  const double err = res.state.finite() ? (res.state.stacked() - quadratic_saddle_oracle(P).state().stacked()).norm()
                                        : INFINITY;
  o.require(res.reason == StopReason::Converged, std::string("run stopped: ") + std::string(to_string(res.reason)));
  o.require(err <= 1e-8, fmt("distance to oracle %.3g", err));
  if (o.ok) o.detail = fmt("Schur min eigenvalue %.3g, distance to oracle %.3g", schur, err);
  return o;
}

const SaddleProblem<double>& unequal_instance() {
  static const auto P = make_quadratic(5, 3, 71, 1.0, 1.0);
  return P;
}

Outcome unequal_literal() {
  const auto& P = unequal_instance();
  const double nA = op_norm(P.A());
  // tau_x = ||AA*||, tau_z = 1, tau_y = 0.49 as metric weights.
  return unequal_run(1.0 / (nA * nA), 1.0, 1.0 / 0.49, P);
}

Outcome unequal_step_reading() {
  const auto& P = unequal_instance();
  const double nA = op_norm(P.A());
  // Same family with 0.49 read as the dual step lambda_y.
  return unequal_run(1.0 / (nA * nA), 1.0, 0.49, P);
}

Outcome resolvent_properties() {
  Outcome o;
  InstanceGenerator gen(8008);
  double worst_fne = -INFINITY, worst_moreau = 0;
  for (int kind = 0; kind < 5; ++kind) {
    for (int k = 0; k < 100; ++k) {
      const int n = gen.integer(1, 8);
      ProxFunctionXd f = ProxFunctionXd::zero(n);
      switch (kind) {
        case 0: f = ProxFunctionXd::l1(gen.uniform(0.1, 2.0), n); break;
        case 1: f = ProxFunctionXd::quadratic_distance(gen.gaussian_vector(n), gen.uniform(0.2, 3.0)); break;
        case 2: f = ProxFunctionXd::indicator_point(gen.gaussian_vector(n)); break;
        case 3: {
          const VectorXd lo = gen.gaussian_vector(n);
          f = ProxFunctionXd::indicator_box(lo, lo + (gen.gaussian_vector(n).cwiseAbs().array() + 0.1).matrix());
          break;
        }
        default: break;
      }
      const double lambda = gen.uniform(0.1, 4.0);
      const VectorXd u = 3.0 * gen.gaussian_vector(n), v = 3.0 * gen.gaussian_vector(n);
      const VectorXd du = prox(f, lambda, u) - prox(f, lambda, v);
      const double excess = du.squaredNorm() - du.dot(u - v);
      worst_fne = std::max(worst_fne, excess);
      o.require(excess <= 1e-10, fmt("firm nonexpansiveness violated by %.3g (kind %.0f)", excess, kind));

      const VectorXd lhs = prox(f, lambda, u) + lambda * testing::conjugate_prox_closed_form(f, 1.0 / lambda, u / lambda);
      const double moreau = (lhs - u).cwiseAbs().maxCoeff();
      const double cross =
          (conjugate_prox(f, lambda, u) - testing::conjugate_prox_closed_form(f, lambda, u)).cwiseAbs().maxCoeff();
      worst_moreau = std::max({worst_moreau, moreau, cross});
      o.require(moreau <= 1e-12 * (1 + u.norm()), fmt("Moreau identity off by %.3g (kind %.0f)", moreau, kind));
      o.require(cross <= 1e-12 * (1 + u.norm()), fmt("conjugate prox off by %.3g (kind %.0f)", cross, kind));
    }
  }
  if (o.ok) o.detail = fmt("max firm-nonexpansive excess %.3g, max Moreau defect %.3g", worst_fne, worst_moreau);
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"1", "bound dominance on [0, 10]", 1.0, true, bound_dominance},
      {"2", "Schur test agrees with the full spectrum", 10.0, true, schur_vs_spectrum},
      {"3", "equal-step metric kernel reproduces Chen-Teboulle", 10.0, true, formulation_equivalence},
      {"4", "metric kernel equals the direct PPA solve", 5.0, true, ppa_identity},
      {"5", "lasso converges for steps in (0.5, 1/sqrt(2))", 30.0, true, enlarged_steps},
      {"6", "Fejer monotonicity in the V-norm", 10.0, true, fejer},
      {"7", "unequal steps tau_x = ||AA*||, tau_z = 1, tau_y = 0.49", 5.0, true, unequal_literal},
      {"7'", "(info) same family with lambda_y = 0.49", 5.0, false, unequal_step_reading},
      {"8", "firm nonexpansiveness and Moreau identity", 5.0, true, resolvent_properties},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.ok && secs > c.limit_s) {
      o.ok = false;
      o.detail = fmt("took %.2f s, limit %.0f s", secs, c.limit_s);
    }
    if (!o.ok && c.counted) ++failed;
    std::printf("%s  %-3s %s [%.3f s] %s\n", o.ok ? "PASS" : "FAIL", c.id.c_str(), c.title.c_str(), secs,
                o.detail.c_str());
  }
  std::printf("%d of %d criteria failed\n", failed, 8);
  return failed == 0 ? 0 : 1;
}

#pragma once

#include <algorithm>
#include <limits>
#include <optional>

#include "ctsplit/core_linalg.hpp"
#include "ctsplit/prox.hpp"

namespace ctsplit {

/// min_x f(x) + g(Ax), equivalently min f(x) + g(z) s.t. Ax = z.
template <typename Scalar>
class SaddleProblem {
 public:
  SaddleProblem(ProxFunction<Scalar> f, ProxFunction<Scalar> g, LinearMap<Scalar> A)
      : f_(std::move(f)), g_(std::move(g)), A_(std::move(A)) {
    if (A_.cols() != f_.dim() || A_.rows() != g_.dim())
      throw DimensionError("SaddleProblem: A is " + std::to_string(A_.rows()) + "x" +
                           std::to_string(A_.cols()) + " but dim(f)=" + std::to_string(f_.dim()) +
                           ", dim(g)=" + std::to_string(g_.dim()));
  }

  const ProxFunction<Scalar>& f() const { return f_; }
  const ProxFunction<Scalar>& g() const { return g_; }
  const LinearMap<Scalar>& A() const { return A_; }
  Eigen::Index n() const { return A_.cols(); }
  Eigen::Index m() const { return A_.rows(); }

 private:
  ProxFunction<Scalar> f_;
  ProxFunction<Scalar> g_;
  LinearMap<Scalar> A_;
};

/// Stacked primal-dual iterate (x, z, y). `p` holds the last predictor of
/// the Chen-Teboulle kernel when one has been computed.
template <typename Scalar>
struct SaddleState {
  Vector<Scalar> x;
  Vector<Scalar> z;
  Vector<Scalar> y;
  std::optional<Vector<Scalar>> p;

  static SaddleState zeros(Eigen::Index n, Eigen::Index m) {
    return {Vector<Scalar>::Zero(n), Vector<Scalar>::Zero(m), Vector<Scalar>::Zero(m), std::nullopt};
  }

  /// (x; z; y) as one vector of length n + 2m.
  Vector<Scalar> stacked() const {
    Vector<Scalar> s(x.size() + z.size() + y.size());
    s << x, z, y;
    return s;
  }

  static SaddleState from_stacked(const Vector<Scalar>& s, Eigen::Index n, Eigen::Index m) {
    if (s.size() != n + 2 * m) throw DimensionError("SaddleState: stacked vector has wrong length");
    return {s.head(n), s.segment(n, m), s.tail(m), std::nullopt};
  }

  bool finite() const {
    return x.allFinite() && z.allFinite() && y.allFinite() && (!p || p->allFinite());
  }
};

using SaddleStateXd = SaddleState<double>;

template <typename Scalar>
void check_conforms(const SaddleProblem<Scalar>& P, const SaddleState<Scalar>& s) {
  if (s.x.size() != P.n() || s.z.size() != P.m() || s.y.size() != P.m())
    throw DimensionError("SaddleState does not conform to the problem dimensions");
}

/// Distances to the optimality inclusions 0 in df(x) + A^T y, y in dg(z), z = Ax.
template <typename Scalar>
struct KktResidual {
  Scalar r_f = Scalar(0);
  Scalar r_g = Scalar(0);
  Scalar r_c = Scalar(0);

  Scalar max() const { return std::max({r_f, r_g, r_c}); }
};

/// Euclidean projection of v onto the subdifferential of f at x, or nullopt
/// when the subdifferential is empty (x outside dom f).
template <typename Scalar>
std::optional<Vector<Scalar>> project_onto_subdifferential(const ProxFunction<Scalar>& f,
                                                           const Vector<Scalar>& x,
                                                           const Vector<Scalar>& v) {
  detail::require_dim(f, x, "subdifferential");
  detail::require_dim(f, v, "subdifferential");
  const Scalar tol = Scalar(kIndicatorTolerance);
  constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();
  return std::visit(
      [&](const auto& k) -> std::optional<Vector<Scalar>> {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, kinds::L1<Scalar>>) {
          Vector<Scalar> out(x.size());
          for (Eigen::Index i = 0; i < x.size(); ++i) {
            if (x[i] > 0)
              out[i] = k.mu;
            else if (x[i] < 0)
              out[i] = -k.mu;
            else
              out[i] = std::clamp(v[i], -k.mu, k.mu);
          }
          return out;
        } else if constexpr (std::is_same_v<K, kinds::QuadraticDistance<Scalar>>) {
          return Vector<Scalar>(k.weight * (x - k.center));
        } else if constexpr (std::is_same_v<K, kinds::IndicatorPoint<Scalar>>) {
          if ((x - k.point).cwiseAbs().maxCoeff() > tol) return std::nullopt;
          return v;
        } else if constexpr (std::is_same_v<K, kinds::IndicatorBox<Scalar>>) {
          // Normal cone of the box, componentwise.
          Vector<Scalar> out(x.size());
          for (Eigen::Index i = 0; i < x.size(); ++i) {
            if (x[i] < k.lower[i] - tol || x[i] > k.upper[i] + tol) return std::nullopt;
            const bool at_lower = x[i] <= k.lower[i] + tol;
            const bool at_upper = x[i] >= k.upper[i] - tol;
            const Scalar lo = at_lower ? -inf : Scalar(0);
            const Scalar hi = at_upper ? inf : Scalar(0);
            out[i] = std::clamp(v[i], lo, hi);
          }
          return out;
        } else {
          return Vector<Scalar>(Vector<Scalar>::Zero(x.size()));
        }
      },
      f.kind());
}

/// dist(v, df(x)); +inf when df(x) is empty.
template <typename Scalar>
Scalar subdifferential_distance(const ProxFunction<Scalar>& f, const Vector<Scalar>& x,
                                const Vector<Scalar>& v) {
  const auto proj = project_onto_subdifferential(f, x, v);
  if (!proj) return std::numeric_limits<Scalar>::infinity();
  return (v - *proj).norm();
}

/// Components of the stacked monotone operator (df(x) + A^T y, dg(z) - y, z - Ax).
template <typename Scalar>
struct OperatorValue {
  Vector<Scalar> fx;
  Vector<Scalar> gz;
  Vector<Scalar> c;

  Scalar norm() const {
    return std::sqrt(fx.squaredNorm() + gz.squaredNorm() + c.squaredNorm());
  }
};

/// Minimum-norm element of the stacked operator at s. Throws DomainError
/// when x or z lies outside the domain of f or g.
template <typename Scalar>
OperatorValue<Scalar> stacked_operator_apply(const SaddleProblem<Scalar>& P,
                                             const SaddleState<Scalar>& s) {
  check_conforms(P, s);
  const Vector<Scalar> aty = adjoint_apply(P.A(), s.y);
  // The min-norm element of df(x) + a is proj_{df(x)}(-a) + a.
  const auto pf = project_onto_subdifferential(P.f(), s.x, Vector<Scalar>(-aty));
  if (!pf) throw DomainError("stacked_operator_apply: x is outside dom f");
  const auto pg = project_onto_subdifferential(P.g(), s.z, s.y);
  if (!pg) throw DomainError("stacked_operator_apply: z is outside dom g");
  return {Vector<Scalar>(*pf + aty), Vector<Scalar>(*pg - s.y),
          Vector<Scalar>(s.z - apply(P.A(), s.x))};
}

template <typename Scalar>
KktResidual<Scalar> kkt_residual(const SaddleProblem<Scalar>& P, const SaddleState<Scalar>& s) {
  check_conforms(P, s);
  const Vector<Scalar> Ax = apply(P.A(), s.x);
  KktResidual<Scalar> r;
  r.r_f = subdifferential_distance(P.f(), s.x, Vector<Scalar>(-adjoint_apply(P.A(), s.y)));
  r.r_g = subdifferential_distance(P.g(), s.z, s.y);
  r.r_c = (Ax - s.z).norm();
  return r;
}

template <typename Scalar>
Scalar primal_objective(const SaddleProblem<Scalar>& P, const Vector<Scalar>& x) {
  const Scalar fx = evaluate(P.f(), x);
  if (fx == std::numeric_limits<Scalar>::infinity()) return fx;
  return fx + evaluate(P.g(), apply(P.A(), x));
}

}  // namespace ctsplit

#pragma once

#include <limits>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>

#include "ctsplit/core_linalg.hpp"

namespace ctsplit {

/// Feasibility slack used when evaluating indicator functions.
inline constexpr double kIndicatorTolerance = 1e-9;

namespace kinds {

/// mu * ||x||_1
template <typename Scalar>
struct L1 {
  Scalar mu;
  Eigen::Index dim;
};

/// (w/2) * ||x - b||^2
template <typename Scalar>
struct QuadraticDistance {
  Vector<Scalar> center;
  Scalar weight;
};

/// Indicator of the single point {c}.
template <typename Scalar>
struct IndicatorPoint {
  Vector<Scalar> point;
};

/// Indicator of the box [lower, upper].
template <typename Scalar>
struct IndicatorBox {
  Vector<Scalar> lower;
  Vector<Scalar> upper;
};

template <typename Scalar>
struct Zero {
  Eigen::Index dim;
};

}  // namespace kinds

/// A closed, proper, convex function from a fixed catalog, each member of
/// which has a closed-form proximity operator.
template <typename Scalar>
class ProxFunction {
 public:
  using Variant = std::variant<kinds::L1<Scalar>, kinds::QuadraticDistance<Scalar>,
                               kinds::IndicatorPoint<Scalar>, kinds::IndicatorBox<Scalar>,
                               kinds::Zero<Scalar>>;

  static ProxFunction l1(Scalar mu, Eigen::Index dim) {
    if (!(mu > Scalar(0))) throw ParameterError("L1: weight must be positive");
    check_dim(dim);
    return ProxFunction(kinds::L1<Scalar>{mu, dim});
  }
  static ProxFunction quadratic_distance(Vector<Scalar> center, Scalar weight = Scalar(1)) {
    if (!(weight > Scalar(0))) throw ParameterError("QuadraticDistance: weight must be positive");
    check_dim(center.size());
    check_finite(center, "QuadraticDistance center");
    return ProxFunction(kinds::QuadraticDistance<Scalar>{std::move(center), weight});
  }
  static ProxFunction indicator_point(Vector<Scalar> point) {
    check_dim(point.size());
    check_finite(point, "IndicatorPoint point");
    return ProxFunction(kinds::IndicatorPoint<Scalar>{std::move(point)});
  }
  static ProxFunction indicator_box(Vector<Scalar> lower, Vector<Scalar> upper) {
    check_dim(lower.size());
    if (lower.size() != upper.size()) throw DimensionError("IndicatorBox: bound sizes differ");
    check_finite(lower, "IndicatorBox lower");
    check_finite(upper, "IndicatorBox upper");
    if ((lower.array() > upper.array()).any())
      throw ParameterError("IndicatorBox: lower bound exceeds upper bound");
    return ProxFunction(kinds::IndicatorBox<Scalar>{std::move(lower), std::move(upper)});
  }
  static ProxFunction zero(Eigen::Index dim) {
    check_dim(dim);
    return ProxFunction(kinds::Zero<Scalar>{dim});
  }

  Eigen::Index dim() const {
    return std::visit(
        [](const auto& k) -> Eigen::Index {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, kinds::L1<Scalar>> || std::is_same_v<K, kinds::Zero<Scalar>>)
            return k.dim;
          else if constexpr (std::is_same_v<K, kinds::QuadraticDistance<Scalar>>)
            return k.center.size();
          else if constexpr (std::is_same_v<K, kinds::IndicatorPoint<Scalar>>)
            return k.point.size();
          else
            return k.lower.size();
        },
        kind_);
  }

  const Variant& kind() const { return kind_; }

  template <typename K>
  bool is() const { return std::holds_alternative<K>(kind_); }
  bool is_quadratic() const { return is<kinds::QuadraticDistance<Scalar>>(); }

  std::string name() const {
    static constexpr const char* names[] = {"l1", "quadratic", "point", "box", "zero"};
    return names[kind_.index()];
  }

 private:
  explicit ProxFunction(Variant k) : kind_(std::move(k)) {}

  static void check_dim(Eigen::Index dim) {
    if (dim <= 0) throw DimensionError("ProxFunction: dimension must be positive");
  }
  static void check_finite(const Vector<Scalar>& v, const char* what) {
    if (!v.allFinite()) throw ParameterError(std::string(what) + " must be finite");
  }

  Variant kind_;
};

using ProxFunctionXd = ProxFunction<double>;

namespace detail {

template <typename Scalar, typename Derived>
void require_dim(const ProxFunction<Scalar>& f, const Eigen::MatrixBase<Derived>& u, const char* op) {
  if (u.size() != f.dim())
    throw DimensionError(std::string(op) + ": dim(u)=" + std::to_string(u.size()) +
                         " but dim(f)=" + std::to_string(f.dim()));
}

template <typename Scalar>
void require_positive(Scalar v, const char* op) {
  if (!(v > Scalar(0)) || !std::isfinite(double(v)))
    throw ParameterError(std::string(op) + ": step parameter must be positive and finite");
}

}  // namespace detail

/// argmin_x f(x) + 1/(2 lambda) ||x - u||^2
template <typename Derived, typename Scalar = typename Derived::Scalar>
Vector<Scalar> prox(const ProxFunction<Scalar>& f, std::type_identity_t<Scalar> lambda,
                    const Eigen::MatrixBase<Derived>& u_expr) {
  const Vector<Scalar> u = u_expr;
  detail::require_positive(lambda, "prox");
  detail::require_dim(f, u, "prox");
  return std::visit(
      [&](const auto& k) -> Vector<Scalar> {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, kinds::L1<Scalar>>) {
          const Scalar t = lambda * k.mu;
          return u.unaryExpr([t](Scalar v) {
            if (v > t) return v - t;
            if (v < -t) return v + t;
            return Scalar(0);
          });
        } else if constexpr (std::is_same_v<K, kinds::QuadraticDistance<Scalar>>) {
          const Scalar lw = lambda * k.weight;
          return (u + lw * k.center) / (Scalar(1) + lw);
        } else if constexpr (std::is_same_v<K, kinds::IndicatorPoint<Scalar>>) {
          return k.point;
        } else if constexpr (std::is_same_v<K, kinds::IndicatorBox<Scalar>>) {
          return u.cwiseMax(k.lower).cwiseMin(k.upper);
        } else {
          return u;
        }
      },
      f.kind());
}

/// (df + tau I)^{-1}(w), i.e. prox(f, 1/tau, w/tau).
template <typename Derived, typename Scalar = typename Derived::Scalar>
Vector<Scalar> resolvent_scaled(const ProxFunction<Scalar>& f, std::type_identity_t<Scalar> tau,
                                const Eigen::MatrixBase<Derived>& w) {
  detail::require_positive(tau, "resolvent_scaled");
  return prox(f, Scalar(1) / tau, w / tau);
}

/// prox of lambda * f^* at u, through the Moreau decomposition.
template <typename Derived, typename Scalar = typename Derived::Scalar>
Vector<Scalar> conjugate_prox(const ProxFunction<Scalar>& f, std::type_identity_t<Scalar> lambda,
                              const Eigen::MatrixBase<Derived>& u_expr) {
  detail::require_positive(lambda, "conjugate_prox");
  const Vector<Scalar> u = u_expr;
  return u - lambda * prox(f, Scalar(1) / lambda, u / lambda);
}

/// f(x); +inf outside the domain of an indicator (slack kIndicatorTolerance).
template <typename Derived, typename Scalar = typename Derived::Scalar>
Scalar evaluate(const ProxFunction<Scalar>& f, const Eigen::MatrixBase<Derived>& x_expr) {
  const Vector<Scalar> x = x_expr;
  detail::require_dim(f, x, "evaluate");
  constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();
  const Scalar tol = Scalar(kIndicatorTolerance);
  return std::visit(
      [&](const auto& k) -> Scalar {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, kinds::L1<Scalar>>) {
          return k.mu * x.template lpNorm<1>();
        } else if constexpr (std::is_same_v<K, kinds::QuadraticDistance<Scalar>>) {
          return Scalar(0.5) * k.weight * (x - k.center).squaredNorm();
        } else if constexpr (std::is_same_v<K, kinds::IndicatorPoint<Scalar>>) {
          return (x - k.point).cwiseAbs().maxCoeff() <= tol ? Scalar(0) : inf;
        } else if constexpr (std::is_same_v<K, kinds::IndicatorBox<Scalar>>) {
          const bool inside = ((x.array() >= k.lower.array() - tol) &&
                               (x.array() <= k.upper.array() + tol)).all();
          return inside ? Scalar(0) : inf;
        } else {
          return Scalar(0);
        }
      },
      f.kind());
}

}  // namespace ctsplit

#pragma once

// Scalar helpers shared by the templated physics and flux kernels. Every
// kernel is written once for a generic scalar T and instantiated with
// double (residual) and Eigen::AutoDiffScalar (exact local Jacobians).

#include <Eigen/Core>
#include <unsupported/Eigen/AutoDiff>

#include <type_traits>

namespace fvgw {

template <int N>
using Dual = Eigen::AutoDiffScalar<Eigen::Matrix<double, N, 1>>;

template <typename T>
struct is_dual : std::false_type {};

template <typename D>
struct is_dual<Eigen::AutoDiffScalar<D>> : std::true_type {};

template <typename T>
inline constexpr bool is_dual_v = is_dual<std::decay_t<T>>::value;

template <typename T>
double value_of(const T& x) {
  if constexpr (is_dual_v<T>) {
    return x.value();
  } else {
    return static_cast<double>(x);
  }
}

/// Builds f(x) from a precomputed value and derivative, applying the chain
/// rule when x carries derivatives.
template <typename T>
T chain(const T& x, double f, double dfdx) {
  if constexpr (is_dual_v<T>) {
    return T(f, (dfdx * x.derivatives()).eval());
  } else {
    (void)x;
    (void)dfdx;
    return f;
  }
}

/// Overwrites the value of x while keeping its derivatives.
template <typename T>
T with_value(const T& x, double v) {
  if constexpr (is_dual_v<T>) {
    return T(v, x.derivatives());
  } else {
    (void)x;
    return v;
  }
}

template <typename T>
T constant_like(const T&, double v) {
  return T(v);
}

/// c^+ = max(c, 0).
template <typename T>
T positive_part(const T& c) {
  return value_of(c) >= 0.0 ? T(c) : constant_like(c, 0.0);
}

/// c^- = max(-c, 0).
template <typename T>
T negative_part(const T& c) {
  return value_of(c) < 0.0 ? T(-c) : constant_like(c, 0.0);
}

template <typename T>
T clamp_scalar(const T& x, double lo, double hi) {
  const double v = value_of(x);
  if (v < lo) return constant_like(x, lo);
  if (v > hi) return constant_like(x, hi);
  return x;
}

}  // namespace fvgw

#pragma once

// Forward-mode dual number carrying a single tangent direction.
//
// Dual<T>{val, eps} represents val + eps*e with e*e = 0. Arithmetic is
// closed over the operations the pipeline needs (ring ops, exp, sqrt, sin,
// cos), and Eigen::NumTraits is specialized so Dual can be a matrix scalar.

#include <cmath>
#include <ostream>

#include <Eigen/Core>

namespace gbs {

template <typename T>
struct Dual {
  T val{};
  T eps{};

  constexpr Dual() = default;
  constexpr Dual(T v) : val(v), eps(0) {}  // NOLINT(google-explicit-constructor)
  constexpr Dual(T v, T e) : val(v), eps(e) {}

  Dual& operator+=(const Dual& o) {
    val += o.val;
    eps += o.eps;
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    val -= o.val;
    eps -= o.eps;
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    eps = eps * o.val + val * o.eps;
    val *= o.val;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    eps = (eps * o.val - val * o.eps) / (o.val * o.val);
    val /= o.val;
    return *this;
  }
};

template <typename T> Dual<T> operator+(Dual<T> a, const Dual<T>& b) { return a += b; }
template <typename T> Dual<T> operator-(Dual<T> a, const Dual<T>& b) { return a -= b; }
template <typename T> Dual<T> operator*(Dual<T> a, const Dual<T>& b) { return a *= b; }
template <typename T> Dual<T> operator/(Dual<T> a, const Dual<T>& b) { return a /= b; }
template <typename T> Dual<T> operator-(const Dual<T>& a) { return {-a.val, -a.eps}; }
template <typename T> Dual<T> operator+(const Dual<T>& a) { return a; }

template <typename T> Dual<T> operator+(Dual<T> a, T b) { a.val += b; return a; }
template <typename T> Dual<T> operator+(T b, Dual<T> a) { a.val += b; return a; }
template <typename T> Dual<T> operator-(Dual<T> a, T b) { a.val -= b; return a; }
template <typename T> Dual<T> operator-(T b, const Dual<T>& a) { return {b - a.val, -a.eps}; }
template <typename T> Dual<T> operator*(const Dual<T>& a, T b) { return {a.val * b, a.eps * b}; }
template <typename T> Dual<T> operator*(T b, const Dual<T>& a) { return {a.val * b, a.eps * b}; }
template <typename T> Dual<T> operator/(const Dual<T>& a, T b) { return {a.val / b, a.eps / b}; }

template <typename T> bool operator==(const Dual<T>& a, const Dual<T>& b) {
  return a.val == b.val && a.eps == b.eps;
}
template <typename T> bool operator!=(const Dual<T>& a, const Dual<T>& b) { return !(a == b); }
// Ordering looks at the primal value only.
template <typename T> bool operator<(const Dual<T>& a, const Dual<T>& b) { return a.val < b.val; }
template <typename T> bool operator>(const Dual<T>& a, const Dual<T>& b) { return a.val > b.val; }
template <typename T> bool operator<=(const Dual<T>& a, const Dual<T>& b) { return a.val <= b.val; }
template <typename T> bool operator>=(const Dual<T>& a, const Dual<T>& b) { return a.val >= b.val; }

template <typename T> Dual<T> exp(const Dual<T>& a) {
  const T e = std::exp(a.val);
  return {e, e * a.eps};
}
template <typename T> Dual<T> sqrt(const Dual<T>& a) {
  const T s = std::sqrt(a.val);
  return {s, a.eps / (T(2) * s)};
}
template <typename T> Dual<T> sin(const Dual<T>& a) {
  return {std::sin(a.val), std::cos(a.val) * a.eps};
}
template <typename T> Dual<T> cos(const Dual<T>& a) {
  return {std::cos(a.val), -std::sin(a.val) * a.eps};
}
template <typename T> Dual<T> abs(const Dual<T>& a) { return a.val < T(0) ? -a : a; }

template <typename T> std::ostream& operator<<(std::ostream& os, const Dual<T>& a) {
  return os << a.val << "+" << a.eps << "e";
}

/// Primal part of a scalar; identity for plain arithmetic types.
inline double primal(double x) { return x; }
template <typename T> T primal(const Dual<T>& x) { return x.val; }

inline bool is_exact_zero(double x) { return x == 0.0; }
template <typename T> bool is_exact_zero(const Dual<T>& x) { return x.val == T(0) && x.eps == T(0); }

}  // namespace gbs

namespace Eigen {

template <typename T>
struct NumTraits<gbs::Dual<T>> : NumTraits<T> {
  using Real = gbs::Dual<T>;
  using NonInteger = gbs::Dual<T>;
  using Nested = gbs::Dual<T>;
  using Literal = gbs::Dual<T>;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2 * NumTraits<T>::ReadCost,
    AddCost = 2 * NumTraits<T>::AddCost,
    MulCost = 3 * NumTraits<T>::MulCost
  };
};

}  // namespace Eigen

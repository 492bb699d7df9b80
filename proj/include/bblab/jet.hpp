#pragma once

// Second-order forward differentiation in two chart variables.
//
// Jet<double> carries f, grad f and the packed symmetric Hessian (xx, xy, yy).
// Jet<Jet<double>> nests the same construction: its slots are themselves
// jets in the same two variables, which exposes derivatives up to third
// order (needed for derivatives of Christoffel symbols and of fields built
// from the tangent frame).

#include "bblab/errors.hpp"
#include "bblab/types.hpp"

#include <array>
#include <cmath>
#include <span>
#include <type_traits>

namespace bblab {

/// Index into the packed Hessian for d^2 / (d_i d_j), i, j in {0, 1}.
constexpr int hess_slot(int i, int j) { return i + j; }

template <class T>
struct Jet {
  T val{};
  std::array<T, 2> d{};
  std::array<T, 3> d2{};  // xx, xy, yy

  constexpr Jet() = default;
  template <class U>
    requires std::is_arithmetic_v<U>
  constexpr Jet(U c) : val(T(static_cast<double>(c))), d{T(0.0), T(0.0)}, d2{T(0.0), T(0.0), T(0.0)} {}
  constexpr Jet(T v, std::array<T, 2> g, std::array<T, 3> h) : val(std::move(v)), d(std::move(g)), d2(std::move(h)) {}

  const T& hess(int i, int j) const { return d2[hess_slot(i, j)]; }
};

using Jet2 = Jet<double>;
/// Jet whose slots are jets: exposes derivatives through third order.
using NestedJet = Jet<Jet<double>>;

inline double primal(double v) { return v; }
template <class T>
double primal(const Jet<T>& j) {
  return primal(j.val);
}

namespace detail {

// Chain rule for a unary primitive with value g0 and derivatives g1, g2 at a.val.
template <class T>
Jet<T> chain(const Jet<T>& a, const T& g0, const T& g1, const T& g2) {
  Jet<T> r;
  r.val = g0;
  r.d[0] = g1 * a.d[0];
  r.d[1] = g1 * a.d[1];
  r.d2[0] = g1 * a.d2[0] + g2 * (a.d[0] * a.d[0]);
  r.d2[1] = g1 * a.d2[1] + g2 * (a.d[0] * a.d[1]);
  r.d2[2] = g1 * a.d2[2] + g2 * (a.d[1] * a.d[1]);
  return r;
}

}  // namespace detail

template <class T>
Jet<T> operator-(const Jet<T>& a) {
  return {-a.val, {-a.d[0], -a.d[1]}, {-a.d2[0], -a.d2[1], -a.d2[2]}};
}

template <class T>
Jet<T> operator+(const Jet<T>& a, const Jet<T>& b) {
  return {a.val + b.val, {a.d[0] + b.d[0], a.d[1] + b.d[1]}, {a.d2[0] + b.d2[0], a.d2[1] + b.d2[1], a.d2[2] + b.d2[2]}};
}

template <class T>
Jet<T> operator-(const Jet<T>& a, const Jet<T>& b) {
  return {a.val - b.val, {a.d[0] - b.d[0], a.d[1] - b.d[1]}, {a.d2[0] - b.d2[0], a.d2[1] - b.d2[1], a.d2[2] - b.d2[2]}};
}

template <class T>
Jet<T> operator*(const Jet<T>& a, const Jet<T>& b) {
  Jet<T> r;
  r.val = a.val * b.val;
  r.d[0] = a.d[0] * b.val + a.val * b.d[0];
  r.d[1] = a.d[1] * b.val + a.val * b.d[1];
  r.d2[0] = a.d2[0] * b.val + (a.d[0] * b.d[0] + a.d[0] * b.d[0]) + a.val * b.d2[0];
  r.d2[1] = a.d2[1] * b.val + (a.d[0] * b.d[1] + a.d[1] * b.d[0]) + a.val * b.d2[1];
  r.d2[2] = a.d2[2] * b.val + (a.d[1] * b.d[1] + a.d[1] * b.d[1]) + a.val * b.d2[2];
  return r;
}

template <class T>
Jet<T> operator*(const Jet<T>& a, double s) {
  return {a.val * s, {a.d[0] * s, a.d[1] * s}, {a.d2[0] * s, a.d2[1] * s, a.d2[2] * s}};
}
template <class T>
Jet<T> operator*(double s, const Jet<T>& a) {
  return a * s;
}
template <class T>
Jet<T> operator+(const Jet<T>& a, double s) {
  Jet<T> r = a;
  r.val = r.val + s;
  return r;
}
template <class T>
Jet<T> operator+(double s, const Jet<T>& a) {
  return a + s;
}
template <class T>
Jet<T> operator-(const Jet<T>& a, double s) {
  return a + (-s);
}
template <class T>
Jet<T> operator-(double s, const Jet<T>& a) {
  return (-a) + s;
}

template <class T>
Jet<T> reciprocal(const Jet<T>& a) {
  if (primal(a) == 0.0) throw DomainError("jet division by zero");
  const T inv = T(1.0) / a.val;
  const T inv2 = inv * inv;
  return detail::chain(a, inv, -inv2, 2.0 * (inv2 * inv));
}

inline double reciprocal(double a) {
  if (a == 0.0) throw DomainError("division by zero");
  return 1.0 / a;
}

template <class T>
Jet<T> operator/(const Jet<T>& a, const Jet<T>& b) {
  return a * reciprocal(b);
}
template <class T>
Jet<T> operator/(const Jet<T>& a, double s) {
  if (s == 0.0) throw DomainError("jet division by zero");
  return a * (1.0 / s);
}
template <class T>
Jet<T> operator/(double s, const Jet<T>& a) {
  return s * reciprocal(a);
}

template <class T>
Jet<T>& operator+=(Jet<T>& a, const Jet<T>& b) {
  return a = a + b;
}
template <class T>
Jet<T>& operator-=(Jet<T>& a, const Jet<T>& b) {
  return a = a - b;
}
template <class T>
Jet<T>& operator*=(Jet<T>& a, const Jet<T>& b) {
  return a = a * b;
}

template <class T>
Jet<T> sin(const Jet<T>& a) {
  using std::cos;
  using std::sin;
  const T s = sin(a.val);
  return detail::chain(a, s, cos(a.val), -s);
}

template <class T>
Jet<T> cos(const Jet<T>& a) {
  using std::cos;
  using std::sin;
  const T c = cos(a.val);
  return detail::chain(a, c, -sin(a.val), -c);
}

template <class T>
Jet<T> sinh(const Jet<T>& a) {
  using std::cosh;
  using std::sinh;
  const T s = sinh(a.val);
  return detail::chain(a, s, cosh(a.val), s);
}

template <class T>
Jet<T> cosh(const Jet<T>& a) {
  using std::cosh;
  using std::sinh;
  const T c = cosh(a.val);
  return detail::chain(a, c, sinh(a.val), c);
}

template <class T>
Jet<T> exp(const Jet<T>& a) {
  using std::exp;
  const T e = exp(a.val);
  return detail::chain(a, e, e, e);
}

template <class T>
Jet<T> sqrt(const Jet<T>& a) {
  using std::sqrt;
  if (!(primal(a) > 0.0)) throw DomainError("jet sqrt of a nonpositive value");
  const T s = sqrt(a.val);
  const T ds = 0.5 / s;
  return detail::chain(a, s, ds, -0.5 * (ds / a.val));
}

/// Coordinate jets of the chart point (x, y).
inline std::pair<Jet2, Jet2> lift_chart(double x, double y) {
  return {Jet2(x, {1.0, 0.0}, {0.0, 0.0, 0.0}), Jet2(y, {0.0, 1.0}, {0.0, 0.0, 0.0})};
}

inline std::pair<NestedJet, NestedJet> lift_chart_nested(double x, double y) {
  const auto [ix, iy] = lift_chart(x, y);
  return {NestedJet(ix, {Jet2(1.0), Jet2(0.0)}, {Jet2(0.0), Jet2(0.0), Jet2(0.0)}),
          NestedJet(iy, {Jet2(0.0), Jet2(1.0)}, {Jet2(0.0), Jet2(0.0), Jet2(0.0)})};
}

/// Map into R^n with every component a jet in the same two chart variables.
template <class T>
struct JetVec {
  int n = 0;
  std::array<Jet<T>, kMaxDim> comp{};

  explicit JetVec(int dim = 0) : n(dim) {}

  Jet<T>& operator[](int k) { return comp[k]; }
  const Jet<T>& operator[](int k) const { return comp[k]; }
  std::span<Jet<T>> span() { return {comp.data(), static_cast<std::size_t>(n)}; }
  std::span<const Jet<T>> span() const { return {comp.data(), static_cast<std::size_t>(n)}; }
};

using Jet2Vector = JetVec<double>;

inline Vec value_of(const Jet2Vector& j) {
  Vec v(j.n);
  for (int k = 0; k < j.n; ++k) v[k] = j[k].val;
  return v;
}

inline Vec partial_of(const Jet2Vector& j, int i) {
  Vec v(j.n);
  for (int k = 0; k < j.n; ++k) v[k] = j[k].d[i];
  return v;
}

inline Vec second_of(const Jet2Vector& j, int i, int k2) {
  Vec v(j.n);
  for (int k = 0; k < j.n; ++k) v[k] = j[k].hess(i, k2);
  return v;
}

/// Wirtinger derivatives f_z = (f_x - i f_y)/2 and f_zz = (f_xx - 2i f_xy - f_yy)/4.
struct ZDerivatives {
  ComplexVec fz;
  ComplexVec fzz;
};

inline ZDerivatives complex_z_derivatives(const Jet2Vector& j) {
  const Vec fx = partial_of(j, 0);
  const Vec fy = partial_of(j, 1);
  const Vec fxx = second_of(j, 0, 0);
  const Vec fxy = second_of(j, 0, 1);
  const Vec fyy = second_of(j, 1, 1);
  return {ComplexVec(0.5 * fx, -0.5 * fy), ComplexVec(0.25 * (fxx - fyy), -0.5 * fxy)};
}

/// Dot product of two jet-valued vectors, itself a jet.
template <class T>
Jet<T> dot(const JetVec<T>& a, const JetVec<T>& b) {
  Jet<T> s(0.0);
  for (int k = 0; k < a.n; ++k) s += a[k] * b[k];
  return s;
}

}  // namespace bblab

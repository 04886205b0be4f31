#pragma once

// Forward-mode automatic differentiation with nestable dual numbers.
//
// Dual<T, N> carries a value and N directional derivatives, each of type T.
// Nesting Dual<Dual<double, N>, N> yields exact second partials, and one more
// level yields third partials. Every closed-form field in the library is a
// template over its scalar type so that it can be evaluated on these.

#include <array>
#include <cmath>

namespace hypmass {

template <class T, int N>
struct Dual {
  T v{};
  std::array<T, N> d{};

  constexpr Dual() = default;
  constexpr Dual(double c) : v(c) {}  // NOLINT: implicit promotion of constants
  constexpr Dual(const T& value, const std::array<T, N>& grad) : v(value), d(grad) {}

  Dual& operator+=(const Dual& o) {
    v += o.v;
    for (int i = 0; i < N; ++i) d[i] += o.d[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (int i = 0; i < N; ++i) d[i] -= o.d[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    for (int i = 0; i < N; ++i) d[i] = d[i] * o.v + v * o.d[i];
    v *= o.v;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    const T inv = T(1.0) / o.v;
    v *= inv;
    for (int i = 0; i < N; ++i) d[i] = (d[i] - v * o.d[i]) * inv;
    return *this;
  }
};

template <class T>
struct is_dual : std::false_type {};
template <class T, int N>
struct is_dual<Dual<T, N>> : std::true_type {};

template <class T, int N>
Dual<T, N> operator-(const Dual<T, N>& a) {
  Dual<T, N> r;
  r.v = -a.v;
  for (int i = 0; i < N; ++i) r.d[i] = -a.d[i];
  return r;
}

template <class T, int N>
Dual<T, N> operator+(Dual<T, N> a, const Dual<T, N>& b) { return a += b; }
template <class T, int N>
Dual<T, N> operator-(Dual<T, N> a, const Dual<T, N>& b) { return a -= b; }
template <class T, int N>
Dual<T, N> operator*(Dual<T, N> a, const Dual<T, N>& b) { return a *= b; }
template <class T, int N>
Dual<T, N> operator/(Dual<T, N> a, const Dual<T, N>& b) { return a /= b; }

template <class T, int N>
Dual<T, N> operator+(Dual<T, N> a, double c) { a.v += c; return a; }
template <class T, int N>
Dual<T, N> operator+(double c, Dual<T, N> a) { a.v += c; return a; }
template <class T, int N>
Dual<T, N> operator-(Dual<T, N> a, double c) { a.v -= c; return a; }
template <class T, int N>
Dual<T, N> operator-(double c, const Dual<T, N>& a) { return Dual<T, N>(c) - a; }
template <class T, int N>
Dual<T, N> operator*(Dual<T, N> a, double c) {
  a.v *= c;
  for (auto& x : a.d) x *= c;
  return a;
}
template <class T, int N>
Dual<T, N> operator*(double c, Dual<T, N> a) { return a * c; }
template <class T, int N>
Dual<T, N> operator/(Dual<T, N> a, double c) { return a * (1.0 / c); }
template <class T, int N>
Dual<T, N> operator/(double c, const Dual<T, N>& a) { return Dual<T, N>(c) / a; }

// Chain rule helper: f(a) given f(a.v) and f'(a.v).
template <class T, int N>
Dual<T, N> chain(const Dual<T, N>& a, const T& f, const T& df) {
  Dual<T, N> r;
  r.v = f;
  for (int i = 0; i < N; ++i) r.d[i] = df * a.d[i];
  return r;
}

template <class T, int N>
Dual<T, N> sin(const Dual<T, N>& a) { using std::sin, std::cos; return chain(a, sin(a.v), cos(a.v)); }
template <class T, int N>
Dual<T, N> cos(const Dual<T, N>& a) { using std::sin, std::cos; return chain(a, cos(a.v), T(-sin(a.v))); }
template <class T, int N>
Dual<T, N> sinh(const Dual<T, N>& a) { using std::sinh, std::cosh; return chain(a, sinh(a.v), cosh(a.v)); }
template <class T, int N>
Dual<T, N> cosh(const Dual<T, N>& a) { using std::sinh, std::cosh; return chain(a, cosh(a.v), sinh(a.v)); }
template <class T, int N>
Dual<T, N> tanh(const Dual<T, N>& a) {
  using std::tanh;
  const T t = tanh(a.v);
  return chain(a, t, T(1.0 - t * t));
}
template <class T, int N>
Dual<T, N> exp(const Dual<T, N>& a) {
  using std::exp;
  const T e = exp(a.v);
  return chain(a, e, e);
}
template <class T, int N>
Dual<T, N> log(const Dual<T, N>& a) { using std::log; return chain(a, log(a.v), T(1.0 / a.v)); }
template <class T, int N>
Dual<T, N> sqrt(const Dual<T, N>& a) {
  using std::sqrt;
  const T s = sqrt(a.v);
  return chain(a, s, T(0.5 / s));
}
template <class T, int N>
Dual<T, N> acosh(const Dual<T, N>& a) {
  using std::acosh, std::sqrt;
  return chain(a, acosh(a.v), T(1.0 / sqrt(a.v * a.v - 1.0)));
}
template <class T, int N>
Dual<T, N> asinh(const Dual<T, N>& a) {
  using std::asinh, std::sqrt;
  return chain(a, asinh(a.v), T(1.0 / sqrt(a.v * a.v + 1.0)));
}

// Underlying double value of a (possibly nested) scalar.
inline double value_of(double x) { return x; }
template <class T, int N>
double value_of(const Dual<T, N>& x) { return value_of(x.v); }

// Value, gradient and Hessian extracted from a second-order nested dual.
template <int N>
struct Jet2 {
  double val = 0.0;
  std::array<double, N> grad{};
  std::array<std::array<double, N>, N> hess{};
};

template <int N>
using Dual1 = Dual<double, N>;
template <int N>
using Dual2 = Dual<Dual<double, N>, N>;
template <int N>
using Dual3 = Dual<Dual<Dual<double, N>, N>, N>;

template <int N>
std::array<Dual1<N>, N> seed1(const std::array<double, N>& x) {
  std::array<Dual1<N>, N> out;
  for (int i = 0; i < N; ++i) {
    out[i].v = x[i];
    out[i].d[i] = 1.0;
  }
  return out;
}

template <int N>
std::array<Dual2<N>, N> seed2(const std::array<double, N>& x) {
  std::array<Dual2<N>, N> out;
  for (int i = 0; i < N; ++i) {
    out[i].v.v = x[i];
    out[i].v.d[i] = 1.0;
    out[i].d[i].v = 1.0;
  }
  return out;
}

template <int N>
std::array<Dual3<N>, N> seed3(const std::array<double, N>& x) {
  std::array<Dual3<N>, N> out;
  for (int i = 0; i < N; ++i) {
    out[i].v.v.v = x[i];
    out[i].v.v.d[i] = 1.0;
    out[i].v.d[i].v = 1.0;
    out[i].d[i].v.v = 1.0;
  }
  return out;
}

template <int N>
Jet2<N> jet_of(const Dual2<N>& f) {
  Jet2<N> j;
  j.val = f.v.v;
  for (int i = 0; i < N; ++i) {
    j.grad[i] = f.v.d[i];
    for (int k = 0; k < N; ++k) j.hess[i][k] = f.d[i].d[k];
  }
  return j;
}

}  // namespace hypmass

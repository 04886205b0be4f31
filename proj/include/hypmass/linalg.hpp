#pragma once

// Dense chart-indexed tensors at a point and the few dense operations the
// geometry needs. Sizes are compile-time; all storage is by value.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "hypmass/errors.hpp"

namespace hypmass {

template <class T, int N>
using VecT = std::array<T, N>;
template <class T, int N>
using MatT = std::array<std::array<T, N>, N>;
// Tensor3 is indexed [upper][lower][lower], e.g. Gamma^k_{ij} = t[k][i][j].
template <class T, int N>
using Tensor3T = std::array<MatT<T, N>, N>;

template <int N>
using Vec = VecT<double, N>;
template <int N>
using Mat = MatT<double, N>;
template <int N>
using Tensor3 = Tensor3T<double, N>;
// Generic 3-slot array of covariant-derivative data, indexed in slot order.
template <int N>
using Array3 = Tensor3<N>;
template <int N>
using Tensor4 = std::array<Tensor3<N>, N>;

template <class T, int N>
MatT<T, N> zero_mat() {
  MatT<T, N> m;
  for (auto& row : m) row.fill(T(0.0));
  return m;
}

template <int N>
Mat<N> identity() {
  Mat<N> m = zero_mat<double, N>();
  for (int i = 0; i < N; ++i) m[i][i] = 1.0;
  return m;
}

template <int N>
Tensor3<N> zero3() {
  Tensor3<N> t;
  for (auto& m : t) m = zero_mat<double, N>();
  return t;
}

template <int N>
Tensor4<N> zero4() {
  Tensor4<N> t;
  for (auto& m : t) m = zero3<N>();
  return t;
}

template <int N>
Mat<N> matmul(const Mat<N>& a, const Mat<N>& b) {
  Mat<N> c = zero_mat<double, N>();
  for (int i = 0; i < N; ++i)
    for (int k = 0; k < N; ++k)
      for (int j = 0; j < N; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

template <int N>
double trace(const Mat<N>& a) {
  double t = 0.0;
  for (int i = 0; i < N; ++i) t += a[i][i];
  return t;
}

// Contraction inv^{ij} m_{ij}.
template <int N>
double contract(const Mat<N>& inv, const Mat<N>& m) {
  double t = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) t += inv[i][j] * m[i][j];
  return t;
}

// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
template <int N>
Mat<N> cholesky(const Mat<N>& a, const char* what = "matrix") {
  Mat<N> l = zero_mat<double, N>();
  for (int j = 0; j < N; ++j) {
    double d = a[j][j];
    for (int k = 0; k < j; ++k) d -= l[j][k] * l[j][k];
    if (!(d > 0.0))
      throw NotPositiveDefiniteError(std::string(what) + " is not positive definite (pivot " +
                                     std::to_string(j) + " = " + std::to_string(d) + ")");
    l[j][j] = std::sqrt(d);
    for (int i = j + 1; i < N; ++i) {
      double s = a[i][j];
      for (int k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
      l[i][j] = s / l[j][j];
    }
  }
  return l;
}

template <int N>
Mat<N> lower_inverse(const Mat<N>& l) {
  Mat<N> inv = zero_mat<double, N>();
  for (int j = 0; j < N; ++j) {
    inv[j][j] = 1.0 / l[j][j];
    for (int i = j + 1; i < N; ++i) {
      double s = 0.0;
      for (int k = j; k < i; ++k) s -= l[i][k] * inv[k][j];
      inv[i][j] = s / l[i][i];
    }
  }
  return inv;
}

// Inverse of a symmetric positive-definite matrix; throws if not SPD.
template <int N>
Mat<N> spd_inverse(const Mat<N>& a, const char* what = "matrix") {
  const Mat<N> li = lower_inverse<N>(cholesky<N>(a, what));
  Mat<N> inv = zero_mat<double, N>();
  for (int i = 0; i < N; ++i)
    for (int j = 0; j <= i; ++j) {
      double s = 0.0;
      for (int k = i; k < N; ++k) s += li[k][i] * li[k][j];
      inv[i][j] = s;
      inv[j][i] = s;
    }
  return inv;
}

template <int N>
double determinant_spd(const Mat<N>& a) {
  const Mat<N> l = cholesky<N>(a);
  double d = 1.0;
  for (int i = 0; i < N; ++i) d *= l[i][i] * l[i][i];
  return d;
}

// Norms induced by a metric with inverse `inv`.
template <int N>
double norm_vec_lower(const Mat<N>& inv, const Vec<N>& w) {
  double s = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) s += inv[i][j] * w[i] * w[j];
  return std::sqrt(std::abs(s));
}

template <int N>
double norm2_lower(const Mat<N>& inv, const Mat<N>& t) {
  const Mat<N> a = matmul<N>(inv, t);  // t^i_j
  const Mat<N> c = matmul<N>(a, inv);  // t^{ij}
  double s = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) s += c[i][j] * t[i][j];
  return std::sqrt(std::abs(s));
}

// Norm of a fully covariant 3-slot array.
template <int N>
double norm3_lower(const Mat<N>& inv, const Array3<N>& t) {
  double s = 0.0;
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      for (int c = 0; c < N; ++c) {
        if (t[a][b][c] == 0.0) continue;
        for (int i = 0; i < N; ++i)
          for (int j = 0; j < N; ++j)
            for (int k = 0; k < N; ++k)
              s += inv[a][i] * inv[b][j] * inv[c][k] * t[a][b][c] * t[i][j][k];
      }
  return std::sqrt(std::abs(s));
}

// Norm of a fully covariant 4-slot array.
template <int N>
double norm4_lower(const Mat<N>& inv, const Tensor4<N>& t) {
  // raise all indices one slot at a time
  Tensor4<N> up = t;
  for (int slot = 0; slot < 4; ++slot) {
    Tensor4<N> next = zero4<N>();
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b)
        for (int c = 0; c < N; ++c)
          for (int d = 0; d < N; ++d) {
            std::array<int, 4> idx{a, b, c, d};
            double s = 0.0;
            for (int m = 0; m < N; ++m) {
              std::array<int, 4> j = idx;
              j[slot] = m;
              s += inv[idx[slot]][m] * up[j[0]][j[1]][j[2]][j[3]];
            }
            next[a][b][c][d] = s;
          }
    up = next;
  }
  double s = 0.0;
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      for (int c = 0; c < N; ++c)
        for (int d = 0; d < N; ++d) s += up[a][b][c][d] * t[a][b][c][d];
  return std::sqrt(std::abs(s));
}

// Norm of a (1,2) tensor such as Lambda^k_{ij} given the metric and its inverse.
template <int N>
double norm_tensor3_mixed(const Mat<N>& metric, const Mat<N>& inv, const Tensor3<N>& t) {
  Array3<N> low = zero3<N>();
  for (int k = 0; k < N; ++k)
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        double s = 0.0;
        for (int m = 0; m < N; ++m) s += metric[k][m] * t[m][i][j];
        low[k][i][j] = s;
      }
  return norm3_lower<N>(inv, low);
}

template <int N>
double max_abs(const Mat<N>& m) {
  double x = 0.0;
  for (const auto& row : m)
    for (double v : row) x = std::max(x, std::abs(v));
  return x;
}

template <int N>
double max_abs(const Tensor3<N>& t) {
  double x = 0.0;
  for (const auto& m : t) x = std::max(x, max_abs<N>(m));
  return x;
}

template <int N>
double max_abs(const Tensor4<N>& t) {
  double x = 0.0;
  for (const auto& m : t) x = std::max(x, max_abs<N>(m));
  return x;
}

}  // namespace hypmass

#pragma once

// Background hyperbolic geometry in the Fermi slab chart.
//
// Coordinates are ordered (rho, angles..., s): rho is the distance from the
// origin o' inside the boundary slice H^{n-1}, the n-2 angles are hyperspherical
// coordinates on the unit sphere S^{n-2} (the last one periodic), and s is the
// signed distance from the boundary slice. The s direction is always the last
// index, so Greek (boundary) indices are 0..n-2 and the normal index is n-1.
//
//   b = d rho^2 + sinh^2(rho) sigma + cosh^2(rho) ds^2,   V = cosh(rho) cosh(s)
//
// and cosh r = cosh(rho) cosh(s) for the geodesic distance r from o.

#include <array>
#include <cmath>
#include <string>

#include "hypmass/dual.hpp"
#include "hypmass/errors.hpp"
#include "hypmass/linalg.hpp"

namespace hypmass {

template <int N>
concept ValidDimension = (N >= 3);

template <int N>
  requires ValidDimension<N>
struct Point {
  double rho = 0.0;
  std::array<double, N - 2> ang{};
  double s = 0.0;

  static constexpr int kNormal = N - 1;

  Vec<N> coords() const {
    Vec<N> x;
    x[0] = rho;
    for (int a = 0; a < N - 2; ++a) x[a + 1] = ang[a];
    x[N - 1] = s;
    return x;
  }

  static Point from_coords(const Vec<N>& x) {
    Point p;
    p.rho = x[0];
    for (int a = 0; a < N - 2; ++a) p.ang[a] = x[a + 1];
    p.s = x[N - 1];
    return p;
  }
};

// Distance from the origin o = (o', 0).
template <class T>
T geodesic_radius(const T& rho, const T& s) {
  using std::acosh, std::cosh;
  return acosh(cosh(rho) * cosh(s));
}

template <int N>
double geodesic_radius(const Point<N>& p) {
  return geodesic_radius(p.rho, p.s);
}

// Diagonal of the round metric of S^{m}, m = N - 2, in hyperspherical angles.
template <class T, int N>
std::array<T, N - 2> sphere_diag(const VecT<T, N>& x) {
  using std::sin;
  std::array<T, N - 2> d;
  T w(1.0);
  for (int a = 0; a < N - 2; ++a) {
    d[a] = w;
    if (a + 1 < N - 2) {
      const T sn = sin(x[a + 1]);
      w = w * sn * sn;
    }
  }
  return d;
}

// Unit-sphere embedding omega in R^{N-1} of the angular coordinates.
template <class T, int N>
VecT<T, N - 1> sphere_embedding(const VecT<T, N>& x) {
  using std::cos, std::sin;
  VecT<T, N - 1> w;
  T prod(1.0);
  for (int a = 0; a < N - 3; ++a) {
    w[a] = prod * cos(x[a + 1]);
    prod = prod * sin(x[a + 1]);
  }
  w[N - 3] = prod * cos(x[N - 2]);
  w[N - 2] = prod * sin(x[N - 2]);
  return w;
}

template <class T, int N>
VecT<T, N> metric_b_diag(const VecT<T, N>& x) {
  using std::sinh, std::cosh;
  VecT<T, N> d;
  const T sh = sinh(x[0]);
  const T ch = cosh(x[0]);
  d[0] = T(1.0);
  const auto sd = sphere_diag<T, N>(x);
  for (int a = 0; a < N - 2; ++a) d[a + 1] = sh * sh * sd[a];
  d[N - 1] = ch * ch;
  return d;
}

template <class T, int N>
MatT<T, N> metric_b(const VecT<T, N>& x) {
  MatT<T, N> b = zero_mat<T, N>();
  const auto d = metric_b_diag<T, N>(x);
  for (int i = 0; i < N; ++i) b[i][i] = d[i];
  return b;
}

// Partial derivatives d_k b_ii of the diagonal entries, hand-derived.
template <class T, int N>
MatT<T, N> metric_b_diag_partials(const VecT<T, N>& x) {
  using std::sinh, std::cosh, std::cos, std::sin;
  MatT<T, N> dd = zero_mat<T, N>();  // dd[i][k] = d_k b_ii
  const auto d = metric_b_diag<T, N>(x);
  const T sh = sinh(x[0]);
  const T ch = cosh(x[0]);
  const auto sd = sphere_diag<T, N>(x);
  for (int a = 0; a < N - 2; ++a) {
    dd[a + 1][0] = 2.0 * sh * ch * sd[a];
    for (int c = 0; c < a; ++c) dd[a + 1][c + 1] = 2.0 * cos(x[c + 1]) / sin(x[c + 1]) * d[a + 1];
  }
  dd[N - 1][0] = 2.0 * sh * ch;
  return dd;
}

template <class T, int N>
T potential(const VecT<T, N>& x) {
  using std::cosh;
  return cosh(x[0]) * cosh(x[N - 1]);
}

// The scalar U(x') = cosh(rho) with b_ss = U^2.
template <class T, int N>
T warp(const VecT<T, N>& x) {
  using std::cosh;
  return cosh(x[0]);
}

// Christoffel symbols of b, closed form for the diagonal warped metric:
//   G^k_kk = d_k b_kk / 2b_kk, G^k_ki = d_i b_kk / 2b_kk, G^k_ii = -d_k b_ii / 2b_kk.
template <class T, int N>
Tensor3T<T, N> christoffel_b(const VecT<T, N>& x) {
  const auto d = metric_b_diag<T, N>(x);
  const auto dd = metric_b_diag_partials<T, N>(x);
  Tensor3T<T, N> g;
  for (auto& m : g) m = zero_mat<T, N>();
  for (int k = 0; k < N; ++k) {
    const T inv2 = 0.5 / d[k];
    for (int i = 0; i < N; ++i) {
      if (i == k) {
        g[k][k][k] = dd[k][k] * inv2;
        continue;
      }
      g[k][k][i] = dd[k][i] * inv2;
      g[k][i][k] = g[k][k][i];
      g[k][i][i] = -dd[i][k] * inv2;
    }
  }
  return g;
}

template <int N>
void require_regular(const Point<N>& p, const char* what) {
  if (!std::isfinite(p.rho) || !std::isfinite(p.s))
    throw DomainError(std::string(what) + ": non-finite coordinate");
  if (!(p.rho > 0.0))
    throw SingularChartError(std::string(what) + ": rho = " + std::to_string(p.rho) +
                             " is on the polar axis of the slab chart");
  for (int a = 0; a + 1 < N - 2; ++a) {
    if (std::abs(std::sin(p.ang[a])) < 1e-300)
      throw SingularChartError(std::string(what) + ": angle " + std::to_string(a) +
                               " is at a pole of the sphere chart");
  }
}

template <int N>
Mat<N> metric_b(const Point<N>& p) {
  return metric_b<double, N>(p.coords());
}

template <int N>
Mat<N> metric_b_inverse(const Point<N>& p) {
  require_regular(p, "metric_b_inverse");
  const auto d = metric_b_diag<double, N>(p.coords());
  Mat<N> inv = zero_mat<double, N>();
  for (int i = 0; i < N; ++i) inv[i][i] = 1.0 / d[i];
  return inv;
}

template <int N>
struct PotentialData {
  double V = 0.0;
  Vec<N> grad{};  // covariant components d_i V
  Mat<N> hess{};  // covariant Hessian, equal to V b
};

template <int N>
PotentialData<N> potential_V(const Point<N>& p) {
  PotentialData<N> out;
  out.V = std::cosh(p.rho) * std::cosh(p.s);
  out.grad.fill(0.0);
  out.grad[0] = std::sinh(p.rho) * std::cosh(p.s);
  out.grad[N - 1] = std::cosh(p.rho) * std::sinh(p.s);
  out.hess = metric_b(p);
  for (auto& row : out.hess)
    for (double& v : row) v *= out.V;
  return out;
}

template <int N>
Tensor3<N> christoffel_b(const Point<N>& p) {
  require_regular(p, "christoffel_b");
  return christoffel_b<double, N>(p.coords());
}

// Riemann tensor of b as R_{ijk}^l (components of R(d_i, d_j) d_k), closed
// form for sectional curvature -1: R_{ijk}^l = -(b_jk delta_i^l - b_ik delta_j^l).
template <int N>
Tensor4<N> curvature_b(const Point<N>& p) {
  require_regular(p, "curvature_b");
  const Mat<N> b = metric_b(p);
  Tensor4<N> r = zero4<N>();
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l)
          r[i][j][k][l] = -(b[j][k] * (i == l ? 1.0 : 0.0) - b[i][k] * (j == l ? 1.0 : 0.0));
  return r;
}

template <int N>
Mat<N> ricci_b(const Point<N>& p) {
  Mat<N> b = metric_b(p);
  for (auto& row : b)
    for (double& v : row) v *= -(N - 1.0);
  return b;
}

template <int N>
constexpr double scalar_curvature_b() {
  return -static_cast<double>(N) * (N - 1);
}

}  // namespace hypmass

#pragma once

// Intrinsic and extrinsic geometry of the half spheres Sigma_R under g.
//
// The induced metric and its first two parameter derivatives come from
// third-order forward AD through the embedding and the closed-form metric, so
// R_Sigma is exact up to rounding. A finite-difference route lives in the tests.

#include <cmath>

#include "hypmass/dual.hpp"
#include "hypmass/hypgeom.hpp"
#include "hypmass/linalg.hpp"
#include "hypmass/perturb.hpp"
#include "hypmass/quad.hpp"

namespace hypmass {

template <int M>
struct InducedMetricJet {
  Mat<M> gamma{};
  std::array<Mat<M>, M> d{};                 // d[e][a][b] = d_e gamma_ab
  std::array<std::array<Mat<M>, M>, M> dd{};  // dd[e][f][a][b]
};

// Full metric g = b + e in chart components, generic in the scalar type.
template <class T, int N>
MatT<T, N> metric_g(const PerturbationField<N>& f, const VecT<T, N>& x) {
  MatT<T, N> g = metric_b<T, N>(x);
  const MatT<T, N> e = f.template value<T>(x);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) g[i][j] = g[i][j] + e[i][j];
  return g;
}

template <int N>
InducedMetricJet<N - 1> induced_metric_jet(const PerturbationField<N>& f, Piece piece, double R,
                                           const Vec<N - 1>& params) {
  constexpr int M = N - 1;
  using D2 = Dual2<M>;
  const auto q = seed3<M>(params);
  const auto x3 = embed<Dual3<M>, N>(piece, R, q);
  VecT<D2, N> x;
  std::array<VecT<D2, N>, M> t;
  for (int i = 0; i < N; ++i) {
    x[i] = x3[i].v;
    for (int a = 0; a < M; ++a) t[a][i] = x3[i].d[a];
  }
  const MatT<D2, N> g = metric_g<D2, N>(f, x);
  InducedMetricJet<M> out;
  for (int a = 0; a < M; ++a)
    for (int b = a; b < M; ++b) {
      D2 v(0.0);
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) v += g[i][j] * t[a][i] * t[b][j];
      const Jet2<M> jet = jet_of<M>(v);
      for (int side = 0; side < 2; ++side) {
        const int p = side ? b : a, r = side ? a : b;
        out.gamma[p][r] = jet.val;
        for (int e = 0; e < M; ++e) {
          out.d[e][p][r] = jet.grad[e];
          for (int h = 0; h < M; ++h) out.dd[e][h][p][r] = jet.hess[e][h];
        }
      }
    }
  return out;
}

// Scalar curvature of a metric from its value and first two derivatives.
template <int M>
double scalar_curvature(const InducedMetricJet<M>& j) {
  const Mat<M> gi = spd_inverse<M>(j.gamma, "induced metric");
  // dgi[e][c][d] = d_e gamma^{cd}
  std::array<Mat<M>, M> dgi;
  for (int e = 0; e < M; ++e) dgi[e] = matmul<M>(matmul<M>(gi, j.d[e]), gi);
  for (auto& m : dgi)
    for (auto& row : m)
      for (double& v : row) v = -v;
  // Christoffel symbols and their derivatives.
  Tensor3<M> G;
  std::array<Tensor3<M>, M> dG;  // dG[e][c][a][b] = d_e Gamma^c_ab
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b) {
      Vec<M> s;
      for (int d = 0; d < M; ++d) s[d] = j.d[a][b][d] + j.d[b][a][d] - j.d[d][a][b];
      for (int c = 0; c < M; ++c) {
        double v = 0.0;
        for (int d = 0; d < M; ++d) v += gi[c][d] * s[d];
        G[c][a][b] = 0.5 * v;
      }
      for (int e = 0; e < M; ++e) {
        Vec<M> ds;
        for (int d = 0; d < M; ++d) ds[d] = j.dd[e][a][b][d] + j.dd[e][b][a][d] - j.dd[e][d][a][b];
        for (int c = 0; c < M; ++c) {
          double v = 0.0;
          for (int d = 0; d < M; ++d) v += dgi[e][c][d] * s[d] + gi[c][d] * ds[d];
          dG[e][c][a][b] = 0.5 * v;
        }
      }
    }
  // Ric_bc = d_a G^a_bc - d_c G^a_ab + G^a_ad G^d_bc - G^a_cd G^d_ab
  double R = 0.0;
  for (int b = 0; b < M; ++b)
    for (int c = 0; c < M; ++c) {
      double ric = 0.0;
      for (int a = 0; a < M; ++a) {
        ric += dG[a][a][b][c] - dG[c][a][a][b];
        for (int d = 0; d < M; ++d) ric += G[a][a][d] * G[d][b][c] - G[a][c][d] * G[d][a][b];
      }
      R += gi[b][c] * ric;
    }
  return R;
}

// Mean curvature of the level set through `p` of the potential V, with respect
// to the outward g-unit normal: H = div_g (grad V / |grad V|).
template <int N>
double level_set_mean_curvature(const PerturbationField<N>& f, const Point<N>& p) {
  const auto x1 = seed1<N>(p.coords());
  const auto gd = metric_g<Dual1<N>, N>(f, x1);
  Mat<N> g;
  std::array<Mat<N>, N> dg;  // dg[k][a][b]
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) {
      g[a][b] = gd[a][b].v;
      for (int k = 0; k < N; ++k) dg[k][a][b] = gd[a][b].d[k];
    }
  const Mat<N> gi = spd_inverse<N>(g, "metric g");
  const Jet2<N> F = jet_of<N>(potential<Dual2<N>, N>(seed2<N>(p.coords())));
  Vec<N> u{};
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) u[i] += gi[i][j] * F.grad[j];
  double q = 0.0;
  for (int i = 0; i < N; ++i) q += F.grad[i] * u[i];
  // du[k][i] = d_k u^i
  Mat<N> du;
  for (int k = 0; k < N; ++k)
    for (int i = 0; i < N; ++i) {
      double v = 0.0;
      for (int a = 0; a < N; ++a) {
        v += gi[i][a] * F.hess[a][k];
        for (int b = 0; b < N; ++b) v -= gi[i][a] * dg[k][a][b] * u[b];
      }
      du[k][i] = v;
    }
  Vec<N> dq{};
  for (int k = 0; k < N; ++k)
    for (int i = 0; i < N; ++i) dq[k] += F.hess[i][k] * u[i] + F.grad[i] * du[k][i];
  // Gamma^i_ik = 1/2 g^{ab} d_k g_ab
  double div_u = 0.0, udq = 0.0;
  for (int k = 0; k < N; ++k) {
    div_u += du[k][k] + 0.5 * contract<N>(gi, dg[k]) * u[k];
    udq += u[k] * dq[k];
  }
  return div_u / std::sqrt(q) - 0.5 * udq / (q * std::sqrt(q));
}

template <int N>
struct HypersurfacePoint {
  Vec<N> nu{};         // outward g-unit normal (vector)
  Mat<N - 1> induced{};  // induced metric in patch parameters
  double area_density = 0.0;
  double H = 0.0;        // mean curvature w.r.t. nu
  double R_intrinsic = 0.0;
};

template <int N>
HypersurfacePoint<N> hypersurface_geometry(const PerturbationField<N>& f, const SurfaceNode<N>& node, double R) {
  HypersurfacePoint<N> out;
  const auto jet = induced_metric_jet<N>(f, node.piece, R, node.params);
  out.induced = jet.gamma;
  out.area_density = std::sqrt(determinant_spd<N - 1>(jet.gamma));
  if (!(out.area_density > 1e-14)) throw QuadratureError("degenerate parameterization: Gram determinant < 1e-14");
  out.R_intrinsic = scalar_curvature<N - 1>(jet);
  out.H = level_set_mean_curvature<N>(f, node.point);
  const Mat<N> g = metric_g<double, N>(f, node.point.coords());
  const Mat<N> gi = spd_inverse<N>(g, "metric g");
  const auto pot = potential_V(node.point);
  const double nrm = norm_vec_lower<N>(gi, pot.grad);
  for (int i = 0; i < N; ++i) {
    double v = 0.0;
    for (int j = 0; j < N; ++j) v += gi[i][j] * pot.grad[j];
    out.nu[i] = v / nrm;
  }
  return out;
}

// Mean curvature of the edge S_R = {s = 0} of Sigma_R inside Sigma_R, with
// respect to the conormal pointing out of Sigma_R (toward the boundary).
template <int N>
double boundary_edge_mean_curvature(const PerturbationField<N>& f, double R,
                                    const std::array<double, N - 2>& angles) {
  constexpr int M = N - 1;
  Vec<M> q{};
  q[0] = 0.0;
  for (int a = 0; a < N - 2; ++a) q[a + 1] = angles[a];
  const auto j = induced_metric_jet<N>(f, Piece::Band, R, q);
  const Mat<M> gi = spd_inverse<M>(j.gamma, "induced metric");
  std::array<Mat<M>, M> dgi;
  for (int e = 0; e < M; ++e) {
    dgi[e] = matmul<M>(matmul<M>(gi, j.d[e]), gi);
    for (auto& row : dgi[e])
      for (double& v : row) v = -v;
  }
  // N^a = -gamma^{a0} / sqrt(gamma^{00}); div = d_a N^a + 1/2 d_a(log det gamma) N^a.
  const double w = std::sqrt(gi[0][0]);
  double div = 0.0;
  for (int a = 0; a < M; ++a) {
    const double Na = -gi[a][0] / w;
    const double dNa = -dgi[a][a][0] / w + 0.5 * gi[a][0] * dgi[a][0][0] / (w * w * w);
    div += dNa + 0.5 * contract<M>(gi, j.d[a]) * Na;
  }
  return div;
}

}  // namespace hypmass

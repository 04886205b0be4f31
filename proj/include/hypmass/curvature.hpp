#pragma once

// Exact curvature and boundary geometry of g = b + e.
//
// Curvature goes through the difference tensor Lambda = Gamma - Gamma-bar and
// keeps every quadratic term. The background parts are subtracted analytically,
// so G-tilde and R + n(n-1) are assembled only from small quantities and keep
// full relative precision far out where e is tiny.

#include <cmath>
#include <string>

#include "hypmass/errors.hpp"
#include "hypmass/hypgeom.hpp"
#include "hypmass/linalg.hpp"
#include "hypmass/perturb.hpp"

namespace hypmass {

template <int N>
struct MetricState {
  Point<N> p;
  Mat<N> b{}, b_inv{};
  Tensor3<N> gamma_b{};
  PotentialData<N> pot;
  PerturbationJet<N> jet;
  Mat<N> g{}, g_inv{};
  double E = 0.0;  // tr_b e
};

template <int N>
MetricState<N> make_metric_state(const PerturbationField<N>& f, const Point<N>& p) {
  MetricState<N> ms;
  ms.p = p;
  ms.b = metric_b(p);
  ms.b_inv = metric_b_inverse(p);
  ms.gamma_b = christoffel_b(p);
  ms.pot = potential_V(p);
  ms.jet = f.eval(p, 2);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) ms.g[i][j] = ms.b[i][j] + ms.jet.e[i][j];
  ms.g_inv = spd_inverse<N>(ms.g, "metric g = b + e");
  ms.E = contract<N>(ms.b_inv, ms.jet.e);
  return ms;
}

// Lambda^k_ij = 1/2 g^{kl} (nabla_i e_jl + nabla_j e_il - nabla_l e_ij).
template <int N>
Tensor3<N> lambda_tensor(const MetricState<N>& ms) {
  const auto& de = ms.jet.de;
  Tensor3<N> lam = zero3<N>();
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j) {
      Vec<N> s;
      for (int l = 0; l < N; ++l) s[l] = de[i][j][l] + de[j][i][l] - de[l][i][j];
      for (int k = 0; k < N; ++k) {
        double v = 0.0;
        for (int l = 0; l < N; ++l) v += ms.g_inv[k][l] * s[l];
        lam[k][i][j] = 0.5 * v;
        lam[k][j][i] = 0.5 * v;
      }
    }
  return lam;
}

template <int N>
struct CurvaturePack {
  Tensor3<N> lambda{};
  Tensor4<N> riemann{};        // R_ijk^l
  Tensor4<N> riemann_delta{};  // R_ijk^l - Rbar_ijk^l
  Mat<N> ricci{};
  Mat<N> ricci_delta{};  // Ric + (n-1) b
  double scalar = 0.0;
  double scalar_shifted = 0.0;  // R + n(n-1)
  Mat<N> einstein{};
  Mat<N> gtilde{};
};

// R_ijk^l = Rbar + nabla_i Lambda^l_jk - nabla_j Lambda^l_ik
//           + Lambda^m_jk Lambda^l_im - Lambda^m_ik Lambda^l_mj
// with nabla Lambda assembled from nabla e, nabla nabla e and
// nabla_i g^{jk} = -(Lambda^k_il g^{jl} + Lambda^j_il g^{kl}).
template <int N>
CurvaturePack<N> riemann_exact(const MetricState<N>& ms) {
  CurvaturePack<N> cp;
  cp.lambda = lambda_tensor(ms);
  const auto& lam = cp.lambda;
  const auto& gi = ms.g_inv;
  const auto& de = ms.jet.de;
  const auto& dde = ms.jet.dde;

  // dginv[i][j][k] = nabla_i g^{jk}
  Array3<N> dginv;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) {
        double v = 0.0;
        for (int l = 0; l < N; ++l) v += lam[k][i][l] * gi[j][l] + lam[j][i][l] * gi[k][l];
        dginv[i][j][k] = -v;
      }

  // S[j][k][s] = nabla_j e_ks + nabla_k e_js - nabla_s e_jk and its derivative.
  Array3<N> S;
  for (int j = 0; j < N; ++j)
    for (int k = 0; k < N; ++k)
      for (int s = 0; s < N; ++s) S[j][k][s] = de[j][k][s] + de[k][j][s] - de[s][j][k];

  // dlam[i][l][j][k] = nabla_i Lambda^l_jk
  Tensor4<N> dlam = zero4<N>();
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = j; k < N; ++k) {
        Vec<N> dS;
        for (int s = 0; s < N; ++s) dS[s] = dde[i][j][k][s] + dde[i][k][j][s] - dde[i][s][j][k];
        for (int l = 0; l < N; ++l) {
          double v = 0.0;
          for (int s = 0; s < N; ++s) v += dginv[i][l][s] * S[j][k][s] + gi[l][s] * dS[s];
          dlam[i][l][j][k] = 0.5 * v;
          dlam[i][l][k][j] = 0.5 * v;
        }
      }

  const Tensor4<N> rbar = curvature_b(ms.p);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l) {
          double v = dlam[i][l][j][k] - dlam[j][l][i][k];
          for (int m = 0; m < N; ++m) v += lam[m][j][k] * lam[l][i][m] - lam[m][i][k] * lam[l][m][j];
          cp.riemann_delta[i][j][k][l] = v;
          cp.riemann[i][j][k][l] = rbar[i][j][k][l] + v;
        }

  // Ric_jk = R_ijk^i; background part is -(n-1) b.
  for (int j = 0; j < N; ++j)
    for (int k = 0; k < N; ++k) {
      double v = 0.0;
      for (int i = 0; i < N; ++i) v += cp.riemann_delta[i][j][k][i];
      cp.ricci_delta[j][k] = v;
      cp.ricci[j][k] = -(N - 1.0) * ms.b[j][k] + v;
    }
  // g^{ik} b_ik = n - g^{ik} e_ik, so R + n(n-1) = (n-1) tr_g e + tr_g(dRic).
  cp.scalar_shifted = (N - 1.0) * contract<N>(gi, ms.jet.e) + contract<N>(gi, cp.ricci_delta);
  cp.scalar = cp.scalar_shifted - N * (N - 1.0);
  // G-tilde = dRic + (n-1) e - 1/2 (R + n(n-1)) g.
  for (int i = 0; i < N; ++i)
    for (int k = 0; k < N; ++k) {
      cp.gtilde[i][k] = cp.ricci_delta[i][k] + (N - 1.0) * ms.jet.e[i][k] - 0.5 * cp.scalar_shifted * ms.g[i][k];
      cp.einstein[i][k] = cp.ricci[i][k] - 0.5 * cp.scalar * ms.g[i][k];
    }
  return cp;
}

// Pieces of the linearized curvature built from nabla nabla e and b.
template <int N>
struct LinearizedTerms {
  Mat<N> hess_E{};   // nabla_i nabla_k E
  Mat<N> box_part{};  // nabla_i nabla_k E - nabla^l nabla_i e_kl - nabla^l nabla_k e_il + nabla^l nabla_l e_ik
  double lap_E = 0.0;        // Laplacian of E
  double div_div_e = 0.0;    // nabla^j nabla^l e_jl
};

template <int N>
LinearizedTerms<N> linearized_terms(const MetricState<N>& ms) {
  LinearizedTerms<N> t;
  const auto& bi = ms.b_inv;
  const auto& dde = ms.jet.dde;
  for (int i = 0; i < N; ++i)
    for (int k = 0; k < N; ++k) {
      double hE = 0.0, a = 0.0, c = 0.0, lap = 0.0;
      for (int p = 0; p < N; ++p)
        for (int q = 0; q < N; ++q) {
          if (bi[p][q] == 0.0) continue;
          hE += bi[p][q] * dde[i][k][p][q];
          a += bi[p][q] * dde[q][i][k][p];  // nabla^l nabla_i e_kl
          c += bi[p][q] * dde[q][k][i][p];  // nabla^l nabla_k e_il
          lap += bi[p][q] * dde[q][p][i][k];
        }
      t.hess_E[i][k] = hE;
      t.box_part[i][k] = hE - a - c + lap;
    }
  t.lap_E = contract<N>(bi, t.hess_E);
  double dd = 0.0;
  for (int j = 0; j < N; ++j)
    for (int l = 0; l < N; ++l)
      for (int a = 0; a < N; ++a)
        for (int c = 0; c < N; ++c) dd += bi[j][a] * bi[l][c] * dde[a][c][j][l];
  t.div_div_e = dd;
  return t;
}

// exact(-2 G-tilde) minus its linear expansion in e; O(exp(-2 tau r)).
template <int N>
Mat<N> einstein_expansion_residual(const MetricState<N>& ms, const CurvaturePack<N>& cp) {
  const auto t = linearized_terms(ms);
  Mat<N> res;
  const double n = N;
  for (int i = 0; i < N; ++i)
    for (int k = 0; k < N; ++k) {
      const double lin = 2.0 * (1.0 - n) * ms.jet.e[i][k] + t.box_part[i][k] -
                         (1.0 - n) * ms.b[i][k] * ms.E - ms.b[i][k] * (t.lap_E - t.div_div_e);
      res[i][k] = -2.0 * cp.gtilde[i][k] - lin;
    }
  return res;
}

// R minus (n - E)(1 - n) - (Laplacian E - nabla nabla e).
template <int N>
double scalar_expansion_residual(const MetricState<N>& ms, const CurvaturePack<N>& cp) {
  const auto t = linearized_terms(ms);
  return cp.scalar_shifted - ((N - 1.0) * ms.E - (t.lap_E - t.div_div_e));
}

// |tr((A+B)^{-1} A) - n + tr(A^{-1} B)|, which reduces to the stated
// sum_ij A_ij B_ij form at A = I. General A is reduced by congruence
// B -> L^{-1} B L^{-T} with A = L L^T.
template <int N>
double trace_lemma_check(const Mat<N>& A, const Mat<N>& B) {
  const Mat<N> L = cholesky<N>(A, "trace lemma A");
  const Mat<N> Li = lower_inverse<N>(L);
  Mat<N> Bt = zero_mat<double, N>();
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      double v = 0.0;
      for (int p = 0; p < N; ++p)
        for (int q = 0; q < N; ++q) v += Li[i][p] * B[p][q] * Li[j][q];
      Bt[i][j] = v;
    }
  Mat<N> IB = Bt;
  for (int i = 0; i < N; ++i) IB[i][i] += 1.0;
  const Mat<N> C = spd_inverse<N>(IB, "A + B");
  return std::abs(trace<N>(C) - N + trace<N>(Bt));
}

template <int N>
struct BoundaryPack {
  Vec<N> eta{};        // outward g-unit normal, vector components
  Vec<N> eta_lower{};  // covector components
  Mat<N - 1> h{}, h_inv{};
  Mat<N - 1> A{};
  double H = 0.0;
  double gnn_inv_sqrt = 0.0;  // (g^{nn})^{-1/2}
};

template <int N>
void require_boundary(const Point<N>& p, const char* what) {
  if (p.s != 0.0) throw DomainError(std::string(what) + ": point is not on the boundary s = 0");
}

template <int N>
Mat<N - 1> boundary_block(const Mat<N>& m) {
  Mat<N - 1> out;
  for (int a = 0; a < N - 1; ++a)
    for (int c = 0; c < N - 1; ++c) out[a][c] = m[a][c];
  return out;
}

// eta = -(g^{nn})^{-1/2} g^{ni} d_i, A_ab = (g^{nn})^{-1/2} Gamma^n_ab, H = h^{ab} A_ab.
template <int N>
BoundaryPack<N> boundary_geometry(const MetricState<N>& ms, const Tensor3<N>& lambda) {
  require_boundary(ms.p, "boundary_geometry");
  constexpr int n = N - 1;
  BoundaryPack<N> bp;
  const double gnn = ms.g_inv[n][n];
  bp.gnn_inv_sqrt = 1.0 / std::sqrt(gnn);
  for (int i = 0; i < N; ++i) {
    bp.eta[i] = -bp.gnn_inv_sqrt * ms.g_inv[n][i];
    bp.eta_lower[i] = (i == n) ? -bp.gnn_inv_sqrt : 0.0;
  }
  bp.h = boundary_block<N>(ms.g);
  bp.h_inv = spd_inverse<N - 1>(bp.h, "induced boundary metric");
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) bp.A[a][c] = bp.gnn_inv_sqrt * (ms.gamma_b[n][a][c] + lambda[n][a][c]);
  bp.H = contract<N - 1>(bp.h_inv, bp.A);
  return bp;
}

template <int N>
BoundaryPack<N> boundary_geometry(const MetricState<N>& ms) {
  return boundary_geometry<N>(ms, lambda_tensor(ms));
}

// 2 A_ab - V^{-1}(nabla_a e_bn + nabla_b e_an - nabla_n e_ab); O(exp(-2 tau r)) in the hbar norm.
template <int N>
Mat<N - 1> second_fundamental_form_residual(const MetricState<N>& ms, const BoundaryPack<N>& bp) {
  constexpr int n = N - 1;
  const auto& de = ms.jet.de;
  Mat<N - 1> r;
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c)
      r[a][c] = 2.0 * bp.A[a][c] - (de[a][c][n] + de[c][a][n] - de[n][a][c]) / ms.pot.V;
  return r;
}

// 2 V H - b^{ab}(2 nabla_a e_bn - nabla_n e_ab).
template <int N>
double mean_curvature_expansion_residual(const MetricState<N>& ms, const BoundaryPack<N>& bp) {
  constexpr int n = N - 1;
  const auto& de = ms.jet.de;
  double lin = 0.0;
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) lin += ms.b_inv[a][c] * (2.0 * de[a][c][n] - de[n][a][c]);
  return 2.0 * ms.pot.V * bp.H - lin;
}

// Intrinsic derivative Dbar_a e_bn of the boundary one-form e(d_n, .) along
// s = 0, using the H^{n-1} connection only.
template <int N>
Mat<N - 1> boundary_one_form_derivative(const PerturbationField<N>& f, const Point<N>& p) {
  require_boundary(p, "boundary_one_form_derivative");
  require_regular(p, "boundary_one_form_derivative");
  constexpr int n = N - 1;
  Mat<N> e;
  Array3<N> pe;
  Tensor4<N> ppe;
  f.partials(p, e, pe, ppe);
  const Tensor3<N> G = christoffel_b(p);
  Mat<N - 1> D;
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) {
      double v = pe[a][c][n];
      for (int m = 0; m < n; ++m) v -= G[m][a][c] * e[m][n];
      D[a][c] = v;
    }
  return D;
}

// nabla_a e_bn - [Dbar_a e_bn - e_bn V^{-1} nabla_a V]; vanishes identically.
template <int N>
double boundary_derivative_relation_residual(const PerturbationField<N>& f, const MetricState<N>& ms) {
  constexpr int n = N - 1;
  const auto D = boundary_one_form_derivative(f, ms.p);
  double worst = 0.0;
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) {
      const double rhs = D[a][c] - ms.jet.e[c][n] * ms.pot.grad[a] / ms.pot.V;
      worst = std::max(worst, std::abs(ms.jet.de[a][c][n] - rhs));
    }
  return worst;
}

}  // namespace hypmass

#pragma once

// Verification helpers shared by the run suites: deterministic random sample
// points, finite-difference curvature of a metric given as a function of the
// chart coordinates, and the background exactness checks.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "hypmass/curvature.hpp"
#include "hypmass/dual.hpp"
#include "hypmass/hypgeom.hpp"
#include "hypmass/linalg.hpp"
#include "hypmass/perturb.hpp"

namespace hypmass {

// Uniform doubles from mt19937_64 with a fixed bit recipe, so that sample
// points do not depend on the standard library's distribution algorithms.
class SampleRng {
 public:
  explicit SampleRng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double a, double b) { return a + (b - a) * static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 gen_;
};

struct SampleBox {
  double rho_min = 0.2, rho_max = 3.0;
  double s_min = 0.0, s_max = 2.0;
};

// Random interior point away from the chart singularities.
template <int N>
Point<N> random_point(SampleRng& rng, const SampleBox& box = {}) {
  Point<N> p;
  p.rho = rng.uniform(box.rho_min, box.rho_max);
  for (int a = 0; a + 1 < N - 2; ++a) p.ang[a] = rng.uniform(0.3, M_PI - 0.3);
  p.ang[N - 3] = rng.uniform(0.0, 2.0 * M_PI);
  p.s = rng.uniform(box.s_min, box.s_max);
  return p;
}

template <int N>
using MetricFn = std::function<Mat<N>(const Vec<N>&)>;

// Fourth-order centered difference of a matrix-valued function along axis k.
template <int N, class Fn>
auto fd_partial(Fn&& fn, const Vec<N>& x, int k, double h) {
  auto shift = [&](double t) {
    Vec<N> y = x;
    y[k] += t;
    return fn(y);
  };
  const auto fp2 = shift(2 * h), fp1 = shift(h), fm1 = shift(-h), fm2 = shift(-2 * h);
  auto out = fp1;
  // element-wise (-f(x+2h) + 8 f(x+h) - 8 f(x-h) + f(x-2h)) / 12h
  auto combine = [&](auto& o, const auto& a, const auto& b, const auto& c, const auto& d, auto&& self) -> void {
    if constexpr (std::is_same_v<std::decay_t<decltype(o)>, double>) {
      o = (-a + 8.0 * b - 8.0 * c + d) / (12.0 * h);
    } else {
      for (std::size_t i = 0; i < o.size(); ++i) self(o[i], a[i], b[i], c[i], d[i], self);
    }
  };
  combine(out, fp2, fp1, fm1, fm2, combine);
  return out;
}

// Christoffel symbols Gamma^k_ij of a metric by finite differences.
template <int N>
Tensor3<N> fd_christoffel(const MetricFn<N>& g, const Vec<N>& x, double h = 1e-3) {
  std::array<Mat<N>, N> dg;
  for (int k = 0; k < N; ++k) dg[k] = fd_partial<N>(g, x, k, h);
  const Mat<N> gi = spd_inverse<N>(g(x));
  Tensor3<N> G = zero3<N>();
  for (int k = 0; k < N; ++k)
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        double v = 0.0;
        for (int l = 0; l < N; ++l) v += gi[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
        G[k][i][j] = 0.5 * v;
      }
  return G;
}

// R_ijk^l = d_i G^l_jk - d_j G^l_ik + G^m_jk G^l_im - G^m_ik G^l_jm from a
// connection given as a function of the coordinates.
template <int N>
Tensor4<N> riemann_from_connection(const std::function<Tensor3<N>(const Vec<N>&)>& gamma, const Vec<N>& x,
                                   double h = 1e-3) {
  std::array<Tensor3<N>, N> dG;
  for (int i = 0; i < N; ++i) dG[i] = fd_partial<N>(gamma, x, i, h);
  const Tensor3<N> G = gamma(x);
  Tensor4<N> R = zero4<N>();
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l) {
          double v = dG[i][l][j][k] - dG[j][l][i][k];
          for (int m = 0; m < N; ++m) v += G[m][j][k] * G[l][i][m] - G[m][i][k] * G[l][j][m];
          R[i][j][k][l] = v;
        }
  return R;
}

// Riemann tensor of a metric by nested finite differences.
template <int N>
Tensor4<N> fd_riemann(const MetricFn<N>& g, const Vec<N>& x, double h_metric = 1e-3, double h_conn = 1e-3) {
  std::function<Tensor3<N>(const Vec<N>&)> gamma = [&](const Vec<N>& y) { return fd_christoffel<N>(g, y, h_metric); };
  return riemann_from_connection<N>(gamma, x, h_conn);
}

// Riemann tensor of b from the closed-form Christoffel symbols with exact
// AD derivatives.
template <int N>
Tensor4<N> riemann_b_assembled(const Point<N>& p) {
  require_regular(p, "riemann_b_assembled");
  const auto G1 = christoffel_b<Dual1<N>, N>(seed1<N>(p.coords()));
  Tensor4<N> R = zero4<N>();
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l) {
          double v = G1[l][j][k].d[i] - G1[l][i][k].d[j];
          for (int m = 0; m < N; ++m) v += G1[m][j][k].v * G1[l][i][m].v - G1[m][i][k].v * G1[l][j][m].v;
          R[i][j][k][l] = v;
        }
  return R;
}

struct BackgroundCheck {
  int points = 0;
  double hessian = 0.0;        // max |nabla nabla V - V b| with the Hessian from AD partials
  double laplacian = 0.0;      // max |Delta V - n V|
  double riemann_exact = 0.0;  // closed form vs AD-assembled from Gamma
  double riemann_fd = 0.0;     // closed form vs nested finite differences of b
  double gtilde = 0.0;         // max |Gt(b)|
  double ricci = 0.0;          // max |Ric(b) + (n-1) b|
  double scalar = 0.0;         // max |R(b) + n(n-1)|
  double block = 0.0;          // max over the block identities for Gamma
};

// Exactness of the background at `count` random points.
template <int N>
BackgroundCheck background_checks(int count, std::uint64_t seed) {
  SampleRng rng(seed);
  BackgroundCheck out;
  out.points = count;
  const PerturbationField<N> zero(Conformal{0.0}, N);
  constexpr int n = N - 1;
  for (int t = 0; t < count; ++t) {
    const auto p = random_point<N>(rng);
    const Vec<N> x = p.coords();
    const Mat<N> b = metric_b(p);
    const Mat<N> bi = metric_b_inverse(p);
    const auto G = christoffel_b(p);

    const auto J = jet_of(potential<Dual2<N>, N>(seed2<N>(x)));
    double lap = 0.0;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        double h = J.hess[i][j];
        for (int k = 0; k < N; ++k) h -= G[k][i][j] * J.grad[k];
        out.hessian = std::max(out.hessian, std::abs(h - J.val * b[i][j]));
        lap += bi[i][j] * h;
      }
    out.laplacian = std::max(out.laplacian, std::abs(lap - N * J.val));

    const auto Rc = curvature_b(p);
    const auto Ra = riemann_b_assembled(p);
    MetricFn<N> bfn = [](const Vec<N>& y) { return metric_b<double, N>(y); };
    const auto Rf = fd_riemann<N>(bfn, x);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k)
          for (int l = 0; l < N; ++l) {
            out.riemann_exact = std::max(out.riemann_exact, std::abs(Rc[i][j][k][l] - Ra[i][j][k][l]));
            out.riemann_fd = std::max(out.riemann_fd, std::abs(Rc[i][j][k][l] - Rf[i][j][k][l]));
          }

    const auto cp = riemann_exact(make_metric_state(zero, p));
    out.gtilde = std::max(out.gtilde, max_abs<N>(cp.gtilde));
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) out.ricci = std::max(out.ricci, std::abs(cp.ricci[i][j] + (N - 1.0) * b[i][j]));
    out.scalar = std::max(out.scalar, std::abs(cp.scalar + N * (N - 1.0)));

    // Gamma^n_ab = 0, Gamma^a_bn = 0, Gamma^n_an = d_a U / U.
    const double U = std::cosh(p.rho);
    for (int a = 0; a < n; ++a) {
      for (int c = 0; c < n; ++c) {
        out.block = std::max(out.block, std::abs(G[n][a][c]));
        out.block = std::max(out.block, std::abs(G[a][c][n]));
      }
      const double dU = a == 0 ? std::sinh(p.rho) : 0.0;
      out.block = std::max(out.block, std::abs(G[n][a][n] - dU / U));
    }
  }
  return out;
}

// Max componentwise difference between riemann_exact and nested finite
// differences of g = b + e at `count` random points.
template <int N>
double riemann_oracle_gap(const PerturbationField<N>& f, int count, std::uint64_t seed,
                          const SampleBox& box = {0.3, 2.0, 0.0, 1.5}) {
  SampleRng rng(seed);
  double worst = 0.0;
  MetricFn<N> gfn = [&](const Vec<N>& y) {
    Mat<N> g = metric_b<double, N>(y);
    const Mat<N> e = f.template value<double>(y);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) g[i][j] += e[i][j];
    return g;
  };
  for (int t = 0; t < count; ++t) {
    const auto p = random_point<N>(rng, box);
    const auto cp = riemann_exact(make_metric_state(f, p));
    const auto Rf = fd_riemann<N>(gfn, p.coords());
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k)
          for (int l = 0; l < N; ++l) worst = std::max(worst, std::abs(cp.riemann[i][j][k][l] - Rf[i][j][k][l]));
  }
  return worst;
}

struct TraceLemmaFit {
  std::vector<double> norms;
  std::vector<double> residuals;  // geometric mean residual per norm level
  double order = 0.0;
};

// Residual of the trace lemma over random symmetric B (A = identity) at the
// given Frobenius norms; the fitted order is the log-log slope.
template <int N>
TraceLemmaFit trace_lemma_order(const std::vector<double>& norms, int per_level, std::uint64_t seed) {
  SampleRng rng(seed);
  TraceLemmaFit out;
  out.norms = norms;
  std::vector<double> lx, ly;
  for (double eps : norms) {
    double log_sum = 0.0;
    for (int t = 0; t < per_level; ++t) {
      Mat<N> B{};
      for (int i = 0; i < N; ++i)
        for (int j = i; j < N; ++j) B[i][j] = B[j][i] = rng.uniform(-1.0, 1.0);
      double fn = 0.0;
      for (const auto& row : B)
        for (double v : row) fn += v * v;
      fn = std::sqrt(fn);
      for (auto& row : B)
        for (double& v : row) v *= eps / fn;
      log_sum += std::log(trace_lemma_check<N>(identity<N>(), B));
    }
    out.residuals.push_back(std::exp(log_sum / per_level));
    lx.push_back(std::log(eps));
    ly.push_back(log_sum / per_level);
  }
  out.order = fit_line(lx, ly).slope;
  return out;
}

}  // namespace hypmass

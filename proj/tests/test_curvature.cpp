#include <gtest/gtest.h>

#include <cmath>

#include "hypmass/checks.hpp"
#include "hypmass/curvature.hpp"
#include "test_util.hpp"

using namespace hypmass;

namespace {

Aniso<3> aniso3(double scale = 1.0) {
  Aniso<3> a;
  a.a = {{{0.10, 0.05, 0.08}, {0.05, -0.06, 0.04}, {0.08, 0.04, 0.12}}};
  for (auto& row : a.a)
    for (double& v : row) v *= scale;
  a.radial = 0.1 * scale;
  return a;
}

Aniso<4> aniso4() {
  Aniso<4> a;
  a.a = {{{0.05, 0.02, 0.0, 0.03}, {0.02, -0.04, 0.01, 0.0}, {0.0, 0.01, 0.06, 0.02}, {0.03, 0.0, 0.02, -0.05}}};
  a.radial = 0.05;
  return a;
}

template <int N>
std::function<Mat<N>(const Vec<N>&)> g_of(const PerturbationField<N>& f) {
  return [&f](const Vec<N>& x) {
    Mat<N> g = metric_b<double, N>(x);
    const Mat<N> e = f.template value<double>(x);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) g[i][j] += e[i][j];
    return g;
  };
}

template <int N>
void lambda_and_riemann_match_fd(const PerturbationField<N>& f, std::uint64_t seed) {
  SampleRng rng(seed);
  const auto g = g_of(f);
  std::function<Mat<N>(const Vec<N>&)> b = [](const Vec<N>& x) { return metric_b<double, N>(x); };
  for (int t = 0; t < 10; ++t) {
    const auto p = random_point<N>(rng, {0.3, 2.0, 0.0, 1.5});
    const auto ms = make_metric_state(f, p);
    const auto cp = riemann_exact(ms);
    const auto Gg = testutil::christoffel<N>(g, p.coords());
    const auto Gb = testutil::christoffel<N>(b, p.coords());
    Tensor3<N> lam;
    for (int k = 0; k < N; ++k)
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) lam[k][i][j] = Gg[k][i][j] - Gb[k][i][j];
    EXPECT_LT(testutil::max_diff<N>(cp.lambda, lam), 1e-6);
    EXPECT_LT(testutil::max_diff<N>(cp.riemann, testutil::riemann<N>(g, p.coords())), 1e-5);
  }
}

// Antisymmetries, pair symmetry and the first Bianchi identity of R_ijkl = R_ijk^m g_ml.
template <int N>
void riemann_symmetries(const PerturbationField<N>& f, std::uint64_t seed) {
  SampleRng rng(seed);
  for (int t = 0; t < 20; ++t) {
    const auto ms = make_metric_state(f, random_point<N>(rng));
    const auto cp = riemann_exact(ms);
    Tensor4<N> L{};
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k)
          for (int l = 0; l < N; ++l) {
            double v = 0.0;
            for (int m = 0; m < N; ++m) v += cp.riemann[i][j][k][m] * ms.g[m][l];
            L[i][j][k][l] = v;
          }
    const double scale = 1.0 + max_abs<N>(L);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k)
          for (int l = 0; l < N; ++l) {
            EXPECT_NEAR(L[i][j][k][l], -L[j][i][k][l], 1e-9 * scale);
            EXPECT_NEAR(L[i][j][k][l], -L[i][j][l][k], 1e-9 * scale);
            EXPECT_NEAR(L[i][j][k][l], L[k][l][i][j], 1e-9 * scale);
            EXPECT_NEAR(cp.riemann[i][j][k][l] + cp.riemann[j][k][i][l] + cp.riemann[k][i][j][l], 0.0, 1e-9 * scale);
          }
  }
}

}  // namespace

TEST(Curvature, BackgroundIsEinstein) {
  const PerturbationField<3> zero(Conformal{0.0}, 2.0);
  SampleRng rng(21);
  for (int t = 0; t < 20; ++t) {
    const auto p = random_point<3>(rng);
    const auto cp = riemann_exact(make_metric_state(zero, p));
    EXPECT_LT(max_abs<3>(cp.gtilde), 1e-12);
    EXPECT_LT(max_abs<3>(cp.lambda), 1e-15);
    EXPECT_NEAR(cp.scalar, -6.0, 1e-12);
    EXPECT_LT(testutil::max_diff<3>(cp.riemann, curvature_b(p)), 1e-12);
  }
}

TEST(Curvature, BackgroundChecksN3N4) {
  const auto c3 = background_checks<3>(50, 1);
  EXPECT_LT(c3.hessian, 1e-10);
  EXPECT_LT(c3.laplacian, 1e-10);
  EXPECT_LT(c3.riemann_exact, 1e-10);
  EXPECT_LT(c3.riemann_fd, 1e-6);
  EXPECT_LT(c3.gtilde, 1e-10);
  EXPECT_LT(c3.block, 1e-12);
  const auto c4 = background_checks<4>(50, 2);
  EXPECT_LT(c4.laplacian, 1e-10);
  EXPECT_LT(c4.riemann_fd, 1e-6);
  EXPECT_LT(c4.scalar, 1e-10);
}

TEST(Curvature, ExactMatchesFdAnisoN3) { lambda_and_riemann_match_fd(PerturbationField<3>(aniso3(), 2.5), 22); }
TEST(Curvature, ExactMatchesFdAnisoN4) { lambda_and_riemann_match_fd(PerturbationField<4>(aniso4(), 2.5), 23); }
TEST(Curvature, ExactMatchesFdConformal) { lambda_and_riemann_match_fd(PerturbationField<3>(Conformal{0.1}, 2.0), 24); }

TEST(Curvature, RiemannSymmetriesN3) { riemann_symmetries(PerturbationField<3>(aniso3(), 2.0), 25); }
TEST(Curvature, RiemannSymmetriesN4) { riemann_symmetries(PerturbationField<4>(aniso4(), 2.5), 26); }

TEST(Curvature, ModifiedEinsteinTensor) {
  // -2 Gt = -2 Ric + R g + (n-1)(n-2) g
  const PerturbationField<4> f(aniso4(), 2.5);
  SampleRng rng(27);
  for (int t = 0; t < 10; ++t) {
    const auto ms = make_metric_state(f, random_point<4>(rng));
    const auto cp = riemann_exact(ms);
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 4; ++k) {
        EXPECT_NEAR(-2.0 * cp.gtilde[i][k], -2.0 * cp.ricci[i][k] + cp.scalar * ms.g[i][k] + 6.0 * ms.g[i][k], 1e-11);
        EXPECT_NEAR(cp.gtilde[i][k], cp.gtilde[k][i], 1e-12);
      }
  }
}

TEST(Curvature, ExpansionResidualsAreQuadraticInAmplitude) {
  Point<3> p;
  p.rho = 1.1;
  p.ang = {0.7};
  p.s = 0.6;
  Point<3> q = p;
  q.s = 0.0;
  double prev_ein = 0, prev_sc = 0, prev_sff = 0, prev_h = 0;
  for (double eps : {1.0, 0.5, 0.25}) {
    const PerturbationField<3> f(aniso3(eps), 2.0);
    const auto ms = make_metric_state(f, p);
    const auto cp = riemann_exact(ms);
    const double ein = max_abs<3>(einstein_expansion_residual(ms, cp));
    const double sc = std::abs(scalar_expansion_residual(ms, cp));
    const auto mq = make_metric_state(f, q);
    const auto bp = boundary_geometry(mq);
    const double sff = max_abs<2>(second_fundamental_form_residual(mq, bp));
    const double h = std::abs(mean_curvature_expansion_residual(mq, bp));
    if (eps < 1.0) {
      EXPECT_NEAR(prev_ein / ein, 4.0, 0.8);
      EXPECT_NEAR(prev_sc / sc, 4.0, 0.8);
      EXPECT_NEAR(prev_sff / sff, 4.0, 0.8);
      EXPECT_NEAR(prev_h / h, 4.0, 0.8);
    }
    prev_ein = ein;
    prev_sc = sc;
    prev_sff = sff;
    prev_h = h;
  }
}

TEST(Curvature, TraceLemmaClosedForm) {
  for (double eps : {0.1, 0.01, 1e-3}) {
    Mat<2> B{};
    B[0][0] = eps;
    EXPECT_NEAR(trace_lemma_check<2>(identity<2>(), B), eps * eps / (1 + eps), 1e-15);
  }
  EXPECT_EQ(trace_lemma_check<3>(identity<3>(), Mat<3>{}), 0.0);
  Mat<2> bad{};
  bad[0][0] = 1.0;
  bad[1][1] = -1.0;
  EXPECT_THROW(trace_lemma_check<2>(bad, Mat<2>{}), NotPositiveDefiniteError);
}

TEST(Curvature, TraceLemmaOrder) {
  const auto fit = trace_lemma_order<3>({1e-1, 1e-2, 1e-3}, 100, 9);
  EXPECT_NEAR(fit.order, 2.0, 0.1);
  // general A reduces by congruence: the residual is invariant under A -> 2A, B -> 2B
  Mat<3> A = identity<3>(), B{};
  A[0][1] = A[1][0] = 0.3;
  B[0][0] = 0.02;
  B[1][2] = B[2][1] = -0.01;
  Mat<3> A2 = A, B2 = B;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      A2[i][j] *= 2;
      B2[i][j] *= 2;
    }
  EXPECT_NEAR(trace_lemma_check<3>(A, B), trace_lemma_check<3>(A2, B2), 1e-15);
}

TEST(Curvature, UnperturbedBoundary) {
  const PerturbationField<3> zero(Conformal{0.0}, 2.0);
  Point<3> p;
  p.rho = 1.7;
  p.ang = {0.3};
  const auto ms = make_metric_state(zero, p);
  const auto bp = boundary_geometry(ms);
  EXPECT_NEAR(bp.eta[2], -1.0 / ms.pot.V, 1e-15);
  EXPECT_EQ(bp.eta[0], 0.0);
  EXPECT_LT(max_abs<2>(bp.A), 1e-15);
  EXPECT_EQ(bp.H, 0.0);
}

TEST(Curvature, PerturbedBoundaryAgainstFd) {
  const PerturbationField<3> f(aniso3(), 2.0);
  const auto g = g_of(f);
  for (const auto& p : corner_samples<3>(1.5, 6)) {
    const auto ms = make_metric_state(f, p);
    const auto bp = boundary_geometry(ms);
    double eta2 = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) eta2 += ms.g[i][j] * bp.eta[i] * bp.eta[j];
    EXPECT_NEAR(eta2, 1.0, 1e-12);
    // eta is normal to the boundary directions
    for (int a = 0; a < 2; ++a) {
      double gx = 0.0;
      for (int i = 0; i < 3; ++i) gx += ms.g[a][i] * bp.eta[i];
      EXPECT_NEAR(gx, 0.0, 1e-14);
    }
    const auto hh = matmul<2>(bp.h_inv, bp.h);
    EXPECT_LT(testutil::max_diff<2>(hh, identity<2>()), 1e-13);
    EXPECT_NEAR(bp.H, contract<2>(bp.h_inv, bp.A), 1e-15);
    const auto G = testutil::christoffel<3>(g, p.coords(), 1e-4);
    for (int a = 0; a < 2; ++a)
      for (int c = 0; c < 2; ++c) EXPECT_NEAR(bp.A[a][c], bp.gnn_inv_sqrt * G[2][a][c], 1e-8);
  }
}

TEST(Curvature, BoundaryDerivativeRelation) {
  const PerturbationField<3> f(aniso3(), 2.5);
  for (double R : {2.0, 4.0, 6.0})
    for (const auto& p : corner_samples<3>(R, 8))
      EXPECT_LT(boundary_derivative_relation_residual(f, make_metric_state(f, p)), 1e-8);
  const PerturbationField<4> f4(aniso4(), 2.5);
  for (const auto& p : corner_samples<4>(3.0, 4))
    EXPECT_LT(boundary_derivative_relation_residual(f4, make_metric_state(f4, p)), 1e-8);
}

TEST(Curvature, BoundaryQueriesNeedBoundaryPoint) {
  const PerturbationField<3> f(aniso3(), 2.5);
  Point<3> p;
  p.rho = 1.0;
  p.s = 0.2;
  EXPECT_THROW(boundary_geometry(make_metric_state(f, p)), DomainError);
  EXPECT_THROW(boundary_one_form_derivative(f, p), DomainError);
}

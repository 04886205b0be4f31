#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hypmass/checks.hpp"
#include "hypmass/perturb.hpp"
#include "test_util.hpp"

using namespace hypmass;

namespace {

Aniso<3> aniso3(double radial = 0.1) {
  Aniso<3> a;
  a.a = {{{0.10, 0.05, 0.08}, {0.05, -0.06, 0.04}, {0.08, 0.04, 0.12}}};
  a.radial = radial;
  return a;
}

Aniso<4> aniso4() {
  Aniso<4> a;
  a.a = {{{0.05, 0.02, 0.0, 0.03}, {0.02, -0.04, 0.01, 0.0}, {0.0, 0.01, 0.06, 0.02}, {0.03, 0.0, 0.02, -0.05}}};
  a.radial = 0.05;
  return a;
}

// nabla_k e_ij by differencing e and subtracting the connection terms.
template <int N>
Tensor3<N> fd_covariant(const PerturbationField<N>& f, const Point<N>& p) {
  const auto G = christoffel_b(p);
  const Mat<N> e = f.value(p);
  std::function<Mat<N>(const Vec<N>&)> ef = [&](const Vec<N>& y) { return f.template value<double>(y); };
  Tensor3<N> out;
  for (int k = 0; k < N; ++k) {
    const auto d = testutil::dmat<N>(ef, p.coords(), k, 1e-3);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        double v = d[i][j];
        for (int m = 0; m < N; ++m) v -= G[m][k][i] * e[m][j] + G[m][k][j] * e[i][m];
        out[k][i][j] = v;
      }
  }
  return out;
}

template <int N>
void covariant_derivatives_match_fd(const PerturbationField<N>& f, std::uint64_t seed) {
  SampleRng rng(seed);
  for (int t = 0; t < 30; ++t) {
    const auto p = random_point<N>(rng, {0.3, 2.5, 0.0, 2.0});
    const auto jet = f.eval(p, 2);
    EXPECT_LT(testutil::max_diff<N>(jet.de, fd_covariant(f, p)), 1e-8);

    // nabla_l nabla_k e_ij = d_l (nabla_k e_ij) - G^m_lk nabla_m e_ij - G^m_li nabla_k e_mj - G^m_lj nabla_k e_im
    const auto G = christoffel_b(p);
    for (int l = 0; l < N; ++l) {
      auto at = [&](double h) {
        Vec<N> y = p.coords();
        y[l] += h;
        return f.eval(Point<N>::from_coords(y), 1).de;
      };
      const double h = 1e-4;
      const auto a = at(h), b = at(-h);
      for (int k = 0; k < N; ++k)
        for (int i = 0; i < N; ++i)
          for (int j = 0; j < N; ++j) {
            double v = (a[k][i][j] - b[k][i][j]) / (2 * h);
            for (int m = 0; m < N; ++m)
              v -= G[m][l][k] * jet.de[m][i][j] + G[m][l][i] * jet.de[k][m][j] + G[m][l][j] * jet.de[k][i][m];
            EXPECT_NEAR(jet.dde[l][k][i][j], v, 1e-5);
          }
    }
  }
}

}  // namespace

TEST(Perturb, ConformalTraceAndGradient) {
  const double m = 0.2, tau = 2.0;
  const PerturbationField<3> f(Conformal{m}, tau);
  SampleRng rng(3);
  for (int t = 0; t < 20; ++t) {
    const auto p = random_point<3>(rng);
    const auto jet = f.eval(p, 1);
    const double r = geodesic_radius(p);
    const double phi = m * std::exp(-tau * r);
    EXPECT_NEAR(contract<3>(metric_b_inverse(p), jet.e), 3.0 * phi, 1e-15);
    // nabla e = d phi (x) b with d phi = -tau phi dr, dr = dV / sinh r
    const auto pot = potential_V(p);
    const Mat<3> b = metric_b(p);
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          EXPECT_NEAR(jet.de[k][i][j], -tau * phi * pot.grad[k] / std::sinh(r) * b[i][j], 1e-13);
  }
}

TEST(Perturb, ZeroAmplitudeIsZero) {
  const PerturbationField<3> f(Conformal{0.0}, 2.0);
  Point<3> p;
  p.rho = 1.0;
  p.s = 0.5;
  const auto jet = f.eval(p, 2);
  EXPECT_EQ(max_abs<3>(jet.e), 0.0);
  EXPECT_EQ(max_abs<3>(jet.de), 0.0);
  EXPECT_EQ(max_abs<3>(jet.dde), 0.0);
}

TEST(Perturb, Symmetric) {
  const PerturbationField<3> f(aniso3(), 2.5);
  SampleRng rng(4);
  for (int t = 0; t < 20; ++t) {
    const auto jet = f.eval(random_point<3>(rng), 2);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        EXPECT_EQ(jet.e[i][j], jet.e[j][i]);
        for (int k = 0; k < 3; ++k) EXPECT_NEAR(jet.de[k][i][j], jet.de[k][j][i], 1e-15);
      }
  }
}

TEST(Perturb, CovariantDerivativesAnisoN3) { covariant_derivatives_match_fd(PerturbationField<3>(aniso3(), 2.5), 5); }
TEST(Perturb, CovariantDerivativesAnisoN4) { covariant_derivatives_match_fd(PerturbationField<4>(aniso4(), 2.5), 6); }
TEST(Perturb, CovariantDerivativesConformalN3) {
  covariant_derivatives_match_fd(PerturbationField<3>(Conformal{0.1}, 2.0), 7);
}

TEST(Perturb, BoundedByEquivalence) {
  const PerturbationField<3> f(aniso3(), 2.5);
  SampleRng rng(8);
  for (int t = 0; t < 200; ++t) {
    const auto p = random_point<3>(rng, {0.01, 3.0, -2.0, 2.0});
    EXPECT_LE(norm2_lower<3>(metric_b_inverse(p), f.value(p)), f.equivalence_bound() + 1e-15);
  }
  EXPECT_LT(f.equivalence_bound(), 0.5);
}

TEST(Perturb, DecayRateConformal) {
  // kappa does not depend on the amplitude; m = 0.2 keeps g uniformly equivalent to b.
  const std::vector<double> radii{3, 4, 5, 6, 7};
  const auto fit = decay_check(PerturbationField<3>(Conformal{0.2}, 2.0), radii);
  EXPECT_NEAR(fit.kappa, 2.0, 0.05);
  EXPECT_FALSE(fit.compact_support);
}

TEST(Perturb, DecayRateAniso) {
  const std::vector<double> radii{3, 4, 5, 6, 7};
  EXPECT_NEAR(decay_check(PerturbationField<3>(aniso3(), 2.5), radii).kappa, 2.5, 0.1);
  EXPECT_NEAR(decay_check(PerturbationField<4>(aniso4(), 2.5), radii).kappa, 2.5, 0.1);
}

TEST(Perturb, BumpHasCompactSupport) {
  Bump<3> bump;
  bump.center = 4.5;
  bump.width = 0.5;
  bump.amplitude = 0.1;
  bump.mask = identity<3>();
  const PerturbationField<3> f(bump, 2.0);
  EXPECT_EQ(f.support_radius(), 5.0);
  const std::vector<double> radii{6, 7, 8};
  const auto fit = decay_check(f, radii);
  EXPECT_TRUE(fit.compact_support);
  const std::vector<double> straddle{4.5, 5.5, 6};
  EXPECT_THROW(decay_check(f, straddle), DegenerateFitError);
}

TEST(Perturb, RejectsSlowDecayAndLargeAmplitude) {
  EXPECT_THROW(PerturbationField<3>(Conformal{0.1}, 1.5), DomainError);
  EXPECT_THROW(PerturbationField<3>(Conformal{0.1}, 1.4), DomainError);
  EXPECT_THROW(PerturbationField<4>(Conformal{0.1}, 2.0), DomainError);
  EXPECT_NO_THROW(PerturbationField<3>(Conformal{0.1}, 1.51));
  EXPECT_THROW(PerturbationField<3>(Conformal{1.0}, 2.0), DomainError);
  EXPECT_THROW(PerturbationField<3>(aniso3(0.3), 2.5), DomainError);
  auto skew = aniso3();
  skew.a[0][1] += 0.01;
  EXPECT_THROW(PerturbationField<3>(skew, 2.5), DomainError);
}

TEST(Perturb, AnisoHasBoundaryMixedComponent) {
  const PerturbationField<3> f(aniso3(), 2.5);
  const auto pts = corner_samples<3>(4.0, 6);
  double worst = 0.0, mean = 0.0;
  for (const auto& p : pts) {
    EXPECT_EQ(p.s, 0.0);
    const double ern = f.value(p)[0][2];
    worst = std::max(worst, std::abs(ern));
    mean += ern / pts.size();
  }
  EXPECT_GT(worst, 1e-6);
  EXPECT_GT(std::abs(mean), 1e-6);
  const PerturbationField<3> c(Conformal{0.1}, 2.0);
  for (const auto& p : pts) EXPECT_EQ(c.value(p)[0][2], 0.0);
}

TEST(Perturb, HemisphereSamplesLieOnSphere) {
  for (const auto& p : hemisphere_samples<4>(5.0, 5)) {
    EXPECT_NEAR(geodesic_radius(p), 5.0, 1e-12);
    EXPECT_GE(p.s, 0.0);
  }
}

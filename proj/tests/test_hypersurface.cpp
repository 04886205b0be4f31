#include <gtest/gtest.h>

#include <cmath>

#include "hypmass/checks.hpp"
#include "hypmass/hypersurface.hpp"
#include "test_util.hpp"

using namespace hypmass;

namespace {

Aniso<3> aniso3() {
  Aniso<3> a;
  a.a = {{{0.10, 0.05, 0.08}, {0.05, -0.06, 0.04}, {0.08, 0.04, 0.12}}};
  a.radial = 0.1;
  return a;
}

// Induced metric of a Sigma piece in its parameters, tangents from first-order AD
// of the embedding only.
std::function<Mat<2>(const Vec<2>&)> induced(const PerturbationField<3>& f, Piece piece, double R) {
  return [&f, piece, R](const Vec<2>& q) {
    const auto x = embed<Dual1<2>, 3>(piece, R, seed1<2>(q));
    Vec<3> xv;
    for (int i = 0; i < 3; ++i) xv[i] = x[i].v;
    const Mat<3> g = metric_g<double, 3>(f, xv);
    Mat<2> h{};
    for (int a = 0; a < 2; ++a)
      for (int c = 0; c < 2; ++c)
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) h[a][c] += x[i].d[a] * g[i][j] * x[j].d[c];
    return h;
  };
}

// The cap is polar in (rho, phi); difference in u = rho cos phi, v = rho sin phi
// instead, which stays smooth through the pole.
std::function<Mat<2>(const Vec<2>&)> cartesian_cap(std::function<Mat<2>(const Vec<2>&)> polar) {
  return [polar](const Vec<2>& w) {
    const double r = std::hypot(w[0], w[1]);
    const Mat<2> hp = polar({r, std::atan2(w[1], w[0])});
    const double J[2][2] = {{w[0] / r, w[1] / r}, {-w[1] / (r * r), w[0] / (r * r)}};
    Mat<2> h{};
    for (int a = 0; a < 2; ++a)
      for (int c = 0; c < 2; ++c)
        for (int p = 0; p < 2; ++p)
          for (int q = 0; q < 2; ++q) h[a][c] += J[p][a] * hp[p][q] * J[q][c];
    return h;
  };
}

double fd_scalar_curvature(const std::function<Mat<2>(const Vec<2>&)>& h, const Vec<2>& q) {
  const auto Rm = testutil::riemann<2>(h, q, 2e-3);
  const auto hi = testutil::invert<2>(h(q));
  double s = 0.0;
  for (int b = 0; b < 2; ++b)
    for (int c = 0; c < 2; ++c) {
      double ric = 0.0;
      for (int a = 0; a < 2; ++a) ric += Rm[a][b][c][a];
      s += hi[b][c] * ric;
    }
  return s;
}

// H = div_g(grad r / |grad r|) by differencing sqrt(det g) nu^i.
double fd_level_set_mean_curvature(const PerturbationField<3>& f, const Point<3>& p) {
  auto flux = [&](const Vec<3>& x) {
    const Mat<3> g = metric_g<double, 3>(f, x);
    const Mat<3> gi = testutil::invert<3>(g);
    const auto pot = potential_V(Point<3>::from_coords(x));
    double nrm = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) nrm += gi[i][j] * pot.grad[i] * pot.grad[j];
    nrm = std::sqrt(nrm);
    const double det = g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) -
                       g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0]) +
                       g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
    Mat<3> out{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out[0][i] += std::sqrt(det) * gi[i][j] * pot.grad[j] / nrm;
    out[1][0] = std::sqrt(det);
    return out;
  };
  double div = 0.0;
  for (int i = 0; i < 3; ++i) div += testutil::dmat<3>(flux, p.coords(), i, 1e-4)[0][i];
  return div / flux(p.coords())[1][0];
}

}  // namespace

TEST(Hypersurface, UnperturbedHemisphere) {
  const PerturbationField<3> zero(Conformal{0.0}, 2.0);
  const double R = 2.0;
  for (const auto& node : build_sigma<3>(R, 8).nodes) {
    const auto hp = hypersurface_geometry<3>(zero, node, R);
    EXPECT_NEAR(hp.H, 2.0746294415, 1e-9);
    EXPECT_NEAR(hp.H, 2.0 / std::tanh(R), 1e-12);
    EXPECT_NEAR(hp.R_intrinsic, 2.0 / (std::sinh(R) * std::sinh(R)), 1e-12);
    EXPECT_NEAR(hp.area_density, node.measure_b, 1e-12 * node.measure_b);
  }
  for (const auto& node : build_corner<3>(R, 8).nodes)
    EXPECT_NEAR(boundary_edge_mean_curvature<3>(zero, R, {node.params[0]}), 0.0, 1e-12);
}

TEST(Hypersurface, UnperturbedHemisphereN4) {
  const PerturbationField<4> zero(Conformal{0.0}, 2.5);
  const double R = 3.0;
  const auto sigma = build_sigma<4>(R, 8);
  for (std::size_t i = 0; i < sigma.nodes.size(); i += 7) {
    const auto hp = hypersurface_geometry<4>(zero, sigma.nodes[i], R);
    EXPECT_NEAR(hp.H, 3.0 / std::tanh(R), 1e-11);
    EXPECT_NEAR(hp.R_intrinsic, 6.0 / (std::sinh(R) * std::sinh(R)), 1e-8 * hp.R_intrinsic);
  }
}

TEST(Hypersurface, ConformalClosedForm) {
  // g = (1 + phi) b with phi = m exp(-tau r): Sigma_R is umbilic with constant u = 1 + phi(R).
  const double m = 0.1, tau = 2.0, R = 2.5;
  const PerturbationField<3> f(Conformal{m}, tau);
  const double phi = m * std::exp(-tau * R), u = 1.0 + phi;
  const double H = (2.0 / std::tanh(R) - tau * phi / u) / std::sqrt(u);
  const double Rs = 2.0 / (u * std::sinh(R) * std::sinh(R));
  for (const auto& node : build_sigma<3>(R, 8).nodes) {
    const auto hp = hypersurface_geometry<3>(f, node, R);
    EXPECT_NEAR(hp.H, H, 1e-12);
    EXPECT_NEAR(hp.R_intrinsic, Rs, 1e-12);
  }
  EXPECT_NEAR(boundary_edge_mean_curvature<3>(f, R, {1.0}), 0.0, 1e-12);
}

TEST(Hypersurface, AnisoIntrinsicCurvatureAgainstFd) {
  const PerturbationField<3> f(aniso3(), 2.0);
  const double R = 2.5;
  const auto sigma = build_sigma<3>(R, 8);
  for (std::size_t i = 0; i < sigma.nodes.size(); i += 5) {
    const auto& node = sigma.nodes[i];
    const auto hp = hypersurface_geometry<3>(f, node, R);
    const auto h = induced(f, node.piece, R);
    const double fd = node.piece == Piece::Band
                          ? fd_scalar_curvature(h, node.params)
                          : fd_scalar_curvature(cartesian_cap(h), {node.params[0] * std::cos(node.params[1]),
                                                                   node.params[0] * std::sin(node.params[1])});
    EXPECT_NEAR(hp.R_intrinsic, fd, 1e-5 * std::abs(fd)) << "node " << i;
    EXPECT_NEAR(hp.H, fd_level_set_mean_curvature(f, node.point), 1e-7);
    // nu is g-unit
    const Mat<3> g = metric_g<double, 3>(f, node.point.coords());
    double n2 = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int c = 0; c < 3; ++c) n2 += g[a][c] * hp.nu[a] * hp.nu[c];
    EXPECT_NEAR(n2, 1.0, 1e-12);
  }
}

TEST(Hypersurface, AnisoEdgeCurvatureAgainstFd) {
  const PerturbationField<3> f(aniso3(), 2.0);
  const double R = 2.5;
  const auto h = induced(f, Piece::Band, R);
  for (double phi : {0.3, 1.7, 4.0}) {
    // div_gamma of N^a = -gamma^{a0} / sqrt(gamma^{00}) at the edge s = 0
    auto flux = [&](const Vec<2>& q) {
      const Mat<2> hm = h(q);
      const Mat<2> hi = testutil::invert<2>(hm);
      const double sq = std::sqrt(hm[0][0] * hm[1][1] - hm[0][1] * hm[1][0]);
      Mat<2> out{};
      for (int a = 0; a < 2; ++a) out[0][a] = -sq * hi[a][0] / std::sqrt(hi[0][0]);
      out[1][0] = sq;
      return out;
    };
    const Vec<2> q{0.0, phi};
    double div = 0.0;
    for (int a = 0; a < 2; ++a) div += testutil::dmat<2>(flux, q, a, 1e-4)[0][a];
    div /= flux(q)[1][0];
    EXPECT_NEAR(boundary_edge_mean_curvature<3>(f, R, {phi}), div, 1e-7);
    EXPECT_GT(std::abs(div), 1e-6);
  }
}

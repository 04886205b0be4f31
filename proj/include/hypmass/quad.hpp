#pragma once

// Surface quadrature on the exhaustion pieces of H^n_+ by geodesic half spheres:
//   Sigma_R = {r = R, s >= 0}, Pi_R = {s = 0, rho <= R}, S_R = {s = 0, rho = R}.
//
// Sigma_R is split into a band parameterized by (s, angles) for 0 <= s <= R - 1
// and a cap parameterized by (rho, angles) over the top. Both maps are smooth
// up to the edges, so Gauss-Legendre converges geometrically on each piece.

#include <gsl/gsl_integration.h>

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hypmass/dual.hpp"
#include "hypmass/errors.hpp"
#include "hypmass/hypgeom.hpp"
#include "hypmass/linalg.hpp"
#include "hypmass/parallel.hpp"

namespace hypmass {

enum class PatchKind { Sigma, Pi, Corner, ClosedSphere };
enum class Piece { Band, TopCap, BottomCap, Disk, Circle };

struct Rule1D {
  std::vector<double> x, w;
};

inline Rule1D gauss_legendre(int order, double a, double b) {
  if (order < 1) throw QuadratureError("Gauss-Legendre order must be positive");
  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> table(
      gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(order)), &gsl_integration_glfixed_table_free);
  if (!table) throw QuadratureError("failed to allocate Gauss-Legendre table");
  Rule1D r;
  r.x.resize(order);
  r.w.resize(order);
  for (int i = 0; i < order; ++i) gsl_integration_glfixed_point(a, b, static_cast<std::size_t>(i), &r.x[i], &r.w[i], table.get());
  return r;
}

// Periodic trapezoid rule on [0, 2 pi) with half-step offset.
inline Rule1D periodic_trapezoid(int order) {
  Rule1D r;
  for (int i = 0; i < order; ++i) {
    r.x.push_back(2.0 * M_PI * (i + 0.5) / order);
    r.w.push_back(2.0 * M_PI / order);
  }
  return r;
}

// Chart point of a hypersurface piece from its parameters. Parameters are
// (s or rho, angles...) for Sigma pieces and the disk, angles only for the circle.
template <class T, int N>
VecT<T, N> embed(Piece piece, double R, const VecT<T, N - 1>& q) {
  using std::acosh, std::cosh;
  VecT<T, N> x;
  switch (piece) {
    case Piece::Band:
      x[N - 1] = q[0];
      x[0] = acosh(cosh(R) / cosh(q[0]));
      break;
    case Piece::TopCap:
    case Piece::BottomCap:
      x[0] = q[0];
      x[N - 1] = acosh(cosh(R) / cosh(q[0]));
      if (piece == Piece::BottomCap) x[N - 1] = -x[N - 1];
      break;
    case Piece::Disk:
      x[0] = q[0];
      x[N - 1] = T(0.0);
      break;
    case Piece::Circle:
      x[0] = T(R);
      x[N - 1] = T(0.0);
      for (int a = 0; a < N - 2; ++a) x[a + 1] = q[a];
      return x;
  }
  for (int a = 0; a < N - 2; ++a) x[a + 1] = q[a + 1];
  return x;
}

template <int N>
struct SurfaceNode {
  Point<N> point;
  Vec<N - 1> params{};
  double weight = 0.0;
  int dim = N - 1;
  std::array<Vec<N>, N - 1> tangents{};
  double measure_b = 0.0;  // Gram-determinant density under b
  Piece piece = Piece::Band;
};

template <int N>
struct SurfacePatch {
  PatchKind kind = PatchKind::Sigma;
  double R = 0.0;
  int orders = 0;
  std::vector<SurfaceNode<N>> nodes;
};

// Gram-determinant density sqrt(det(T^a_i T^b_j m_ij)) of the tangent frame.
template <int N>
double gram_density(const SurfaceNode<N>& node, const Mat<N>& metric) {
  const int m = node.dim;
  double G[N][N] = {};
  for (int a = 0; a < m; ++a)
    for (int c = 0; c < m; ++c) {
      double v = 0.0;
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) v += node.tangents[a][i] * metric[i][j] * node.tangents[c][j];
      G[a][c] = v;
    }
  // LU without pivoting is fine for a Gram matrix (SPD).
  double det = 1.0;
  for (int k = 0; k < m; ++k) {
    if (!(G[k][k] > 0.0)) return 0.0;
    det *= G[k][k];
    for (int i = k + 1; i < m; ++i) {
      const double f = G[i][k] / G[k][k];
      for (int j = k; j < m; ++j) G[i][j] -= f * G[k][j];
    }
  }
  return std::sqrt(det);
}

namespace detail {

template <int N>
void fill_tangents(SurfaceNode<N>& node, double R) {
  using D = Dual1<N - 1>;
  VecT<D, N - 1> q;
  for (int a = 0; a < N - 1; ++a) {
    q[a].v = node.params[a];
    q[a].d.fill(0.0);
    if (a < node.dim) q[a].d[a] = 1.0;
  }
  const auto x = embed<D, N>(node.piece, R, q);
  Vec<N> xv;
  for (int i = 0; i < N; ++i) {
    xv[i] = x[i].v;
    for (int a = 0; a < node.dim; ++a) node.tangents[a][i] = x[i].d[a];
  }
  node.point = Point<N>::from_coords(xv);
  node.measure_b = gram_density<N>(node, metric_b<N>(node.point));
  if (!(node.measure_b > 1e-14))
    throw QuadratureError("degenerate parameterization: Gram determinant below 1e-14 at a node of R = " +
                          std::to_string(R));
}

// Tensor-product angular rule: Gauss-Legendre on (0, pi) for polar angles,
// offset trapezoid for the periodic angle.
template <int N>
std::vector<std::pair<std::array<double, N - 2>, double>> angular_rule(int orders) {
  std::vector<std::pair<std::array<double, N - 2>, double>> out;
  std::array<double, N - 2> a{};
  std::function<void(int, double)> rec = [&](int slot, double w) {
    if (slot == N - 2) {
      out.emplace_back(a, w);
      return;
    }
    const Rule1D r = (slot == N - 3) ? periodic_trapezoid(orders) : gauss_legendre(orders, 0.0, M_PI);
    for (std::size_t i = 0; i < r.x.size(); ++i) {
      a[slot] = r.x[i];
      rec(slot + 1, w * r.w[i]);
    }
  };
  rec(0, 1.0);
  return out;
}

template <int N>
void add_piece(SurfacePatch<N>& patch, Piece piece, const Rule1D& radial, int orders) {
  const auto ang = angular_rule<N>(orders);
  for (std::size_t i = 0; i < radial.x.size(); ++i)
    for (const auto& [a, wa] : ang) {
      SurfaceNode<N> node;
      node.piece = piece;
      node.dim = N - 1;
      node.params[0] = radial.x[i];
      for (int k = 0; k < N - 2; ++k) node.params[k + 1] = a[k];
      node.weight = radial.w[i] * wa;
      fill_tangents<N>(node, patch.R);
      patch.nodes.push_back(node);
    }
}

inline void check_build_args(double R, int orders) {
  if (!(R >= 2.0)) throw DomainError("exhaustion radius must be >= 2, got " + std::to_string(R));
  if (orders < 8) throw QuadratureError("quadrature order must be >= 8, got " + std::to_string(orders));
}

inline double cap_rho(double R) { return std::acosh(std::cosh(R) / std::cosh(R - 1.0)); }

}  // namespace detail

template <int N>
SurfacePatch<N> build_sigma(double R, int orders) {
  detail::check_build_args(R, orders);
  SurfacePatch<N> patch{PatchKind::Sigma, R, orders, {}};
  detail::add_piece<N>(patch, Piece::Band, gauss_legendre(orders, 0.0, R - 1.0), orders);
  detail::add_piece<N>(patch, Piece::TopCap, gauss_legendre(orders, 0.0, detail::cap_rho(R)), orders);
  return patch;
}

// The full geodesic sphere {r = R} of H^n, for closed-surface checks.
template <int N>
SurfacePatch<N> build_closed_sphere(double R, int orders) {
  detail::check_build_args(R, orders);
  SurfacePatch<N> patch{PatchKind::ClosedSphere, R, orders, {}};
  detail::add_piece<N>(patch, Piece::Band, gauss_legendre(2 * orders, -(R - 1.0), R - 1.0), orders);
  detail::add_piece<N>(patch, Piece::TopCap, gauss_legendre(orders, 0.0, detail::cap_rho(R)), orders);
  detail::add_piece<N>(patch, Piece::BottomCap, gauss_legendre(orders, 0.0, detail::cap_rho(R)), orders);
  return patch;
}

template <int N>
SurfacePatch<N> build_pi(double R, int orders) {
  detail::check_build_args(R, orders);
  SurfacePatch<N> patch{PatchKind::Pi, R, orders, {}};
  detail::add_piece<N>(patch, Piece::Disk, gauss_legendre(orders, 0.0, R), orders);
  return patch;
}

template <int N>
SurfacePatch<N> build_corner(double R, int orders) {
  detail::check_build_args(R, orders);
  SurfacePatch<N> patch{PatchKind::Corner, R, orders, {}};
  for (const auto& [a, wa] : detail::angular_rule<N>(orders)) {
    SurfaceNode<N> node;
    node.piece = Piece::Circle;
    node.dim = N - 2;
    node.params.fill(0.0);
    for (int k = 0; k < N - 2; ++k) node.params[k] = a[k];
    node.weight = wa;
    detail::fill_tangents<N>(node, R);
    patch.nodes.push_back(node);
  }
  return patch;
}

// Outward conormal of S_R inside the boundary for the background metric: d_rho.
template <int N>
Vec<N> corner_conormal_b() {
  Vec<N> t{};
  t[0] = 1.0;
  return t;
}

// Sum over nodes of weight * density * value with a fixed-order compensated sum.
template <int N>
double integrate(const SurfacePatch<N>& patch, std::span<const double> density, std::span<const double> values) {
  if (density.size() != patch.nodes.size() || values.size() != patch.nodes.size())
    throw QuadratureError("integrate: size mismatch between patch and field samples");
  std::vector<double> terms(patch.nodes.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (!std::isfinite(values[i])) {
      const auto& p = patch.nodes[i].point;
      throw QuadratureError("poisoned node " + std::to_string(i) + " at (rho=" + std::to_string(p.rho) +
                            ", s=" + std::to_string(p.s) + "): non-finite field value");
    }
    terms[i] = patch.nodes[i].weight * density[i] * values[i];
  }
  return compensated_sum(terms);
}

// Integral of a node function against the b-induced measure.
template <int N, class Fn>
double integrate(const SurfacePatch<N>& patch, Fn&& field, int workers = 1) {
  const auto values = parallel_map(patch.nodes.size(), workers, [&](std::size_t i) { return field(patch.nodes[i]); });
  std::vector<double> density(patch.nodes.size());
  for (std::size_t i = 0; i < density.size(); ++i) density[i] = patch.nodes[i].measure_b;
  return integrate<N>(patch, density, values);
}

template <int N>
double area_b(const SurfacePatch<N>& patch) {
  return integrate<N>(patch, [](const SurfaceNode<N>&) { return 1.0; });
}

// Volume of the unit sphere S^k.
inline double unit_sphere_volume(int k) {
  return 2.0 * std::pow(M_PI, 0.5 * (k + 1)) / std::tgamma(0.5 * (k + 1));
}

}  // namespace hypmass

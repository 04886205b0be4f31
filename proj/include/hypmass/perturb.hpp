#pragma once

// Closed-form metric perturbations e = g - b on the slab chart, with exact
// partial derivatives through forward-mode AD and covariant derivatives
// assembled against the background connection.

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hypmass/dual.hpp"
#include "hypmass/errors.hpp"
#include "hypmass/fit.hpp"
#include "hypmass/hypgeom.hpp"
#include "hypmass/linalg.hpp"

namespace hypmass {

// e = amplitude * exp(-tau r) * b
struct Conformal {
  double amplitude = 0.0;
};

// e = amplitude * bump(r) * mask_ab xi^a xi^b with a smooth bump supported in
// (center - width, center + width).
template <int N>
struct Bump {
  double center = 4.0;
  double width = 1.0;
  double amplitude = 0.0;
  Mat<N> mask{};
};

// e = exp(-tau r) * (a_ab + radial * (t_a delta_bn + delta_an t_b)) xi^a xi^b,
// with t_k = X_k / cosh(rho) the bounded radial direction of the boundary
// slice (t_n = 0). The radial part gives e_{rho s} a nonzero mean over S_R.
template <int N>
struct Aniso {
  Mat<N> a{};
  double radial = 0.0;
};

template <int N>
using FamilySpec = std::variant<Conformal, Bump<N>, Aniso<N>>;

// Smooth coframe bounded in the b-norm and regular on the polar axis:
// xi^k = dX_k / U for the hyperboloid coordinates X_k = sinh(rho) omega_k of
// H^{n-1} (k < n-1), and xi^{n-1} = U ds. Returns xi[a][i].
template <class T, int N>
MatT<T, N> smooth_coframe(const VecT<T, N>& x) {
  using D = Dual<T, N>;
  VecT<D, N> xs;
  for (int i = 0; i < N; ++i) {
    xs[i].v = x[i];
    for (int j = 0; j < N; ++j) xs[i].d[j] = T(i == j ? 1.0 : 0.0);
  }
  const auto omega = sphere_embedding<D, N>(xs);
  using std::sinh, std::cosh;
  const D sh = sinh(xs[0]);
  const T U = cosh(x[0]);
  MatT<T, N> xi = zero_mat<T, N>();
  for (int k = 0; k < N - 1; ++k) {
    const D X = sh * omega[k];
    for (int i = 0; i < N; ++i) xi[k][i] = X.d[i] / U;
  }
  xi[N - 1][N - 1] = U;
  return xi;
}

template <class T, int N>
MatT<T, N> coframe_quadratic(const MatT<T, N>& xi, const Mat<N>& coeff, const T& scale) {
  MatT<T, N> e = zero_mat<T, N>();
  for (int a = 0; a < N; ++a)
    for (int c = 0; c < N; ++c) {
      if (coeff[a][c] == 0.0) continue;
      for (int i = 0; i < N; ++i)
        for (int j = i; j < N; ++j) e[i][j] += coeff[a][c] * xi[a][i] * xi[c][j];
    }
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j) e[j][i] = e[i][j] = e[i][j] * scale;
  return e;
}

// All covariant data of e at a point. Slot order follows the derivative order:
// de[k][i][j] = nabla_k e_ij, dde[l][k][i][j] = nabla_l nabla_k e_ij.
template <int N>
struct PerturbationJet {
  Mat<N> e{};
  Array3<N> de{};
  Tensor4<N> dde{};
};

template <int N>
  requires ValidDimension<N>
class PerturbationField {
 public:
  PerturbationField(FamilySpec<N> spec, double tau) : spec_(std::move(spec)), tau_(tau) {
    if (!(tau_ > N / 2.0))
      throw DomainError("decay rate tau = " + std::to_string(tau_) + " must exceed n/2 = " +
                        std::to_string(N / 2.0));
    std::visit(
        [](const auto& f) {
          using F = std::decay_t<decltype(f)>;
          const Mat<N>* m = nullptr;
          if constexpr (std::is_same_v<F, Aniso<N>>) m = &f.a;
          if constexpr (std::is_same_v<F, Bump<N>>) m = &f.mask;
          if (m)
            for (int i = 0; i < N; ++i)
              for (int j = 0; j < i; ++j)
                if ((*m)[i][j] != (*m)[j][i]) throw DomainError("coefficient matrix must be symmetric");
        },
        spec_);
    const double bound = equivalence_bound();
    if (!(bound < 0.5))
      throw DomainError("perturbation amplitude too large: sup ||e||_b bound " + std::to_string(bound) +
                        " must be < 1/2 for uniform equivalence with b");
    if (const auto* bump = std::get_if<Bump<N>>(&spec_)) {
      if (!(bump->width > 0.0) || !(bump->center - bump->width > 0.0))
        throw DomainError("bump support must lie in r > 0 with positive width");
    }
  }

  double tau() const { return tau_; }
  const FamilySpec<N>& spec() const { return spec_; }

  // Radius beyond which e vanishes identically, or +inf.
  double support_radius() const {
    if (const auto* bump = std::get_if<Bump<N>>(&spec_)) return bump->center + bump->width;
    return std::numeric_limits<double>::infinity();
  }

  // Pointwise value of e in chart components, generic in the scalar type.
  template <class T>
  MatT<T, N> value(const VecT<T, N>& x) const {
    using std::exp, std::tanh;
    const T r = geodesic_radius(x[0], x[N - 1]);
    return std::visit(
        [&](const auto& f) -> MatT<T, N> {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, Conformal>) {
            MatT<T, N> b = metric_b<T, N>(x);
            const T phi = f.amplitude * exp(-tau_ * r);
            for (auto& row : b)
              for (auto& v : row) v = v * phi;
            return b;
          } else if constexpr (std::is_same_v<F, Aniso<N>>) {
            MatT<T, N> e = coframe_quadratic<T, N>(smooth_coframe<T, N>(x), f.a, T(exp(-tau_ * r)));
            if (f.radial != 0.0) {
              const MatT<T, N> xi = smooth_coframe<T, N>(x);
              const auto omega = sphere_embedding<T, N>(x);
              const T th = tanh(x[0]);
              const T scale = f.radial * exp(-tau_ * r);
              for (int k = 0; k < N - 1; ++k) {
                const T c = scale * th * omega[k];
                for (int i = 0; i < N; ++i)
                  for (int j = 0; j < N; ++j)
                    e[i][j] += c * (xi[k][i] * xi[N - 1][j] + xi[N - 1][i] * xi[k][j]);
              }
            }
            return e;
          } else {
            const T u = (r - f.center) / f.width;
            if (std::abs(value_of(u)) >= 1.0) return zero_mat<T, N>();
            const T bump = f.amplitude * exp(1.0 - 1.0 / (1.0 - u * u));
            return coframe_quadratic<T, N>(smooth_coframe<T, N>(x), f.mask, bump);
          }
        },
        spec_);
  }

  Mat<N> value(const Point<N>& p) const { return value<double>(p.coords()); }

  // Exact partials: partial[k][i][j] = d_k e_ij, partial2[l][k][i][j] = d_l d_k e_ij.
  void partials(const Point<N>& p, Mat<N>& e, Array3<N>& d1, Tensor4<N>& d2) const {
    const auto xs = seed2<N>(p.coords());
    const auto ed = value<Dual2<N>>(xs);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        const Jet2<N> jet = jet_of<N>(ed[i][j]);
        e[i][j] = jet.val;
        for (int k = 0; k < N; ++k) {
          d1[k][i][j] = jet.grad[k];
          for (int l = 0; l < N; ++l) d2[l][k][i][j] = jet.hess[l][k];
        }
      }
  }

  // Covariant derivatives up to `order` (0, 1 or 2) with respect to b.
  PerturbationJet<N> eval(const Point<N>& p, int order = 2) const {
    if (order < 0 || order > 2) throw DomainError("eval_e: order must be 0, 1 or 2");
    require_regular(p, "eval_e");
    PerturbationJet<N> out;
    out.de = zero3<N>();
    out.dde = zero4<N>();
    if (order == 0) {
      out.e = value(p);
      return out;
    }
    Mat<N> e;
    Array3<N> pe;
    Tensor4<N> ppe;
    partials(p, e, pe, ppe);
    out.e = e;

    // Gamma-bar and its partials through first-order AD of the closed form.
    const auto gd = christoffel_b<Dual1<N>, N>(seed1<N>(p.coords()));
    Tensor3<N> G;
    Tensor4<N> dG;  // dG[l][m][k][i] = d_l Gamma^m_ki
    for (int m = 0; m < N; ++m)
      for (int k = 0; k < N; ++k)
        for (int i = 0; i < N; ++i) {
          G[m][k][i] = gd[m][k][i].v;
          for (int l = 0; l < N; ++l) dG[l][m][k][i] = gd[m][k][i].d[l];
        }

    for (int k = 0; k < N; ++k)
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
          double v = pe[k][i][j];
          for (int m = 0; m < N; ++m) v -= G[m][k][i] * e[m][j] + G[m][k][j] * e[i][m];
          out.de[k][i][j] = v;
        }
    if (order == 1) return out;

    // d_l (nabla_k e_ij), then the three connection corrections.
    for (int l = 0; l < N; ++l)
      for (int k = 0; k < N; ++k)
        for (int i = 0; i < N; ++i)
          for (int j = 0; j < N; ++j) {
            double v = ppe[l][k][i][j];
            for (int m = 0; m < N; ++m) {
              v -= dG[l][m][k][i] * e[m][j] + G[m][k][i] * pe[l][m][j];
              v -= dG[l][m][k][j] * e[i][m] + G[m][k][j] * pe[l][i][m];
            }
            for (int m = 0; m < N; ++m) {
              v -= G[m][l][k] * out.de[m][i][j];
              v -= G[m][l][i] * out.de[k][m][j];
              v -= G[m][l][j] * out.de[k][i][m];
            }
            out.dde[l][k][i][j] = v;
          }
    return out;
  }

  // Upper bound on sup ||e||_b over the whole chart.
  double equivalence_bound() const {
    return std::visit(
        [&](const auto& f) -> double {
          using F = std::decay_t<decltype(f)>;
          // sum_a xi^a (x) xi^a = (hbar + dU^2)/U^2 + U^2 ds^2 <= b, so the
          // coframe has operator norm <= 1 and ||e||_b <= |scale| ||coeff||_F.
          auto frame_bound = [](const Mat<N>& c) {
            double s = 0.0;
            for (const auto& row : c)
              for (double v : row) s += v * v;
            return std::sqrt(s);
          };
          if constexpr (std::is_same_v<F, Conformal>) {
            return std::abs(f.amplitude) * std::sqrt(static_cast<double>(N));
          } else if constexpr (std::is_same_v<F, Aniso<N>>) {
            return frame_bound(f.a) + std::sqrt(2.0) * std::abs(f.radial);
          } else {
            return std::abs(f.amplitude) * frame_bound(f.mask);
          }
        },
        spec_);
  }

 private:
  FamilySpec<N> spec_;
  double tau_;
};

// Offset grid on the angular sphere S^{n-2}: periodic last angle, interior
// midpoints for the polar angles so that no sample sits on a chart pole.
template <int N>
std::vector<std::array<double, N - 2>> angle_grid(int per_direction) {
  const int k = std::max(per_direction, 2);
  std::vector<std::array<double, N - 2>> angles;
  std::array<double, N - 2> a{};
  std::function<void(int)> rec = [&](int slot) {
    if (slot == N - 2) {
      angles.push_back(a);
      return;
    }
    for (int t = 0; t < k; ++t) {
      a[slot] = (slot == N - 3) ? 2.0 * M_PI * (t + 0.5) / k : M_PI * (t + 0.5) / k;
      rec(slot + 1);
    }
  };
  rec(0);
  return angles;
}

// Deterministic sample of points on the half sphere {r = R, s >= 0}, avoiding
// the polar axis.
template <int N>
std::vector<Point<N>> hemisphere_samples(double R, int per_direction) {
  std::vector<Point<N>> out;
  const int k = std::max(per_direction, 2);
  const auto angles = angle_grid<N>(k);
  const double shR = std::sinh(R);
  for (int t = 0; t < k; ++t) {
    const double psi = 0.5 * M_PI * (t + 0.25) / k;  // elevation above the boundary
    const double s = std::asinh(shR * std::sin(psi));
    const double rho = std::acosh(std::max(1.0, std::cosh(R) / std::cosh(s)));
    for (const auto& a : angles) {
      Point<N> p;
      p.rho = rho;
      p.ang = a;
      p.s = s;
      out.push_back(p);
    }
  }
  return out;
}

// Points on the corner sphere {rho = R, s = 0}.
template <int N>
std::vector<Point<N>> corner_samples(double R, int per_direction) {
  std::vector<Point<N>> out;
  for (const auto& a : angle_grid<N>(per_direction)) {
    Point<N> p;
    p.rho = R;
    p.ang = a;
    p.s = 0.0;
    out.push_back(p);
  }
  return out;
}

struct DecayFit {
  double kappa = 0.0;
  bool compact_support = false;
  std::vector<double> radii;
  std::vector<double> sup_values;
};

template <int N>
double decay_norm(const PerturbationField<N>& f, const Point<N>& p) {
  const auto jet = f.eval(p, 2);
  const Mat<N> binv = metric_b_inverse(p);
  return norm2_lower<N>(binv, jet.e) + norm3_lower<N>(binv, jet.de) + norm4_lower<N>(binv, jet.dde);
}

// Fits sup_{r=R} (||e|| + ||nabla e|| + ||nabla nabla e||)_b ~ C exp(-kappa R).
template <int N>
DecayFit decay_check(const PerturbationField<N>& f, std::span<const double> radii, int per_direction = 6) {
  require_increasing(radii, "decay_check");
  DecayFit out;
  out.radii.assign(radii.begin(), radii.end());
  int zeros = 0;
  for (double R : radii) {
    double sup = 0.0;
    for (const auto& p : hemisphere_samples<N>(R, per_direction)) sup = std::max(sup, decay_norm(f, p));
    if (sup == 0.0) ++zeros;
    out.sup_values.push_back(sup);
  }
  if (zeros == static_cast<int>(radii.size())) {
    out.compact_support = true;
    out.kappa = std::numeric_limits<double>::infinity();
    return out;
  }
  if (zeros > 0) throw DegenerateFitError("decay_check: some but not all sphere samples vanish");
  for (std::size_t i = 1; i < out.sup_values.size(); ++i)
    if (!(out.sup_values[i] < out.sup_values[i - 1]))
      throw DegenerateFitError("decay_check: sup norms are not decreasing in R");
  out.kappa = -fit_log_slope(radii, out.sup_values);
  return out;
}

}  // namespace hypmass

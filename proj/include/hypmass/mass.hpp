#pragma once

// The two mass formulas, the Hawking-type mass and the asymptotic-expansion
// verifiers.
//
//   m_def(R)   = 2 int_Sigma C^i nubar_i dA_b + int_S e_{an} thetabar^a dsigma_b
//   m_ricci(R) = -2/(n-2) [ int_Sigma Gt(X, nu) dA_g + int_S (A - H h)(X, theta) dsigma_g ]
//
// with C^i = (V nabla_l e_jk - e_jk nabla_l V) P^{ijkl}, P^{ijkl} =
// 1/2 (b^ik b^jl - b^il b^jk), X = grad V, and unit normals and conormals
// taken for b on the definition side and for g on the Ricci side. The flux
// weight 2 is what the Ricci-side identity and the boundary identity
// 2VH + 2<C, eta> = hbar^{ab} D_a e_bn require; with weight 1 the two formulas
// differ by a factor of two on Sigma and by half the corner term.

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hypmass/curvature.hpp"
#include "hypmass/fit.hpp"
#include "hypmass/hypersurface.hpp"
#include "hypmass/parallel.hpp"
#include "hypmass/perturb.hpp"
#include "hypmass/quad.hpp"

namespace hypmass {

struct MassOptions {
  int workers = 1;
  // Build P^{ijkl} from g^{-1} instead of b^{-1} (sensitivity diagnostic).
  bool p_from_g = false;
  double flux_weight = 2.0;
};

// C^i = P^{ijkl} (V nabla_l e_jk - e_jk nabla_l V).
template <int N>
Vec<N> charge_density(const MetricState<N>& ms, bool p_from_g = false) {
  const Mat<N>& inv = p_from_g ? ms.g_inv : ms.b_inv;
  const double V = ms.pot.V;
  // W[l][j][k]
  Array3<N> W;
  for (int l = 0; l < N; ++l)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) W[l][j][k] = V * ms.jet.de[l][j][k] - ms.jet.e[j][k] * ms.pot.grad[l];
  // P W = 1/2 (inv^{ik} inv^{jl} W_ljk - inv^{il} inv^{jk} W_ljk)
  Vec<N> C{};
  for (int i = 0; i < N; ++i) {
    double v = 0.0;
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l) v += (inv[i][k] * inv[j][l] - inv[i][l] * inv[j][k]) * W[l][j][k];
    C[i] = 0.5 * v;
  }
  return C;
}

// nabla_i C^i with P from b (parallel) and nabla nabla V = V b.
template <int N>
double charge_divergence(const MetricState<N>& ms) {
  const auto& bi = ms.b_inv;
  const double V = ms.pot.V;
  const auto& dV = ms.pot.grad;
  const auto& e = ms.jet.e;
  const auto& de = ms.jet.de;
  const auto& dde = ms.jet.dde;
  double s = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l) {
          const double P = 0.5 * (bi[i][k] * bi[j][l] - bi[i][l] * bi[j][k]);
          if (P == 0.0) continue;
          const double dW = dV[i] * de[l][j][k] + V * dde[i][l][j][k] - de[i][j][k] * dV[l] -
                            e[j][k] * V * ms.b[i][l];
          s += P * dW;
        }
  return s;
}

template <int N>
struct MassAtRadius {
  double R = 0.0;
  double sigma_term_def = 0.0;
  double corner_term_def = 0.0;
  double sigma_term_ricci = 0.0;
  double corner_term_ricci = 0.0;
  double area_g = 0.0;
  double max_abs_integrand_def = 0.0;
  double max_abs_integrand_ricci = 0.0;

  double m_def() const { return sigma_term_def + corner_term_def; }
  double m_ricci() const { return -2.0 / (N - 2.0) * (sigma_term_ricci + corner_term_ricci); }
};

namespace detail {

template <int N>
struct SigmaNodeValues {
  double def = 0.0, ricci = 0.0, density_g = 0.0;
};

template <int N>
struct CornerNodeValues {
  double def = 0.0, ricci = 0.0, density_g = 0.0;
};

template <int N>
SigmaNodeValues<N> sigma_node(const PerturbationField<N>& f, const SurfaceNode<N>& node, const MassOptions& opt) {
  SigmaNodeValues<N> v;
  const Mat<N> b = metric_b(node.point);
  Mat<N> g = f.value(node.point);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) g[i][j] += b[i][j];
  v.density_g = gram_density<N>(node, g);
  const double outside = f.support_radius();
  if (geodesic_radius(node.point) >= outside) return v;  // e and all derivatives vanish
  const auto ms = make_metric_state(f, node.point);
  const auto& dV = ms.pot.grad;
  // Definition side: C . nubar with nubar = dV / |dV|_b.
  const Vec<N> C = charge_density(ms, opt.p_from_g);
  const double nb = norm_vec_lower<N>(ms.b_inv, dV);
  double cdot = 0.0;
  for (int i = 0; i < N; ++i) cdot += C[i] * dV[i];
  v.def = cdot / nb;
  // Ricci side: Gt(X, nu) with X = b^{-1} dV and nu = g^{-1} dV / |dV|_g.
  const auto cp = riemann_exact(ms);
  const double ng = norm_vec_lower<N>(ms.g_inv, dV);
  Vec<N> X{}, nu{};
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      X[i] += ms.b_inv[i][j] * dV[j];
      nu[i] += ms.g_inv[i][j] * dV[j] / ng;
    }
  double gx = 0.0;
  for (int i = 0; i < N; ++i)
    for (int k = 0; k < N; ++k) gx += cp.gtilde[i][k] * X[i] * nu[k];
  v.ricci = gx;
  return v;
}

template <int N>
CornerNodeValues<N> corner_node(const PerturbationField<N>& f, const SurfaceNode<N>& node) {
  constexpr int n = N - 1;
  CornerNodeValues<N> v;
  const Mat<N> b = metric_b(node.point);
  Mat<N> g = f.value(node.point);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) g[i][j] += b[i][j];
  v.density_g = gram_density<N>(node, g);
  if (geodesic_radius(node.point) >= f.support_radius()) return v;
  const auto ms = make_metric_state(f, node.point);
  // Definition side: e_{an} thetabar^a with thetabar = d_rho.
  v.def = ms.jet.e[0][n];
  // Ricci side.
  const auto bp = boundary_geometry(ms);
  Vec<N - 1> X{}, theta{};
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) X[a] += ms.b_inv[a][c] * ms.pot.grad[c];
  const double w = std::sqrt(bp.h_inv[0][0]);
  for (int a = 0; a < n; ++a) theta[a] = bp.h_inv[a][0] / w;
  double val = 0.0;
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) val += (bp.A[a][c] - bp.H * bp.h[a][c]) * X[a] * theta[c];
  v.ricci = val;
  return v;
}

}  // namespace detail

// Both mass formulas on the exhaustion piece of radius R.
template <int N>
MassAtRadius<N> evaluate_mass(const PerturbationField<N>& f, double R, int orders, const MassOptions& opt = {}) {
  MassAtRadius<N> out;
  out.R = R;
  const auto sigma = build_sigma<N>(R, orders);
  const auto corner = build_corner<N>(R, orders);

  const auto sv = parallel_map(sigma.nodes.size(), opt.workers,
                               [&](std::size_t i) { return detail::sigma_node<N>(f, sigma.nodes[i], opt); });
  const auto cv = parallel_map(corner.nodes.size(), opt.workers,
                               [&](std::size_t i) { return detail::corner_node<N>(f, corner.nodes[i]); });

  std::vector<double> db(sigma.nodes.size()), dg(sigma.nodes.size()), fd(sigma.nodes.size()), fr(sigma.nodes.size()),
      one(sigma.nodes.size(), 1.0);
  for (std::size_t i = 0; i < sv.size(); ++i) {
    db[i] = sigma.nodes[i].measure_b;
    dg[i] = sv[i].density_g;
    fd[i] = sv[i].def;
    fr[i] = sv[i].ricci;
    out.max_abs_integrand_def = std::max(out.max_abs_integrand_def, std::abs(opt.flux_weight * fd[i]));
    out.max_abs_integrand_ricci = std::max(out.max_abs_integrand_ricci, std::abs(fr[i]));
  }
  out.sigma_term_def = opt.flux_weight * integrate<N>(sigma, db, fd);
  out.sigma_term_ricci = integrate<N>(sigma, dg, fr);
  out.area_g = integrate<N>(sigma, dg, one);

  std::vector<double> cb(corner.nodes.size()), cg(corner.nodes.size()), cd(corner.nodes.size()),
      cr(corner.nodes.size());
  for (std::size_t i = 0; i < cv.size(); ++i) {
    cb[i] = corner.nodes[i].measure_b;
    cg[i] = cv[i].density_g;
    cd[i] = cv[i].def;
    cr[i] = cv[i].ricci;
    out.max_abs_integrand_def = std::max(out.max_abs_integrand_def, std::abs(cd[i]));
    out.max_abs_integrand_ricci = std::max(out.max_abs_integrand_ricci, std::abs(cr[i]));
  }
  out.corner_term_def = integrate<N>(corner, cb, cd);
  out.corner_term_ricci = integrate<N>(corner, cg, cr);
  return out;
}

template <int N>
double mass_definition(const PerturbationField<N>& f, double R, int orders, const MassOptions& opt = {}) {
  return evaluate_mass(f, R, orders, opt).m_def();
}

template <int N>
double mass_ricci(const PerturbationField<N>& f, double R, int orders, const MassOptions& opt = {}) {
  return evaluate_mass(f, R, orders, opt).m_ricci();
}

struct HawkingResult {
  double area = 0.0;
  double bulk = 0.0;  // int_Sigma [R_Sigma + (n-1)(n-2) - (n-2)/(n-1) H^2]
  double edge = 0.0;  // int_{dSigma} H_{dSigma}
  double mass = 0.0;
  double max_abs_pointwise = 0.0;  // max |R_Sigma + (n-1)(n-2) - (n-2)/(n-1) H^2|
};

// m_H = |Sigma|^{1/(n-1)} { int_Sigma [...] + 2 int_{dSigma} H_{dSigma} } on the half sphere of radius R.
template <int N>
HawkingResult hawking_mass(const PerturbationField<N>& f, double R, int orders, int workers = 1) {
  const auto sigma = build_sigma<N>(R, orders);
  const auto corner = build_corner<N>(R, orders);
  const double n = N;
  struct NodeVal {
    double density, integrand;
  };
  const auto vals = parallel_map(sigma.nodes.size(), workers, [&](std::size_t i) {
    const auto hp = hypersurface_geometry<N>(f, sigma.nodes[i], R);
    return NodeVal{hp.area_density,
                   hp.R_intrinsic + (n - 1) * (n - 2) - (n - 2) / (n - 1) * hp.H * hp.H};
  });
  std::vector<double> dens(vals.size()), integ(vals.size()), one(vals.size(), 1.0);
  HawkingResult out;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    dens[i] = vals[i].density;
    integ[i] = vals[i].integrand;
    out.max_abs_pointwise = std::max(out.max_abs_pointwise, std::abs(integ[i]));
  }
  out.area = integrate<N>(sigma, dens, one);
  out.bulk = integrate<N>(sigma, dens, integ);
  std::vector<double> cd(corner.nodes.size()), ch(corner.nodes.size());
  for (std::size_t i = 0; i < corner.nodes.size(); ++i) {
    const auto& node = corner.nodes[i];
    cd[i] = gram_density<N>(node, metric_g<double, N>(f, node.point.coords()));
    std::array<double, N - 2> ang;
    for (int a = 0; a < N - 2; ++a) ang[a] = node.params[a];
    ch[i] = boundary_edge_mean_curvature<N>(f, R, ang);
  }
  out.edge = integrate<N>(corner, cd, ch);
  out.mass = std::pow(out.area, 1.0 / (n - 1)) * (out.bulk + 2.0 * out.edge);
  return out;
}

struct ClosedHawking2D {
  double area = 0.0;
  double willmore = 0.0;  // int (H^2 - 4)
  double bracket = 0.0;   // 8 pi chi - int (H^2 - 4)
  double mass = 0.0;      // |Sigma|^{1/2} * bracket
};

// Closed-surface form |Sigma|^{1/2} {8 pi chi - int (H^2 - 4)} on the full
// geodesic sphere (chi = 2) of a three-dimensional metric.
inline ClosedHawking2D hawking_closed_2d(const PerturbationField<3>& f, double R, int orders) {
  const auto sphere = build_closed_sphere<3>(R, orders);
  std::vector<double> dens(sphere.nodes.size()), w(sphere.nodes.size()), one(sphere.nodes.size(), 1.0);
  for (std::size_t i = 0; i < sphere.nodes.size(); ++i) {
    const auto& node = sphere.nodes[i];
    dens[i] = gram_density<3>(node, metric_g<double, 3>(f, node.point.coords()));
    const double H = level_set_mean_curvature<3>(f, node.point);
    w[i] = H * H - 4.0;
  }
  ClosedHawking2D out;
  out.area = integrate<3>(sphere, dens, one);
  out.willmore = integrate<3>(sphere, dens, w);
  out.bracket = 8.0 * M_PI * 2.0 - out.willmore;
  out.mass = std::sqrt(out.area) * out.bracket;
  return out;
}

// A residual sampled over a radii grid with its fitted log-slope.
struct ResidualSeries {
  std::string name;
  std::vector<double> radii;
  std::vector<double> values;  // sup over the sampled sphere or corner
  double slope = 0.0;
  double predicted = 0.0;
  bool vanishes = false;         // every sample exactly zero
  bool partial_support = false;  // some samples exactly zero (compactly supported e); no slope
};

namespace detail {

inline void finish_series(ResidualSeries& s) {
  std::size_t zeros = 0;
  for (double v : s.values) zeros += v == 0.0 ? 1 : 0;
  s.vanishes = zeros == s.values.size();
  s.partial_support = zeros > 0 && !s.vanishes;
  if (zeros == 0) s.slope = fit_log_slope(s.radii, s.values);
}

template <int N, class Fn>
ResidualSeries sphere_series(const std::string& name, double predicted, std::span<const double> radii,
                             int per_direction, bool on_corner, int workers, Fn&& fn) {
  require_increasing(radii, name.c_str());
  ResidualSeries s;
  s.name = name;
  s.predicted = predicted;
  s.radii.assign(radii.begin(), radii.end());
  for (double R : radii) {
    const auto pts = on_corner ? corner_samples<N>(R, per_direction) : hemisphere_samples<N>(R, per_direction);
    const auto vals = parallel_map(pts.size(), workers, [&](std::size_t i) { return std::abs(fn(pts[i])); });
    double sup = 0.0;
    for (double v : vals) sup = std::max(sup, v);
    s.values.push_back(sup);
  }
  finish_series(s);
  return s;
}

}  // namespace detail

// V (R + n(n-1)) - 2 nabla_i C^i, predicted O(exp(-(2 tau - 1) r)).
template <int N>
ResidualSeries verify_scalar_identity(const PerturbationField<N>& f, std::span<const double> radii,
                                      int per_direction = 6, int workers = 1) {
  return detail::sphere_series<N>("scalar_identity", -(2.0 * f.tau() - 1.0), radii, per_direction, false, workers,
                                  [&](const Point<N>& p) {
                                    const auto ms = make_metric_state(f, p);
                                    const auto cp = riemann_exact(ms);
                                    return ms.pot.V * cp.scalar_shifted - 2.0 * charge_divergence(ms);
                                  });
}

// 2 V H + 2 <C, eta> - hbar^{ab} Dbar_a e_bn along the boundary, predicted O(exp(-(2 tau - 1) r)).
template <int N>
ResidualSeries verify_mean_curvature_identity(const PerturbationField<N>& f, std::span<const double> radii,
                                              int per_direction = 6, int workers = 1) {
  return detail::sphere_series<N>(
      "mean_curvature_identity", -(2.0 * f.tau() - 1.0), radii, per_direction, true, workers,
      [&](const Point<N>& p) {
        constexpr int n = N - 1;
        const auto ms = make_metric_state(f, p);
        const auto bp = boundary_geometry(ms);
        const Vec<N> C = charge_density(ms);
        double ceta = 0.0;
        for (int i = 0; i < N; ++i) ceta += C[i] * bp.eta_lower[i];
        const auto D = boundary_one_form_derivative(f, p);
        double trD = 0.0;
        for (int a = 0; a < n; ++a)
          for (int c = 0; c < n; ++c) trD += ms.b_inv[a][c] * D[a][c];
        return 2.0 * ms.pot.V * bp.H + 2.0 * ceta - trD;
      });
}

// 2 V H - b^{ab}(2 nabla_a e_bn - nabla_n e_ab), predicted O(exp(-(2 tau - 1) r)).
template <int N>
ResidualSeries verify_mean_curvature_expansion(const PerturbationField<N>& f, std::span<const double> radii,
                                               int per_direction = 6, int workers = 1) {
  return detail::sphere_series<N>("mean_curvature_expansion", -(2.0 * f.tau() - 1.0), radii, per_direction, true,
                                  workers, [&](const Point<N>& p) {
                                    const auto ms = make_metric_state(f, p);
                                    return mean_curvature_expansion_residual(ms, boundary_geometry(ms));
                                  });
}

// 2A - V^{-1}(...) in the hbar norm. The stated bound is O(exp(-tau r)).
template <int N>
ResidualSeries verify_second_fundamental_form(const PerturbationField<N>& f, std::span<const double> radii,
                                              int per_direction = 6, int workers = 1) {
  return detail::sphere_series<N>("second_fundamental_form_expansion", -f.tau(), radii, per_direction, true, workers,
                                  [&](const Point<N>& p) {
                                    const auto ms = make_metric_state(f, p);
                                    const auto res = second_fundamental_form_residual(ms, boundary_geometry(ms));
                                    return norm2_lower<N - 1>(boundary_block<N>(ms.b_inv), res);
                                  });
}

// b-norm of exact(-2 Gt) minus its linear expansion, predicted O(exp(-2 tau r)).
template <int N>
ResidualSeries verify_einstein_expansion(const PerturbationField<N>& f, std::span<const double> radii,
                                         int per_direction = 6, int workers = 1) {
  return detail::sphere_series<N>("einstein_expansion", -2.0 * f.tau(), radii, per_direction, false, workers,
                                  [&](const Point<N>& p) {
                                    const auto ms = make_metric_state(f, p);
                                    return norm2_lower<N>(ms.b_inv, einstein_expansion_residual(ms, riemann_exact(ms)));
                                  });
}

template <int N>
ResidualSeries verify_scalar_expansion(const PerturbationField<N>& f, std::span<const double> radii,
                                       int per_direction = 6, int workers = 1) {
  return detail::sphere_series<N>("scalar_expansion", -2.0 * f.tau(), radii, per_direction, false, workers,
                                  [&](const Point<N>& p) {
                                    const auto ms = make_metric_state(f, p);
                                    return scalar_expansion_residual(ms, riemann_exact(ms));
                                  });
}

// ||Lambda||_b, predicted O(exp(-tau r)).
template <int N>
ResidualSeries verify_lambda_decay(const PerturbationField<N>& f, std::span<const double> radii,
                                   int per_direction = 6, int workers = 1) {
  return detail::sphere_series<N>("lambda_decay", -f.tau(), radii, per_direction, false, workers,
                                  [&](const Point<N>& p) {
                                    const auto ms = make_metric_state(f, p);
                                    return norm_tensor3_mixed<N>(ms.b, ms.b_inv, lambda_tensor(ms));
                                  });
}

// Empirical integrability diagnostic: sup of V |R + n(n-1)| on spheres.
template <int N>
ResidualSeries scalar_integrability_diagnostic(const PerturbationField<N>& f, std::span<const double> radii,
                                               int per_direction = 6, int workers = 1) {
  return detail::sphere_series<N>("V_scalar_excess", -(N - 1.0), radii, per_direction, false, workers,
                                  [&](const Point<N>& p) {
                                    const auto ms = make_metric_state(f, p);
                                    return ms.pot.V * riemann_exact(ms).scalar_shifted;
                                  });
}

struct FormulaLimit {
  std::optional<Extrapolation> fit;
  std::string error;  // why no limit could be fitted
};

template <int N>
struct MassReport {
  std::string family;
  double tau = 0.0;
  int orders = 0;
  std::vector<MassAtRadius<N>> per_radius;
  FormulaLimit def, ricci;
  std::vector<ResidualSeries> residuals;

  std::vector<double> radii() const {
    std::vector<double> r;
    for (const auto& m : per_radius) r.push_back(m.R);
    return r;
  }
  std::vector<double> m_def() const {
    std::vector<double> v;
    for (const auto& m : per_radius) v.push_back(m.m_def());
    return v;
  }
  std::vector<double> m_ricci() const {
    std::vector<double> v;
    for (const auto& m : per_radius) v.push_back(m.m_ricci());
    return v;
  }
  std::vector<double> gaps() const {
    std::vector<double> v;
    for (const auto& m : per_radius) v.push_back(std::abs(m.m_def() - m.m_ricci()));
    return v;
  }
};

inline FormulaLimit fit_limit(std::span<const double> R, std::span<const double> m) {
  FormulaLimit out;
  try {
    out.fit = extrapolate(R, m);
  } catch (const DegenerateFitError& e) {
    out.error = e.what();
  }
  return out;
}

inline std::string family_name(const Conformal&) { return "conformal"; }
template <int N>
std::string family_name(const Bump<N>&) {
  return "bump";
}
template <int N>
std::string family_name(const Aniso<N>&) {
  return "aniso";
}

template <int N>
MassReport<N> mass_report(const PerturbationField<N>& f, std::span<const double> radii, int orders,
                          const MassOptions& opt = {}) {
  if (radii.empty()) throw DegenerateFitError("mass_report: empty radii");
  require_increasing(radii, "mass_report");
  MassReport<N> rep;
  rep.family = std::visit([](const auto& s) { return family_name(s); }, f.spec());
  rep.tau = f.tau();
  rep.orders = orders;
  for (double R : radii) rep.per_radius.push_back(evaluate_mass(f, R, orders, opt));
  const auto R = rep.radii();
  const auto md = rep.m_def();
  const auto mr = rep.m_ricci();
  rep.def = fit_limit(R, md);
  rep.ricci = fit_limit(R, mr);
  return rep;
}

// Plot data (R, log|m(R) - m_inf|) with the slope of the fitted model line.
struct ConvergenceSeries {
  std::string name;
  std::vector<double> radii;
  std::vector<double> log_residual;  // observed, NaN where m(R) equals the limit
  std::vector<double> log_model;     // log|c| - kappa R from the fit
  double slope = 0.0;                // -kappa
};

template <int N>
std::vector<ConvergenceSeries> report_convergence(const MassReport<N>& rep) {
  if (rep.per_radius.empty()) throw DegenerateFitError("report_convergence: report has no radii");
  std::vector<ConvergenceSeries> out;
  const auto R = rep.radii();
  auto add = [&](const std::string& name, const FormulaLimit& lim, const std::vector<double>& m) {
    if (!lim.fit) throw DegenerateFitError("report_convergence: no extrapolant for " + name + ": " + lim.error);
    const auto& fit = *lim.fit;
    ConvergenceSeries s;
    s.name = name;
    s.radii = R;
    for (std::size_t i = 0; i < R.size(); ++i) {
      const double d = std::abs(m[i] - fit.limit);
      s.log_residual.push_back(d > 0.0 ? std::log(d) : std::numeric_limits<double>::quiet_NaN());
      if (fit.exponent)
        s.log_model.push_back(std::log(std::abs(fit.coefficient)) - *fit.exponent * R[i]);
      else
        s.log_model.push_back(std::numeric_limits<double>::quiet_NaN());
    }
    s.slope = fit.exponent ? -*fit.exponent : 0.0;
    out.push_back(std::move(s));
  };
  add("m_def", rep.def, rep.m_def());
  add("m_ricci", rep.ricci, rep.m_ricci());
  for (const auto& r : rep.residuals) {
    ConvergenceSeries s;
    s.name = r.name;
    s.radii = r.radii;
    for (double v : r.values) s.log_residual.push_back(v > 0.0 ? std::log(v) : std::numeric_limits<double>::quiet_NaN());
    s.log_model = s.log_residual;
    s.slope = r.slope;
    out.push_back(std::move(s));
  }
  return out;
}


}  // namespace hypmass

#pragma once

// Suite orchestration for the command-line tool: runs the configured suites in
// the fixed order background -> decay -> lemmas -> mass -> hawking and renders
// summary.json, tolerances.json, mass.csv, residuals.csv and convergence.csv.
// Nothing that depends on the worker count or the clock reaches the outputs.

#include <fmt/format.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hypmass/checks.hpp"
#include "hypmass/config.hpp"
#include "hypmass/mass.hpp"
#include "json.hpp"

namespace hypmass {

using Json = nlohmann::ordered_json;

struct CheckRecord {
  std::string suite;
  std::string name;
  bool passed = false;
  double observed = 0.0;
  std::string expected;
  std::string note;
};

struct RunOutputs {
  bool passed = true;
  Json summary;
  Json tolerances;
  std::string mass_csv;
  std::string residuals_csv;
  std::string convergence_csv;
};

namespace detail {

inline std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", v);
}

inline Json jnum(double v) {
  if (!std::isfinite(v)) return Json(num(v));
  return Json(v);
}

class Recorder {
 public:
  void add(const std::string& suite, const std::string& name, bool passed, double observed, std::string expected,
           std::string note = {}) {
    records_.push_back({suite, name, passed, observed, std::move(expected), std::move(note)});
  }
  // |observed| <= tol
  void bound(const std::string& suite, const std::string& name, double observed, double tol,
             std::string note = {}) {
    add(suite, name, std::abs(observed) <= tol, observed, "<= " + num(tol), std::move(note));
  }
  const std::vector<CheckRecord>& records() const { return records_; }

 private:
  std::vector<CheckRecord> records_;
};

// Integral of sinh^k over [0, R].
inline double sinh_power_integral(int k, double R) {
  const double c = std::cosh(R), s = std::sinh(R);
  switch (k) {
    case 1:
      return c - 1.0;
    case 2:
      return 0.5 * (s * c - R);
    case 3:
      return c * c * c / 3.0 - c + 2.0 / 3.0;
    default:
      throw DomainError("sinh_power_integral: unsupported power");
  }
}

template <int N>
bool boundary_mixed_vanishes(const FamilySpec<N>& spec) {
  auto row_zero = [](const Mat<N>& m) {
    for (int a = 0; a < N - 1; ++a)
      if (m[a][N - 1] != 0.0) return false;
    return true;
  };
  if (std::holds_alternative<Conformal>(spec)) return true;
  if (const auto* b = std::get_if<Bump<N>>(&spec)) return b->amplitude == 0.0 || row_zero(b->mask);
  const auto& a = std::get<Aniso<N>>(spec);
  return a.radial == 0.0 && row_zero(a.a);
}

template <int N>
bool identically_zero(const FamilySpec<N>& spec) {
  if (const auto* c = std::get_if<Conformal>(&spec)) return c->amplitude == 0.0;
  if (const auto* b = std::get_if<Bump<N>>(&spec)) return b->amplitude == 0.0;
  const auto& a = std::get<Aniso<N>>(spec);
  if (a.radial != 0.0) return false;
  for (const auto& row : a.a)
    for (double v : row)
      if (v != 0.0) return false;
  return true;
}

// The expansions are O() bounds, so the gate is one-sided: the residual must
// decay at least as fast as predicted. Whether the rate is also sharp (within
// the tolerance on both sides) goes into the note.
inline void slope_check(Recorder& rec, const ResidualSeries& s, double rel) {
  if (s.vanishes) {
    rec.add("lemmas", s.name + "_slope", true, 0.0, "identically zero residual");
    return;
  }
  if (s.partial_support) {
    rec.add("lemmas", s.name + "_slope", true, std::numeric_limits<double>::quiet_NaN(),
            "slope undefined", "e has compact support inside the radii grid");
    return;
  }
  const double tol = rel * std::abs(s.predicted);
  const bool ok = s.slope <= s.predicted + tol;
  const bool sharp = std::abs(s.slope - s.predicted) <= tol;
  rec.add("lemmas", s.name + "_slope", ok, s.slope, "<= " + num(s.predicted + tol),
          sharp ? "sharp" : "faster than predicted");
}

template <int N>
struct SuiteState {
  const RunConfig& cfg;
  const PerturbationField<N>& f;
  Recorder rec;
  Json data = Json::object();
  std::vector<ResidualSeries> residuals;
  std::optional<MassReport<N>> mass;
};

template <int N>
void run_background(SuiteState<N>& st) {
  const auto& t = st.cfg.tol;
  const auto b = background_checks<N>(st.cfg.background_points, st.cfg.seed);
  auto& r = st.rec;
  r.bound("background", "hessian_V_minus_Vb", b.hessian, t.background_exact);
  r.bound("background", "laplacian_V_minus_nV", b.laplacian, t.background_exact);
  r.bound("background", "riemann_closed_vs_assembled", b.riemann_exact, t.background_exact);
  r.bound("background", "riemann_closed_vs_fd", b.riemann_fd, t.background_fd);
  r.bound("background", "modified_einstein_of_b", b.gtilde, t.background_exact);
  r.bound("background", "ricci_plus_n_minus_1_b", b.ricci, t.background_exact);
  r.bound("background", "scalar_plus_n_n_minus_1", b.scalar, t.background_exact);
  r.bound("background", "christoffel_block_identities", b.block, t.background_exact);
  st.data["background"] = Json{{"points", b.points}};
}

template <int N>
void run_decay(SuiteState<N>& st) {
  Json d;
  try {
    const auto fit = decay_check(st.f, st.cfg.decay_radii, st.cfg.per_direction);
    d["compact_support"] = fit.compact_support;
    d["kappa"] = jnum(fit.kappa);
    Json sv = Json::array();
    for (double v : fit.sup_values) sv.push_back(jnum(v));
    d["sup_values"] = sv;
    if (fit.compact_support) {
      st.rec.add("decay", "decay_exponent", true, fit.kappa, "compact support", "all sphere samples vanish");
    } else {
      const double tol = st.cfg.tol.decay_rel * st.f.tau();
      st.rec.add("decay", "decay_exponent", std::abs(fit.kappa - st.f.tau()) <= tol, fit.kappa,
                 num(st.f.tau()) + " +- " + num(tol));
    }
  } catch (const DegenerateFitError& e) {
    st.rec.add("decay", "decay_exponent", false, std::numeric_limits<double>::quiet_NaN(), "decaying samples",
               e.what());
  }
  st.data["decay"] = d;
}

template <int N>
void run_lemmas(SuiteState<N>& st) {
  const auto& c = st.cfg;
  const auto& t = c.tol;
  auto& r = st.rec;
  const double gap = riemann_oracle_gap(st.f, 30, c.seed);
  r.bound("lemmas", "riemann_exact_vs_fd", gap, t.curvature_fd);

  const auto tl = trace_lemma_order<N>({1e-1, 1e-2, 1e-3}, 100, c.seed);
  r.add("lemmas", "trace_lemma_order", std::abs(tl.order - 2.0) <= t.trace_order, tl.order,
        "2 +- " + num(t.trace_order));

  const std::span<const double> radii(c.decay_radii);
  const int k = c.per_direction;
  const int w = c.workers;
  std::vector<ResidualSeries> series;
  series.push_back(verify_scalar_identity(st.f, radii, k, w));
  series.push_back(verify_mean_curvature_identity(st.f, radii, k, w));
  series.push_back(verify_mean_curvature_expansion(st.f, radii, k, w));
  series.push_back(verify_einstein_expansion(st.f, radii, k, w));
  series.push_back(verify_scalar_expansion(st.f, radii, k, w));
  series.push_back(verify_second_fundamental_form(st.f, radii, k, w));
  series.push_back(verify_lambda_decay(st.f, radii, k, w));
  for (auto& s : series) {
    slope_check(r, s, t.slope_rel);
    st.residuals.push_back(s);
  }

  double rel = 0.0;
  for (double R : radii)
    for (const auto& p : corner_samples<N>(R, k)) {
      const auto ms = make_metric_state(st.f, p);
      rel = std::max(rel, boundary_derivative_relation_residual(st.f, ms));
    }
  r.bound("lemmas", "boundary_derivative_relation", rel, t.boundary_relation);

  // Integrability diagnostic for V (R + n(n-1)); reported, never gating.
  auto diag = scalar_integrability_diagnostic(st.f, radii, k, w);
  Json dj{{"name", diag.name}, {"vanishes", diag.vanishes}};
  if (!diag.vanishes && !diag.partial_support) {
    dj["slope"] = jnum(diag.slope);
    dj["integrable_if_slope_below"] = jnum(-(N - 1.0));
  }
  st.residuals.push_back(diag);
  st.data["lemmas"] = Json{{"trace_lemma_residuals", tl.residuals}, {"integrability", dj}};
}

template <int N>
void run_mass(SuiteState<N>& st) {
  const auto& c = st.cfg;
  const auto& t = c.tol;
  auto& r = st.rec;
  MassOptions opt;
  opt.workers = c.workers;

  // Quadrature fidelity on the exhaustion pieces at the largest radius.
  const double Rq = c.radii.back();
  const double sph = unit_sphere_volume(N - 1), sph2 = unit_sphere_volume(N - 2);
  const double hemi = 0.5 * sph * std::pow(std::sinh(Rq), N - 1);
  const double disk = sph2 * sinh_power_integral(N - 2, Rq);
  const double circ = sph2 * std::pow(std::sinh(Rq), N - 2);
  auto relerr = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
  r.bound("mass", "area_sigma_rel", relerr(area_b(build_sigma<N>(Rq, c.orders)), hemi), t.area_rel);
  r.bound("mass", "area_pi_rel", relerr(area_b(build_pi<N>(Rq, c.orders)), disk), t.area_rel);
  r.bound("mass", "area_corner_rel", relerr(area_b(build_corner<N>(Rq, c.orders)), circ), t.area_rel);

  auto rep = mass_report(st.f, c.radii, c.orders, opt);
  rep.residuals = st.residuals;
  const auto R = rep.radii();
  const auto gaps = rep.gaps();

  // Extrapolated limits and their agreement.
  const bool have = rep.def.fit && rep.ricci.fit;
  if (!have) {
    const std::string why = !rep.def.fit ? "m_def: " + rep.def.error : "m_ricci: " + rep.ricci.error;
    r.add("mass", "limits_agree", false, std::numeric_limits<double>::quiet_NaN(), "extrapolated limits exist",
          why);
  } else {
    const double a = rep.def.fit->limit, b = rep.ricci.fit->limit;
    const double scale = std::max(std::abs(a), std::abs(b));
    const double allowed =
        std::max(t.mass_agreement_rel * scale, rep.def.fit->uncertainty + rep.ricci.fit->uncertainty);
    const double diff = std::abs(a - b);
    r.add("mass", "limits_agree", diff <= allowed || (scale == 0.0 && diff == 0.0), diff,
          "<= " + num(allowed));
  }

  bool all_zero = true;
  for (double g : gaps) all_zero = all_zero && g == 0.0;
  bool decreasing = true;
  for (std::size_t i = 1; i < gaps.size(); ++i) decreasing = decreasing && gaps[i] < gaps[i - 1];
  r.add("mass", "gap_strictly_decreasing", all_zero || decreasing, gaps.back(),
        "strictly decreasing over the radii", all_zero ? "gap identically zero" : "");

  // Self-convergence under order doubling at the largest radius.
  const auto hi = evaluate_mass(st.f, Rq, 2 * c.orders, opt);
  const auto& lo = rep.per_radius.back();
  auto sc = [](double a, double b) {
    const double s = std::max(std::abs(a), std::abs(b));
    return s == 0.0 ? 0.0 : std::abs(a - b) / s;
  };
  r.bound("mass", "self_convergence_m_def", sc(lo.m_def(), hi.m_def()), t.self_convergence_rel);
  r.bound("mass", "self_convergence_m_ricci", sc(lo.m_ricci(), hi.m_ricci()), t.self_convergence_rel);

  // Zero cases: integrands vanish at every node outside the support.
  const double supp = st.f.support_radius();
  const bool zero_family = identically_zero(st.f.spec());
  for (const auto& m : rep.per_radius)
    if (zero_family || m.R >= supp) {
      r.bound("mass", "zero_integrand_R" + num(m.R),
              std::max(m.max_abs_integrand_def, m.max_abs_integrand_ricci), t.zero_integrand);
    }
  if (boundary_mixed_vanishes(st.f.spec())) {
    double worst = 0.0;
    for (const auto& m : rep.per_radius)
      worst = std::max({worst, std::abs(m.corner_term_def), std::abs(m.corner_term_ricci)});
    r.bound("mass", "corner_terms_vanish", worst, t.corner_vanish, "e_{an} = 0 on the boundary");
  }

  Json mj;
  auto lim = [](const FormulaLimit& l) {
    Json j;
    if (l.fit) {
      j["limit"] = jnum(l.fit->limit);
      j["exponent"] = l.fit->exponent ? jnum(*l.fit->exponent) : Json(nullptr);
      j["uncertainty"] = jnum(l.fit->uncertainty);
      j["rms_residual"] = jnum(l.fit->rms_residual);
    } else {
      j["error"] = l.error;
    }
    return j;
  };
  mj["family"] = rep.family;
  mj["tau"] = rep.tau;
  mj["orders"] = rep.orders;
  mj["m_def_limit"] = lim(rep.def);
  mj["m_ricci_limit"] = lim(rep.ricci);
  if (!all_zero) {
    try {
      const double k = -fit_log_slope(R, gaps);
      mj["gap_decay_exponent"] = jnum(k);
      mj["gap_decay_predicted"] = jnum(2.0 * st.f.tau() - N);
    } catch (const DegenerateFitError&) {
    }
  }
  st.data["mass"] = mj;
  st.mass = std::move(rep);
}

template <int N>
void run_hawking(SuiteState<N>& st) {
  const auto& c = st.cfg;
  const auto& t = c.tol;
  Json arr = Json::array();
  const bool zero_family = identically_zero(st.f.spec());
  for (double R : c.hawking_radii) {
    const auto h = hawking_mass(st.f, R, c.orders, c.workers);
    Json j{{"R", R}, {"area", jnum(h.area)}, {"bulk", jnum(h.bulk)}, {"edge", jnum(h.edge)}, {"m_H", jnum(h.mass)}};
    const bool flat = zero_family || R >= st.f.support_radius();
    if (flat) st.rec.bound("hawking", "m_H_background_R" + num(R), h.mass, t.hawking_abs);
    if constexpr (N == 3) {
      const auto cl = hawking_closed_2d(st.f, R, c.orders);
      j["closed_bracket"] = jnum(cl.bracket);
      j["closed_m"] = jnum(cl.mass);
      if (flat)
        st.rec.bound("hawking", "closed_sphere_bracket_over_8pi_R" + num(R), cl.bracket / (8.0 * M_PI),
                     t.hawking_abs);
    }
    arr.push_back(j);
  }
  st.data["hawking"] = arr;
}

inline std::string mass_csv_text(const std::vector<double>& R, const std::vector<std::array<double, 6>>& rows) {
  std::string s = "R,m_def,m_ricci,sigma_term_def,corner_term_def,sigma_term_ricci,corner_term_ricci\n";
  for (std::size_t i = 0; i < R.size(); ++i) {
    s += num(R[i]);
    for (double v : rows[i]) s += "," + num(v);
    s += "\n";
  }
  return s;
}

}  // namespace detail

template <int N>
RunOutputs run_suites(const RunConfig& cfg) {
  const auto f = make_field<N>(cfg);
  detail::SuiteState<N> st{cfg, f, {}, Json::object(), {}, std::nullopt};
  auto wants = [&](const char* s) { return std::find(cfg.suites.begin(), cfg.suites.end(), s) != cfg.suites.end(); };
  if (wants("background")) detail::run_background(st);
  if (wants("decay")) detail::run_decay(st);
  if (wants("lemmas")) detail::run_lemmas(st);
  if (wants("mass")) detail::run_mass(st);
  if (wants("hawking")) detail::run_hawking(st);

  RunOutputs out;
  Json suites = Json::array();
  Json ledger = Json::array();
  for (const auto& name : suite_names()) {
    if (!wants(name.c_str())) continue;
    Json checks = Json::array();
    bool ok = true;
    for (const auto& rec : st.rec.records()) {
      if (rec.suite != name) continue;
      Json cj{{"name", rec.name}, {"passed", rec.passed}, {"observed", detail::jnum(rec.observed)},
              {"expected", rec.expected}};
      if (!rec.note.empty()) cj["note"] = rec.note;
      checks.push_back(cj);
      ledger.push_back(Json{{"suite", name}, {"check", rec.name}, {"tolerance", rec.expected},
                            {"observed", detail::jnum(rec.observed)}, {"passed", rec.passed}});
      ok = ok && rec.passed;
    }
    out.passed = out.passed && ok;
    suites.push_back(Json{{"name", name}, {"passed", ok}, {"checks", checks}});
  }

  const auto& t = cfg.tol;
  Json tol{{"background_exact", t.background_exact}, {"background_fd", t.background_fd},
           {"decay_rel", t.decay_rel},               {"slope_rel", t.slope_rel},
           {"mass_agreement_rel", t.mass_agreement_rel}, {"self_convergence_rel", t.self_convergence_rel},
           {"zero_integrand", t.zero_integrand},     {"corner_vanish", t.corner_vanish},
           {"hawking_abs", t.hawking_abs},           {"boundary_relation", t.boundary_relation},
           {"trace_order", t.trace_order},           {"curvature_fd", t.curvature_fd},
           {"area_rel", t.area_rel}};
  Json fam{{"kind", cfg.family.kind}};
  if (cfg.family.kind != "aniso") fam["amplitude"] = cfg.family.amplitude;
  if (cfg.family.kind == "bump") {
    fam["center"] = cfg.family.center;
    fam["width"] = cfg.family.width;
    fam["mask"] = cfg.family.matrix;
  }
  if (cfg.family.kind == "aniso") {
    fam["a"] = cfg.family.matrix;
    fam["radial"] = cfg.family.radial;
  }
  out.summary = Json{{"config",
                      {{"n", cfg.n},
                       {"tau", cfg.tau},
                       {"family", fam},
                       {"radii", cfg.radii},
                       {"decay_radii", cfg.decay_radii},
                       {"hawking_radii", cfg.hawking_radii},
                       {"orders", cfg.orders},
                       {"per_direction", cfg.per_direction},
                       {"background_points", cfg.background_points},
                       {"suites", cfg.suites},
                       {"seed", cfg.seed}}},
                     {"tolerances", tol},
                     {"passed", out.passed},
                     {"suites", suites},
                     {"data", st.data}};
  out.tolerances = Json{{"effective", tol}, {"checks", ledger}};

  // CSV tables.
  if (st.mass) {
    const auto& rep = *st.mass;
    std::vector<std::array<double, 6>> rows;
    for (const auto& m : rep.per_radius)
      rows.push_back({m.m_def(), m.m_ricci(), m.sigma_term_def, m.corner_term_def, m.sigma_term_ricci,
                      m.corner_term_ricci});
    out.mass_csv = detail::mass_csv_text(rep.radii(), rows);
  } else {
    out.mass_csv = detail::mass_csv_text({}, {});
  }
  out.residuals_csv = "series,R,value,slope,predicted\n";
  for (const auto& s : st.residuals)
    for (std::size_t i = 0; i < s.radii.size(); ++i)
      out.residuals_csv += s.name + "," + detail::num(s.radii[i]) + "," + detail::num(s.values[i]) + "," +
                           detail::num(s.vanishes || s.partial_support ? std::nan("") : s.slope) + "," +
                           detail::num(s.predicted) + "\n";

  std::vector<ConvergenceSeries> conv;
  if (st.mass) {
    try {
      conv = report_convergence(*st.mass);
    } catch (const DegenerateFitError& e) {
      out.summary["convergence_note"] = std::string(e.what());
      for (const auto& s : st.residuals) {
        ConvergenceSeries cs;
        cs.name = s.name;
        cs.radii = s.radii;
        for (double v : s.values) cs.log_residual.push_back(v > 0.0 ? std::log(v) : std::nan(""));
        cs.log_model = cs.log_residual;
        cs.slope = s.vanishes || s.partial_support ? std::nan("") : s.slope;
        conv.push_back(cs);
      }
    }
  }
  out.convergence_csv = "series,R,log_residual,log_model,slope\n";
  for (const auto& s : conv)
    for (std::size_t i = 0; i < s.radii.size(); ++i)
      out.convergence_csv += s.name + "," + detail::num(s.radii[i]) + "," + detail::num(s.log_residual[i]) + "," +
                             detail::num(s.log_model[i]) + "," + detail::num(s.slope) + "\n";
  return out;
}

inline RunOutputs run(const RunConfig& cfg) {
  switch (cfg.n) {
    case 3:
      return run_suites<3>(cfg);
    case 4:
      return run_suites<4>(cfg);
    case 5:
      return run_suites<5>(cfg);
    default:
      throw ConfigError("unsupported dimension n = " + std::to_string(cfg.n));
  }
}

inline void write_outputs(const RunOutputs& out, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto put = [&](const char* name, const std::string& text) {
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    if (!f) throw Error("cannot write " + (fs::path(dir) / name).string());
    f << text;
  };
  put("summary.json", out.summary.dump(2) + "\n");
  put("tolerances.json", out.tolerances.dump(2) + "\n");
  put("mass.csv", out.mass_csv);
  put("residuals.csv", out.residuals_csv);
  put("convergence.csv", out.convergence_csv);
}

}  // namespace hypmass

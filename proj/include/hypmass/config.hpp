#pragma once

// Run configuration: a YAML file with a closed schema. Unknown keys, wrong
// types and constraint violations raise ConfigError naming the field and line.
//
//   n: 3
//   tau: 2.0
//   family: {kind: conformal, amplitude: 0.01}
//   radii: [4, 5, 6, 7, 8]
//   orders: 32
//   suites: [background, decay, lemmas, mass, hawking]
//   seed: 1
//   workers: 1
//   output: out
//   tolerances: {slope_rel: 0.15, ...}

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hypmass/errors.hpp"
#include "hypmass/perturb.hpp"

namespace hypmass {

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"background", "decay", "lemmas", "mass", "hawking"};
  return names;
}

struct FamilyConfig {
  std::string kind = "conformal";  // conformal | bump | aniso
  double amplitude = 0.0;
  double center = 0.0;
  double width = 0.0;
  double radial = 0.0;
  std::vector<std::vector<double>> matrix;  // bump mask or aniso a
};

struct Tolerances {
  double background_exact = 1e-10;
  double background_fd = 1e-6;
  double decay_rel = 0.05;
  double slope_rel = 0.15;
  double mass_agreement_rel = 0.01;
  double self_convergence_rel = 1e-6;
  double zero_integrand = 1e-12;
  double corner_vanish = 1e-10;
  double hawking_abs = 1e-6;
  double boundary_relation = 1e-8;
  double trace_order = 0.1;
  double curvature_fd = 1e-5;
  double area_rel = 1e-8;
};

struct RunConfig {
  int n = 3;
  double tau = 2.0;
  FamilyConfig family;
  std::vector<double> radii{4, 5, 6, 7, 8};
  std::vector<double> decay_radii{3, 4, 5, 6, 7};
  std::vector<double> hawking_radii{2, 4};
  int orders = 32;
  int per_direction = 6;
  int background_points = 200;
  std::vector<std::string> suites = suite_names();
  std::uint64_t seed = 1;
  int workers = 1;
  std::string output = "out";
  Tolerances tol;
};

namespace detail {

inline std::string where(const YAML::Node& node, const std::string& field) {
  const auto m = node.Mark();
  if (m.line < 0) return "field '" + field + "'";
  return "field '" + field + "' (line " + std::to_string(m.line + 1) + ")";
}

template <class T>
T read_scalar(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) throw ConfigError(where(node, field) + ": expected a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(where(node, field) + ": cannot parse '" + node.Scalar() + "'");
  }
}

inline std::vector<double> read_list(const YAML::Node& node, const std::string& field) {
  if (!node.IsSequence()) throw ConfigError(where(node, field) + ": expected a list");
  std::vector<double> out;
  for (const auto& v : node) out.push_back(read_scalar<double>(v, field));
  return out;
}

inline void check_keys(const YAML::Node& map, const std::vector<std::string>& allowed, const std::string& section) {
  if (!map.IsMap()) throw ConfigError(where(map, section) + ": expected a mapping");
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError(where(kv.first, section.empty() ? key : section + "." + key) + ": unknown key");
  }
}

inline void require_radii(const std::vector<double>& r, const YAML::Node& node, const std::string& field,
                          std::size_t min_count) {
  if (r.size() < min_count)
    throw ConfigError(where(node, field) + ": need at least " + std::to_string(min_count) + " radii");
  for (std::size_t i = 1; i < r.size(); ++i)
    if (!(r[i] > r[i - 1])) throw ConfigError(where(node, field) + ": radii must be strictly increasing");
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  RunConfig c;
  if (root.IsNull()) return c;
  detail::check_keys(root,
                     {"n", "tau", "family", "radii", "decay_radii", "hawking_radii", "orders", "per_direction",
                      "background_points", "suites", "seed", "workers", "output", "tolerances"},
                     "");
  using detail::read_scalar;
  using detail::where;
  if (auto v = root["n"]) {
    c.n = read_scalar<int>(v, "n");
    if (c.n < 3 || c.n > 5) throw ConfigError(where(v, "n") + ": supported dimensions are 3, 4, 5");
  }
  if (auto v = root["tau"]) c.tau = read_scalar<double>(v, "tau");
  if (auto f = root["family"]) {
    detail::check_keys(f, {"kind", "amplitude", "center", "width", "radial", "mask", "a"}, "family");
    if (!f["kind"]) throw ConfigError(where(f, "family") + ": missing 'kind'");
    c.family.kind = read_scalar<std::string>(f["kind"], "family.kind");
    if (c.family.kind != "conformal" && c.family.kind != "bump" && c.family.kind != "aniso")
      throw ConfigError(where(f["kind"], "family.kind") + ": expected conformal, bump or aniso");
    if (auto v = f["amplitude"]) c.family.amplitude = read_scalar<double>(v, "family.amplitude");
    if (auto v = f["center"]) c.family.center = read_scalar<double>(v, "family.center");
    if (auto v = f["width"]) c.family.width = read_scalar<double>(v, "family.width");
    if (auto v = f["radial"]) c.family.radial = read_scalar<double>(v, "family.radial");
    const char* mkey = c.family.kind == "bump" ? "mask" : "a";
    if (f[mkey]) {
      const auto m = f[mkey];
      if (!m.IsSequence()) throw ConfigError(where(m, std::string("family.") + mkey) + ": expected a matrix");
      for (const auto& row : m) c.family.matrix.push_back(detail::read_list(row, std::string("family.") + mkey));
    }
    const char* other = c.family.kind == "bump" ? "a" : "mask";
    if (f[other]) throw ConfigError(where(f[other], std::string("family.") + other) + ": not used by " + c.family.kind);
  }
  if (auto v = root["radii"]) {
    c.radii = detail::read_list(v, "radii");
    detail::require_radii(c.radii, v, "radii", 3);
  }
  if (auto v = root["decay_radii"]) {
    c.decay_radii = detail::read_list(v, "decay_radii");
    detail::require_radii(c.decay_radii, v, "decay_radii", 2);
  }
  if (auto v = root["hawking_radii"]) {
    c.hawking_radii = detail::read_list(v, "hawking_radii");
    detail::require_radii(c.hawking_radii, v, "hawking_radii", 1);
  }
  for (double R : c.radii)
    if (R < 2.0) throw ConfigError(where(root["radii"], "radii") + ": radii must be >= 2");
  for (double R : c.hawking_radii)
    if (R < 2.0) throw ConfigError(where(root["hawking_radii"], "hawking_radii") + ": radii must be >= 2");
  if (auto v = root["orders"]) {
    c.orders = read_scalar<int>(v, "orders");
    if (c.orders < 8) throw ConfigError(where(v, "orders") + ": orders must be >= 8");
  }
  if (auto v = root["per_direction"]) {
    c.per_direction = read_scalar<int>(v, "per_direction");
    if (c.per_direction < 1) throw ConfigError(where(v, "per_direction") + ": must be >= 1");
  }
  if (auto v = root["background_points"]) {
    c.background_points = read_scalar<int>(v, "background_points");
    if (c.background_points < 1) throw ConfigError(where(v, "background_points") + ": must be >= 1");
  }
  if (auto v = root["suites"]) {
    if (!v.IsSequence()) throw ConfigError(where(v, "suites") + ": expected a list");
    c.suites.clear();
    for (const auto& s : v) {
      const auto name = read_scalar<std::string>(s, "suites");
      const auto& all = suite_names();
      if (std::find(all.begin(), all.end(), name) == all.end())
        throw ConfigError(where(s, "suites") + ": unknown suite '" + name + "'");
      if (std::find(c.suites.begin(), c.suites.end(), name) == c.suites.end()) c.suites.push_back(name);
    }
  }
  if (auto v = root["seed"]) c.seed = read_scalar<std::uint64_t>(v, "seed");
  if (auto v = root["workers"]) {
    c.workers = read_scalar<int>(v, "workers");
    if (c.workers < 1) throw ConfigError(where(v, "workers") + ": must be >= 1");
  }
  if (auto v = root["output"]) c.output = read_scalar<std::string>(v, "output");
  if (auto t = root["tolerances"]) {
    detail::check_keys(t,
                       {"background_exact", "background_fd", "decay_rel", "slope_rel", "mass_agreement_rel",
                        "self_convergence_rel", "zero_integrand", "corner_vanish", "hawking_abs",
                        "boundary_relation", "trace_order", "curvature_fd", "area_rel"},
                       "tolerances");
    auto rd = [&](const char* key, double& dst) {
      if (auto v = t[key]) {
        dst = read_scalar<double>(v, std::string("tolerances.") + key);
        if (!(dst > 0.0)) throw ConfigError(where(v, std::string("tolerances.") + key) + ": must be positive");
      }
    };
    rd("background_exact", c.tol.background_exact);
    rd("background_fd", c.tol.background_fd);
    rd("decay_rel", c.tol.decay_rel);
    rd("slope_rel", c.tol.slope_rel);
    rd("mass_agreement_rel", c.tol.mass_agreement_rel);
    rd("self_convergence_rel", c.tol.self_convergence_rel);
    rd("zero_integrand", c.tol.zero_integrand);
    rd("corner_vanish", c.tol.corner_vanish);
    rd("hawking_abs", c.tol.hawking_abs);
    rd("boundary_relation", c.tol.boundary_relation);
    rd("trace_order", c.tol.trace_order);
    rd("curvature_fd", c.tol.curvature_fd);
    rd("area_rel", c.tol.area_rel);
  }

  if (!(c.tau > c.n / 2.0))
    throw ConfigError(where(root["tau"], "tau") + ": decay order must satisfy tau > n/2 (tau = " +
                      std::to_string(c.tau) + ", n = " + std::to_string(c.n) + ")");
  const auto& fm = c.family.matrix;
  if (c.family.kind != "conformal") {
    if (fm.size() != static_cast<std::size_t>(c.n))
      throw ConfigError(where(root["family"], "family") + ": matrix must be " + std::to_string(c.n) + "x" +
                        std::to_string(c.n));
    for (std::size_t i = 0; i < fm.size(); ++i) {
      if (fm[i].size() != fm.size()) throw ConfigError(where(root["family"], "family") + ": matrix must be square");
      for (std::size_t j = 0; j < i; ++j)
        if (fm[i][j] != fm[j][i]) throw ConfigError(where(root["family"], "family") + ": matrix must be symmetric");
    }
  }
  if (c.family.kind == "bump" && !(c.family.width > 0.0))
    throw ConfigError(where(root["family"], "family.width") + ": bump width must be positive");
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

template <int N>
FamilySpec<N> make_family(const FamilyConfig& fc) {
  auto to_mat = [&] {
    Mat<N> m{};
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) m[i][j] = fc.matrix.at(i).at(j);
    return m;
  };
  if (fc.kind == "conformal") return Conformal{fc.amplitude};
  if (fc.kind == "bump") return Bump<N>{fc.center, fc.width, fc.amplitude, to_mat()};
  return Aniso<N>{to_mat(), fc.radial};
}

// Construct the field, turning construction failures into ConfigError.
template <int N>
PerturbationField<N> make_field(const RunConfig& c) {
  try {
    return PerturbationField<N>(make_family<N>(c.family), c.tau);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("family: ") + e.what());
  }
}

}  // namespace hypmass

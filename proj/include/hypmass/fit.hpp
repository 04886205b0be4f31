#pragma once

// Log-linear decay fits and single-exponential extrapolation of radius sequences.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hypmass/errors.hpp"

namespace hypmass {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// Ordinary least squares y = intercept + slope * x.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DegenerateFitError("line fit needs >= 2 paired samples");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw DegenerateFitError("line fit: abscissae are all equal");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

// Slope of log|y| against x. Every sample must be finite and nonzero.
inline double fit_log_slope(std::span<const double> x, std::span<const double> y) {
  std::vector<double> ly;
  ly.reserve(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i]) || y[i] == 0.0)
      throw DegenerateFitError("log-slope fit: sample " + std::to_string(i) + " is zero or non-finite");
    ly.push_back(std::log(std::abs(y[i])));
  }
  return fit_line(x, ly).slope;
}

inline void require_increasing(std::span<const double> radii, const char* what) {
  if (radii.size() < 2) throw DegenerateFitError(std::string(what) + ": need at least 2 radii");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1]))
      throw DegenerateFitError(std::string(what) + ": radii must be strictly increasing");
}

struct Extrapolation {
  double limit = 0.0;
  // Fitted decay exponent kappa of |m(R) - limit| ~ c exp(-kappa R); empty when
  // the sequence is constant and no rate can be resolved.
  std::optional<double> exponent;
  double coefficient = 0.0;
  double uncertainty = 0.0;
  double rms_residual = 0.0;
};

namespace detail {

// Linear least squares for (limit, c) at fixed kappa; returns sum of squares.
inline double fit_at_rate(std::span<const double> R, std::span<const double> m, double kappa,
                          double& limit, double& c) {
  const std::size_t n = R.size();
  double s1 = 0, sx = 0, sxx = 0, sy = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::exp(-kappa * (R[i] - R[0]));
    s1 += 1;
    sx += x;
    sxx += x * x;
    sy += m[i];
    sxy += x * m[i];
  }
  const double det = s1 * sxx - sx * sx;
  if (!(std::abs(det) > 0.0)) {
    limit = sy / s1;
    c = 0.0;
  } else {
    limit = (sxx * sy - sx * sxy) / det;
    c = (s1 * sxy - sx * sy) / det;
  }
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = m[i] - limit - c * std::exp(-kappa * (R[i] - R[0]));
    ss += r * r;
  }
  return ss;
}

}  // namespace detail

// Least-squares fit m(R) = limit + c exp(-kappa R) by variable projection: the
// linear pair (limit, c) is solved exactly for each kappa and kappa is refined
// by golden-section search followed by Newton polishing on the sum of squares.
inline Extrapolation extrapolate(std::span<const double> R, std::span<const double> m) {
  if (R.size() != m.size()) throw DegenerateFitError("extrapolate: size mismatch");
  if (R.size() < 3) throw DegenerateFitError("extrapolate: need at least 3 radii");
  require_increasing(R, "extrapolate");
  for (double v : m)
    if (!std::isfinite(v)) throw DegenerateFitError("extrapolate: non-finite value");

  double scale = 0.0;
  for (double v : m) scale = std::max(scale, std::abs(v));
  double spread = 0.0;
  for (double v : m) spread = std::max(spread, std::abs(v - m.back()));
  Extrapolation out;
  if (spread <= 1e-14 * std::max(scale, 1e-300) || spread == 0.0) {
    out.limit = m.back();
    out.uncertainty = 0.0;
    return out;
  }

  // Successive differences must shrink geometrically for a decaying model.
  const std::size_t n = m.size();
  const double d_first = m[1] - m[0];
  const double d_last = m[n - 1] - m[n - 2];
  bool monotone = true;
  for (std::size_t i = 1; i + 1 < n; ++i) monotone = monotone && (m[i + 1] - m[i]) * d_first > 0.0;
  if (std::abs(d_last) >= std::abs(d_first) || !monotone)
    throw DegenerateFitError("extrapolate: sequence is not decaying toward a limit (first step " +
                             std::to_string(d_first) + ", last step " + std::to_string(d_last) + ")");

  const double span = R.back() - R.front();
  const double guess = -std::log(std::abs(d_last / d_first)) / ((R[n - 1] + R[n - 2] - R[1] - R[0]) / 2.0);
  double lo = std::max(1e-6, 0.05 * guess), hi = std::max(20.0 * guess, 60.0 / span);
  double lim = 0, c = 0;
  auto f = [&](double k) { return detail::fit_at_rate(R, m, k, lim, c); };
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-13 * std::max(1.0, b); ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    }
  }
  double kappa = 0.5 * (a + b);
  // Gauss-Newton polish on all three parameters.
  f(kappa);
  double L = lim, C = c;
  for (int it = 0; it < 50; ++it) {
    double JtJ[3][3] = {}, Jtr[3] = {};
    for (std::size_t i = 0; i < n; ++i) {
      const double x = R[i] - R[0];
      const double ex = std::exp(-kappa * x);
      const double res = m[i] - (L + C * ex);
      const double J[3] = {1.0, ex, -C * x * ex};
      for (int p = 0; p < 3; ++p) {
        Jtr[p] += J[p] * res;
        for (int q = 0; q < 3; ++q) JtJ[p][q] += J[p] * J[q];
      }
    }
    // Solve 3x3 by Cramer's rule.
    auto det3 = [](double M[3][3]) {
      return M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
             M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
             M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
    };
    const double D = det3(JtJ);
    if (!(std::abs(D) > 0.0)) break;
    double step[3];
    for (int p = 0; p < 3; ++p) {
      double M[3][3];
      for (int r = 0; r < 3; ++r)
        for (int q = 0; q < 3; ++q) M[r][q] = (q == p) ? Jtr[r] : JtJ[r][q];
      step[p] = det3(M) / D;
    }
    L += step[0];
    C += step[1];
    kappa += step[2];
    if (std::abs(step[2]) < 1e-15 * std::max(1.0, std::abs(kappa)) &&
        std::abs(step[0]) < 1e-15 * std::max(1.0, std::abs(L)))
      break;
  }
  if (!(kappa > 0.0) || !std::isfinite(kappa) || !std::isfinite(L))
    throw DegenerateFitError("extrapolate: fitted rate is not positive");

  out.limit = L;
  out.exponent = kappa;
  out.coefficient = C * std::exp(kappa * R[0]);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = m[i] - (L + C * std::exp(-kappa * (R[i] - R[0])));
    ss += r * r;
  }
  out.rms_residual = std::sqrt(ss / static_cast<double>(n));
  out.uncertainty = std::abs(m.back() - L);
  return out;
}

}  // namespace hypmass

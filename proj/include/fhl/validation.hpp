#pragma once

// Discrete Caputo derivative (L1 scheme), PDE residuals, the governing
// equation of the inverse-stable density, regularity fits and the Laplace
// transform check of the stable density.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fhl/convex.hpp"
#include "fhl/errors.hpp"
#include "fhl/fractional.hpp"
#include "fhl/geometry.hpp"
#include "fhl/quadrature.hpp"
#include "fhl/stablelaw.hpp"

namespace fhl {

/// Samples of a function of time on 0 = t_0 < t_1 < ... .
struct TimeSeries {
  std::vector<double> times;
  std::vector<double> values;

  void validate() const {
    if (times.size() != values.size()) throw ValidationError("time series lengths differ");
    if (times.size() < 3) throw ValidationError("time series needs at least 3 points");
    if (times.front() != 0.0) throw ValidationError("time series must start at t = 0");
    for (std::size_t k = 1; k < times.size(); ++k)
      if (!(times[k] > times[k - 1])) throw ValidationError("time series times must increase strictly");
  }
};

/// L1 scheme at times[k]: the series is interpolated linearly, so its
/// derivative is piecewise constant and each kernel integral is exact.
inline double caputo_derivative_discrete(const TimeSeries& s, FractionalOrder beta, std::size_t k) {
  s.validate();
  if (k < 1 || k >= s.times.size()) throw DomainError("caputo index must lie in [1, n)");
  const double b = 1.0 - beta.value();
  const double tk = s.times[k];
  double sum = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double h = s.times[j + 1] - s.times[j];
    const double slope = (s.values[j + 1] - s.values[j]) / h;
    sum += slope * (std::pow(tk - s.times[j], b) - std::pow(tk - s.times[j + 1], b));
  }
  return sum / std::tgamma(1.0 + b);
}

/// Times 0 < ... < t_end: uniform steps dt back from t_end while >= dt, then a
/// geometric sequence with ratio `ratio` down to `floor`, then 0.
inline std::vector<double> caputo_time_grid(double t_end, double dt, double ratio = 1.2, double floor = 1e-6) {
  if (!(t_end > 0.0) || !(dt > 0.0) || !(ratio > 1.0) || !(floor > 0.0))
    throw DomainError("caputo_time_grid needs positive t_end, dt, floor and ratio > 1");
  std::vector<double> t;
  const auto steps = static_cast<long>(std::floor(t_end / dt + 1e-9));
  for (long k = 0; k < steps; ++k) t.push_back(t_end - static_cast<double>(k) * dt);
  double v = t.empty() ? t_end : t.back();
  if (t.empty()) t.push_back(v);
  for (v /= ratio; v > floor; v /= ratio) t.push_back(v);
  t.push_back(0.0);
  std::reverse(t.begin(), t.end());
  return t;
}

enum class Verdict { Pass, Fail, Inconclusive };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

struct ResidualReport {
  std::vector<std::pair<Point, double>> probes;
  std::vector<double> residuals;
  std::vector<bool> excluded;  // kink probes, not part of the verdict
  double dx = 0.0;
  double dt = 0.0;
  double max_residual = 0.0;
  std::optional<double> tolerance;
  Verdict verdict = Verdict::Inconclusive;
};

/// Residual of D_t^beta u + H(Du) at each probe from a field on a lattice.
/// Probes must be lattice nodes with all axis neighbours in the field and a
/// time in field.times. Probes whose one-sided differences disagree by more
/// than 10 dx are excluded as kinks. With a tolerance the verdict compares
/// the largest residual with it; without one it stays inconclusive.
inline ResidualReport pde_residual(const SolutionField& f, const HamiltonianSpec& h, FractionalOrder beta,
                                   const std::vector<std::pair<Point, double>>& probes,
                                   std::optional<double> tolerance = std::nullopt) {
  if (f.initial.size() != f.points.size()) throw ValidationError("field lacks initial values");
  const double dx = f.grid.dx;
  auto locate_point = [&](const Point& x) -> std::size_t {
    for (std::size_t i = 0; i < f.points.size(); ++i)
      if (distance(f.points[i], x) < 1e-9 * std::max(1.0, dx)) return i;
    throw DomainError("probe point is not a field point");
  };
  auto locate_time = [&](double t) -> std::size_t {
    for (std::size_t j = 0; j < f.times.size(); ++j)
      if (std::abs(f.times[j] - t) <= 1e-12 * std::max(1.0, t)) return j;
    throw DomainError("probe time is not a field time");
  };

  ResidualReport rep;
  rep.probes = probes;
  rep.dx = dx;
  rep.tolerance = tolerance;
  TimeSeries series;
  series.times.push_back(0.0);
  for (double t : f.times) series.times.push_back(t);
  for (std::size_t k = 1; k < series.times.size(); ++k)
    rep.dt = std::max(rep.dt, series.times[k] - series.times[k - 1]);

  bool any = false;
  for (const auto& [x, t] : probes) {
    const std::size_t i = locate_point(x);
    const std::size_t j = locate_time(t);
    series.values.assign(1, f.initial[i]);
    for (std::size_t m = 0; m < f.times.size(); ++m) series.values.push_back(f.at(i, m));
    const double caputo = caputo_derivative_discrete(series, beta, j + 1);

    Point grad = Point::of(0.0, 0.0);
    grad.dim = f.grid.dimension;
    bool kink = false;
    for (int a = 0; a < f.grid.dimension; ++a) {
      Point xp = x, xm = x;
      xp[a] += dx;
      xm[a] -= dx;
      const double up = f.at(locate_point(xp), j), um = f.at(locate_point(xm), j), u0 = f.at(i, j);
      const double dplus = (up - u0) / dx, dminus = (u0 - um) / dx;
      if (std::abs(dplus - dminus) > 10.0 * dx) kink = true;
      grad[a] = 0.5 * (dplus + dminus);
    }
    const double r = caputo + h(grad);
    rep.residuals.push_back(r);
    rep.excluded.push_back(kink);
    if (!kink) {
      any = true;
      rep.max_residual = std::max(rep.max_residual, std::abs(r));
    }
  }
  if (!any) rep.verdict = Verdict::Inconclusive;
  else if (tolerance) rep.verdict = rep.max_residual <= *tolerance ? Verdict::Pass : Verdict::Fail;
  return rep;
}

/// Fit of tol(dx, dt) = C1 dx + C2 dt^(2 - beta) through a coarse/fine pair,
/// and the refinement verdict: the fine maximum must be at least `factor`
/// times smaller than the coarse one.
struct RefinementReport {
  double coarse_max = 0.0;
  double fine_max = 0.0;
  double ratio = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double factor = 1.5;
  Verdict verdict = Verdict::Inconclusive;

  double tolerance(double dx, double dt, FractionalOrder beta) const {
    return c1 * dx + c2 * std::pow(dt, 2.0 - beta.value());
  }
};

inline RefinementReport refinement_check(const ResidualReport& coarse, const ResidualReport& fine,
                                         FractionalOrder beta, double factor = 1.5) {
  RefinementReport r;
  r.factor = factor;
  r.coarse_max = coarse.max_residual;
  r.fine_max = fine.max_residual;
  const bool coarse_any = std::count(coarse.excluded.begin(), coarse.excluded.end(), false) > 0;
  const bool fine_any = std::count(fine.excluded.begin(), fine.excluded.end(), false) > 0;
  if (!coarse_any || !fine_any) return r;
  r.ratio = r.fine_max > 0.0 ? r.coarse_max / r.fine_max : kInfinity;
  const double g = 2.0 - beta.value();
  const double a11 = coarse.dx, a12 = std::pow(coarse.dt, g), a21 = fine.dx, a22 = std::pow(fine.dt, g);
  const double det = a11 * a22 - a12 * a21;
  if (std::abs(det) > 1e-300) {
    r.c1 = (r.coarse_max * a22 - a12 * r.fine_max) / det;
    r.c2 = (a11 * r.fine_max - a21 * r.coarse_max) / det;
  }
  if (r.c1 < 0.0 || r.c2 < 0.0 || std::abs(det) <= 1e-300) {
    // One term alone: keep whichever reproduces the coarse level.
    r.c1 = std::max(0.0, r.c1);
    r.c2 = std::max(0.0, r.c2);
    if (r.c1 == 0.0 && a12 > 0.0) r.c2 = r.coarse_max / a12;
    else if (r.c2 == 0.0 && a11 > 0.0) r.c1 = r.coarse_max / a11;
  }
  r.verdict = (r.coarse_max == 0.0 && r.fine_max == 0.0) || r.ratio >= factor ? Verdict::Pass : Verdict::Fail;
  return r;
}

struct DensitySpacings {
  double dr = 0.02;
  double dt = 0.02;
};

/// Residual of D_t^beta E + d_r E on the lattice r_window x t_window, with
/// the time derivative taken from t = 0 where E(r, 0) = 0 for r > 0.
inline ResidualReport check_density_equation(FractionalOrder beta, Interval r_window, Interval t_window,
                                             DensitySpacings sp, const StablePdfConfig& cfg = {}) {
  if (!(r_window.lo > 0.0) || !(t_window.lo > 0.0) || !(r_window.hi >= r_window.lo) || !(t_window.hi >= t_window.lo))
    throw DomainError("density windows must be positive and ordered");
  if (!(sp.dr > 0.0) || !(sp.dt > 0.0)) throw DomainError("spacings must be positive");
  if (r_window.lo - sp.dr <= 0.0) throw DomainError("r window too close to 0 for the spacing");
  const auto nt = static_cast<std::size_t>(std::llround(t_window.hi / sp.dt));
  const auto t0 = static_cast<std::size_t>(std::ceil(t_window.lo / sp.dt - 1e-9));
  const auto nr = static_cast<std::size_t>(std::floor((r_window.hi - r_window.lo) / sp.dr + 1e-9)) + 1;

  ResidualReport rep;
  rep.dx = sp.dr;
  rep.dt = sp.dt;
  TimeSeries series;
  for (std::size_t k = 0; k <= nt; ++k) series.times.push_back(static_cast<double>(k) * sp.dt);
  for (std::size_t m = 0; m < nr; ++m) {
    const double r = r_window.lo + static_cast<double>(m) * sp.dr;
    series.values.assign(1, 0.0);
    for (std::size_t k = 1; k <= nt; ++k) series.values.push_back(inverse_stable_pdf(r, series.times[k], beta, cfg));
    for (std::size_t k = t0; k <= nt; ++k) {
      const double t = series.times[k];
      if (t < t_window.lo - 1e-12 || t > t_window.hi + 1e-12) continue;
      const double caputo = caputo_derivative_discrete(series, beta, k);
      const double dr = (inverse_stable_pdf(r + sp.dr, t, beta, cfg) - inverse_stable_pdf(r - sp.dr, t, beta, cfg)) /
                        (2.0 * sp.dr);
      const double res = caputo + dr;
      rep.probes.emplace_back(Point::of(r), t);
      rep.residuals.push_back(res);
      rep.excluded.push_back(false);
      rep.max_residual = std::max(rep.max_residual, std::abs(res));
    }
  }
  return rep;
}

/// Linear least-squares fit y = a + b x.
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("line fit needs at least two points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sx += x[i], sy += y[i], sxx += x[i] * x[i], sxy += x[i] * y[i];
  const double den = n * sxx - sx * sx;
  if (!(std::abs(den) > 0.0)) throw ValidationError("line fit abscissae coincide");
  LineFit f;
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

struct ExponentEstimate {
  double constant = 0.0;
  double exponent = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  std::vector<double> abscissae;
  std::vector<double> sups;
};

struct RegularityReport {
  double lipschitz_observed = 0.0;
  double lipschitz_bound = 0.0;
  Verdict lipschitz = Verdict::Inconclusive;
  ExponentEstimate initial;    // sup_x |u(x, t) - g(x)| ~ C t^beta
  ExponentEstimate increments; // sup_x |u(x, t') - u(x, t)| ~ C (t' - t)^beta
  double exponent_window = 0.05;
};

namespace detail {

inline ExponentEstimate fit_power(std::vector<double> h, std::vector<double> sups, double beta, double window) {
  ExponentEstimate e;
  e.abscissae = h;
  e.sups = sups;
  const double biggest = *std::max_element(sups.begin(), sups.end());
  if (biggest == 0.0) {
    e.verdict = Verdict::Pass;
    return e;
  }
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < h.size(); ++k)
    if (sups[k] > 0.0) lx.push_back(std::log(h[k])), ly.push_back(std::log(sups[k]));
  // Equal spacings (uniform time slices) leave the exponent undetermined.
  const auto [lo, hi] = std::minmax_element(lx.begin(), lx.end());
  if (lx.size() < 2 || *hi - *lo < 1e-6) return e;
  const auto f = fit_line(lx, ly);
  e.exponent = f.slope;
  e.constant = std::exp(f.intercept);
  e.verdict = std::abs(f.slope - beta) <= window ? Verdict::Pass : Verdict::Fail;
  return e;
}

}  // namespace detail

/// Lipschitz bound in x, the C t^beta estimate of |u - g| and the C (t' - t)^beta
/// estimate of time increments, from a fractional field on a lattice.
inline RegularityReport check_regularity(const SolutionField& f, const InitialDatum& g, double tolerance = 1e-6,
                                         double window = 0.05) {
  if (!f.beta) throw ValidationError("regularity check needs a fractional field");
  if (f.times.size() < 4) throw ValidationError("regularity check needs at least 4 time slices");
  const double beta = f.beta->value();
  RegularityReport rep;
  rep.exponent_window = window;
  rep.lipschitz_bound = g.lipschitz_constant() * (1.0 + 1e-6) + tolerance;
  const std::size_t nt = f.times.size();
  const double dx = f.grid.dx;
  auto pair = [&](std::size_t i, std::size_t k) {
    const double d = distance(f.points[i], f.points[k]);
    for (std::size_t j = 0; j < nt; ++j) {
      const double q = std::abs(f.at(i, j) - f.at(k, j)) / d;
      if (std::isfinite(q)) rep.lipschitz_observed = std::max(rep.lipschitz_observed, q);
    }
  };
  if (f.points.size() == f.grid.size()) {
    const std::size_t nx = f.grid.nodes(0);
    for (std::size_t i = 0; i < f.points.size(); ++i) {
      if ((i + 1) % nx != 0) pair(i, i + 1);
      if (f.grid.dimension == 2 && i + nx < f.points.size()) pair(i, i + nx);
    }
  } else {
    for (std::size_t i = 0; i < f.points.size(); ++i)
      for (std::size_t k = i + 1; k < f.points.size(); ++k)
        if (std::abs(distance(f.points[i], f.points[k]) - dx) <= 1e-9 * dx) pair(i, k);
  }
  rep.lipschitz = rep.lipschitz_observed <= rep.lipschitz_bound ? Verdict::Pass : Verdict::Fail;

  std::vector<double> sup0(nt, 0.0), supd(nt - 1, 0.0), gaps(nt - 1);
  for (std::size_t j = 0; j < nt; ++j)
    for (std::size_t i = 0; i < f.points.size(); ++i) {
      const double v = std::abs(f.at(i, j) - f.initial[i]);
      if (std::isfinite(v)) sup0[j] = std::max(sup0[j], v);
      if (j + 1 < nt) {
        const double w = std::abs(f.at(i, j + 1) - f.at(i, j));
        if (std::isfinite(w)) supd[j] = std::max(supd[j], w);
      }
    }
  for (std::size_t j = 0; j + 1 < nt; ++j) gaps[j] = f.times[j + 1] - f.times[j];
  rep.initial = detail::fit_power(f.times, sup0, beta, window);
  rep.increments = detail::fit_power(gaps, supd, beta, window);
  return rep;
}

/// max over s of | int_0^inf e^(-s x) g_beta(x) dx - e^(-s^beta) |.
inline double laplace_check(FractionalOrder beta, const std::vector<double>& s_values, const StablePdfConfig& cfg = {}) {
  double worst = 0.0;
  for (double s : s_values) {
    if (!(s > 0.0)) throw DomainError("laplace_check needs positive s");
    // x = e^w; the density vanishes faster than any power as x -> 0.
    auto f = [&](double w) {
      const double x = std::exp(w);
      const double damp = s * x;
      if (damp > 745.0) return 0.0;
      return std::exp(-damp) * stable_pdf(x, beta, cfg) * x;
    };
    const double lo = -40.0, hi = std::log(60.0 / s);
    const auto est = quad::integrate(f, lo, hi, 1e-11, 1e-13, 64, 4000);
    if (!est.converged) throw AccuracyError("Laplace quadrature did not converge", est.error);
    worst = std::max(worst, std::abs(est.value - std::exp(-std::pow(s, beta.value()))));
  }
  return worst;
}

}  // namespace fhl

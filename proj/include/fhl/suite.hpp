#pragma once

// The validation suite: one function per quantitative claim, each returning a
// pass/fail result with the numbers behind it.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fhl/fractional.hpp"
#include "fhl/front2d.hpp"
#include "fhl/hopflax.hpp"
#include "fhl/io.hpp"
#include "fhl/stablelaw.hpp"
#include "fhl/validation.hpp"

namespace fhl {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string summary;
  Json detail = Json::object();
};

struct SuiteOptions {
  /// Overrides the per-check exponent sets when non-empty.
  std::vector<double> betas;
  std::size_t moment_paths = 100000;
  std::size_t crossval_paths = 2000;
  std::size_t crossval_probes = 20;
  std::size_t dpp_paths = 10000;
  std::uint64_t seed = 20240917;
  unsigned workers = 1;

  std::vector<double> betas_or(std::vector<double> fallback) const { return betas.empty() ? fallback : betas; }
};

namespace detail {

inline std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

inline double levy_density(double x) {
  return std::pow(x, -1.5) * std::exp(-1.0 / (4.0 * x)) / (2.0 * std::sqrt(std::numbers::pi));
}

}  // namespace detail

/// Laplace identity for the stable density and the beta = 1/2 closed form.
inline CheckResult check_stable_law(const SuiteOptions& o = {}) {
  CheckResult r;
  r.name = "stable-law";
  double worst_laplace = 0.0;
  Json lap = Json::object();
  for (double b : o.betas_or({0.4, 0.5, 0.6, 0.8})) {
    const double d = laplace_check(FractionalOrder(b), {0.5, 1.0, 2.0});
    lap[detail::fmt(b)] = d;
    worst_laplace = std::max(worst_laplace, d);
  }
  double worst_levy = 0.0;
  for (int k = 0; k <= 400; ++k) {
    const double x = 0.05 * std::pow(400.0, k / 400.0);
    worst_levy = std::max(worst_levy, std::abs(stable_pdf(x, FractionalOrder(0.5)) - detail::levy_density(x)));
  }
  r.passed = worst_laplace < 1e-6 && worst_levy < 1e-8;
  r.summary = "max Laplace deviation " + detail::fmt(worst_laplace) + " (< 1e-6), max Levy deviation " +
              detail::fmt(worst_levy) + " (< 1e-8)";
  r.detail = {{"laplace", lap}, {"levy_max_abs", worst_levy}};
  return r;
}

/// Unit mass of E_beta(., t) after adaptive truncation and self-similarity.
inline CheckResult check_inverse_density(const SuiteOptions& o = {}) {
  CheckResult r;
  r.name = "inverse-stable-density";
  const StablePdfConfig cfg;
  QuadratureConfig q;
  q.workers = o.workers;
  double worst_mass = 0.0, worst_self = 0.0;
  bool ok = true;
  Json rows = Json::array();
  for (double b : o.betas_or({0.4, 0.5, 0.6, 0.8})) {
    const FractionalOrder beta(b);
    for (double t : {0.5, 1.0, 2.0}) {
      try {
        const auto g = density_for(beta, {t}, q, cfg);
        const double dev = std::abs(g.midpoint_mass(0) - 1.0);
        worst_mass = std::max(worst_mass, dev);
        rows.push_back({{"beta", b}, {"t", t}, {"M", g.truncation_M}, {"mass_deviation", dev}, {"tail", g.tail_mass[0]}});
      } catch (const AccuracyError& e) {
        ok = false;
        worst_mass = std::max(worst_mass, e.residual());
        rows.push_back({{"beta", b}, {"t", t}, {"error", e.what()}});
      }
      for (double rr : {0.1, 0.5, 1.0, 2.0, 4.0}) {
        const double lhs = inverse_stable_pdf(rr, t, beta, cfg);
        const double s = std::pow(t, -b);
        const double rhs = s * inverse_stable_pdf(rr * s, 1.0, beta, cfg);
        worst_self = std::max(worst_self, std::abs(lhs - rhs));
      }
    }
  }
  r.passed = ok && worst_mass <= cfg.tail_epsilon && worst_self <= 1e-8;
  r.summary = "max |mass - 1| " + detail::fmt(worst_mass) + " (<= 1e-6), max self-similarity gap " +
              detail::fmt(worst_self) + " (<= 1e-8)";
  r.detail = {{"columns", rows}, {"self_similarity_max_abs", worst_self}};
  return r;
}

struct MomentRow {
  double alpha = 0.0, beta = 0.0, t = 0.0;
  double analytic = 0.0, mc_mean = 0.0, mc_std_error = 0.0, z = 0.0;
  double tau_step = 0.0;
};

/// E[E_t^alpha] by Monte Carlo against C(alpha, beta) t^(alpha beta). One walk
/// per path serves every t; tau_step defaults to 1e-3 E[E_t] at the largest t.
inline std::vector<MomentRow> moment_table(const std::vector<double>& alphas, const std::vector<double>& betas,
                                           std::vector<double> times, const MonteCarloConfig& mc) {
  mc.validate();
  if (alphas.empty() || betas.empty() || times.empty()) throw ValidationError("moment table needs alphas, betas and times");
  for (double a : alphas)
    if (!(a > 0.0)) throw ValidationError("moment orders must be positive");
  std::sort(times.begin(), times.end());
  if (!(times.front() > 0.0)) throw ValidationError("moment times must be positive");
  std::vector<MomentRow> rows;
  const std::size_t na = alphas.size(), nt = times.size();
  for (double b : betas) {
    const FractionalOrder beta(b);
    const double tau = resolve_tau_step(mc, beta, times.back());
    const std::size_t blocks = (mc.n_paths + mc.block_size - 1) / mc.block_size;
    std::vector<std::vector<RunningStats>> stats(blocks, std::vector<RunningStats>(na * nt));
    parallel_for(blocks, mc.workers, [&](std::size_t blk) {
      Rng rng = derived_stream(mc.seed, blk);
      const std::size_t count = std::min(mc.block_size, mc.n_paths - blk * mc.block_size);
      for (std::size_t k = 0; k < count; ++k) {
        const auto e = sample_first_passages(times, beta, tau, rng);
        for (std::size_t a = 0; a < na; ++a)
          for (std::size_t j = 0; j < nt; ++j) stats[blk][a * nt + j].push(std::pow(e[j], alphas[a]));
      }
    });
    for (std::size_t a = 0; a < na; ++a)
      for (std::size_t j = 0; j < nt; ++j) {
        RunningStats s;
        for (const auto& blk : stats) s.merge(blk[a * nt + j]);
        MomentRow row{alphas[a], b, times[j]};
        row.analytic = moment(alphas[a], beta, times[j]);
        row.mc_mean = s.mean;
        row.mc_std_error = s.std_error();
        row.z = std::abs(s.mean - row.analytic) / row.mc_std_error;
        row.tau_step = tau;
        rows.push_back(row);
      }
  }
  return rows;
}

inline Json to_json(const MomentRow& r) {
  return {{"alpha", r.alpha}, {"beta", r.beta}, {"t", r.t}, {"analytic", r.analytic}, {"mc_mean", r.mc_mean},
          {"mc_std_error", r.mc_std_error}, {"z", number(r.z)}, {"tau_step", r.tau_step}};
}

/// C(alpha, beta) t^(alpha beta) against Monte Carlo first passages.
inline CheckResult check_moments(const SuiteOptions& o = {}) {
  CheckResult r;
  r.name = "moment-law";
  MonteCarloConfig mc;
  mc.n_paths = o.moment_paths;
  mc.seed = o.seed;
  mc.workers = o.workers;
  const auto table = moment_table({1.0, 2.0}, o.betas_or({0.4, 0.5, 0.8}), {0.5, 1.0, 2.0}, mc);
  double worst_z = 0.0;
  Json rows = Json::array();
  for (const auto& row : table) {
    worst_z = std::max(worst_z, row.z);
    rows.push_back(to_json(row));
  }
  r.passed = worst_z <= 3.0;
  r.summary = "max |MC - analytic| / stderr = " + detail::fmt(worst_z) + " (<= 3) over " +
              std::to_string(rows.size()) + " cases, " + std::to_string(o.moment_paths) + " paths";
  r.detail = {{"rows", rows}};
  return r;
}

namespace detail {

/// Number of sign changes of d, treating |d| <= tol as zero; a zero at the
/// end reached from a nonzero sign counts as a crossing.
inline int count_crossings(const std::vector<double>& d, double tol) {
  int crossings = 0, sign = 0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    const int s = d[k] > tol ? 1 : (d[k] < -tol ? -1 : 0);
    if (s != 0) {
      if (sign != 0 && s != sign) ++crossings;
      sign = s;
    } else if (k + 1 == d.size() && sign != 0) {
      ++crossings;
    }
  }
  return crossings;
}

}  // namespace detail

/// u_beta(0, t) = -C(2, beta) t^(2 beta) and one crossing of -t^2 on (0, 2].
inline CheckResult check_test1(const SuiteOptions& o = {}) {
  CheckResult r;
  r.name = "test1";
  const auto p = make_problem(Preset::Test1);
  QuadratureConfig q;
  q.workers = o.workers;
  bool ok = true;
  double worst_rel = 0.0;
  Json per_beta = Json::array();
  std::vector<std::string> notes;
  for (double b : o.betas_or({0.4, 0.5, 0.6, 0.8})) {
    const FractionalOrder beta(b);
    std::vector<double> diff;
    double rel = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double t = 0.1 * k;
      const auto dens = density_for(beta, {t}, q, {});
      const double v = problem_quadrature(p, Point::of(0.0), dens, 0);
      const double exact = -moment(2.0, beta, t);
      rel = std::max(rel, std::abs(v - exact) / std::abs(exact));
      diff.push_back(v - (-t * t));
    }
    const int crossings = detail::count_crossings(diff, 1e-6);
    const double t_star = std::pow(moment_constant(2.0, beta), 1.0 / (2.0 - 2.0 * b));
    const bool early_faster = diff.front() < 0.0;
    worst_rel = std::max(worst_rel, rel);
    const bool pass = rel <= 0.01 && crossings == 1 && early_faster;
    ok = ok && pass;
    if (!pass)
      notes.push_back("beta=" + detail::fmt(b) + ": " + std::to_string(crossings) + " crossings (analytic t*=" +
                      detail::fmt(t_star) + ")");
    per_beta.push_back({{"beta", b}, {"max_rel_error", rel}, {"crossings", crossings}, {"analytic_crossing", t_star},
                        {"faster_at_small_t", early_faster}});
  }
  r.passed = ok;
  r.summary = "max rel error " + detail::fmt(worst_rel) + " (<= 1%)";
  for (const auto& n : notes) r.summary += "; " + n;
  r.detail = {{"per_beta", per_beta}};
  return r;
}

/// Classical Test-2 solver, u_beta <= u, support inclusion and kink smoothing.
inline CheckResult check_test2(const SuiteOptions& o = {}) {
  CheckResult r;
  r.name = "test2";
  const auto p = make_problem(Preset::Test2);
  SpaceTimeGrid grid = p.box;
  grid.times = {0.005, 0.5, 1.0, 2.0};
  SolveOptions copt;
  copt.method = Method::Classical;
  copt.quadrature.workers = o.workers;
  const auto cl = solve_field(p, grid, copt);
  double worst_classical = 0.0, worst_exact = 0.0;
  for (std::size_t i = 0; i < cl.points.size(); ++i)
    for (std::size_t j = 0; j < cl.times.size(); ++j) {
      worst_classical = std::max(worst_classical, std::abs(cl.at(i, j) - test2_quoted_formula(cl.points[i], cl.times[j])));
      worst_exact = std::max(worst_exact,
                             std::abs(cl.at(i, j) - classical_reference(ClassicalTest::Test2, cl.points[i], cl.times[j])));
    }

  const double tol = 1e-6;
  bool dominated = true, support = true, smooth = true;
  double worst_excess = 0.0, worst_jump_ratio = 0.0;
  Json per_beta = Json::array();
  for (double b : o.betas_or({0.5})) {
    SolveOptions qopt;
    qopt.method = Method::Quadrature;
    qopt.beta = FractionalOrder(b);
    qopt.quadrature.workers = o.workers;
    SpaceTimeGrid g2 = p.box;
    g2.times = {0.005, 0.5};
    const auto fr = solve_field(p, g2, qopt);
    double excess = 0.0;
    std::size_t support_misses = 0;
    for (std::size_t i = 0; i < fr.points.size(); ++i)
      for (std::size_t j = 0; j < fr.times.size(); ++j) {
        const double u = classical_reference(ClassicalTest::Test2, fr.points[i], fr.times[j]);
        excess = std::max(excess, fr.at(i, j) - u);
        if (u > 0.0 && !(fr.at(i, j) > 0.0)) ++support_misses;
      }
    auto max_jump = [&](auto&& value) {
      double jump = 0.0;
      for (std::size_t i = 1; i + 1 < fr.points.size(); ++i) {
        const double dx = fr.grid.dx;
        jump = std::max(jump, std::abs((value(i + 1) - value(i)) / dx - (value(i) - value(i - 1)) / dx));
      }
      return jump;
    };
    const double jump_frac = max_jump([&](std::size_t i) { return fr.at(i, 0); });
    const double jump_cl = max_jump([&](std::size_t i) { return classical_reference(ClassicalTest::Test2, fr.points[i], 0.005); });
    const double ratio = jump_frac / jump_cl;
    dominated = dominated && excess <= tol;
    support = support && support_misses == 0;
    smooth = smooth && ratio < 0.25;
    worst_excess = std::max(worst_excess, excess);
    worst_jump_ratio = std::max(worst_jump_ratio, ratio);
    per_beta.push_back({{"beta", b}, {"max_excess_over_classical", excess}, {"support_misses", support_misses},
                        {"jump_fractional", jump_frac}, {"jump_classical", jump_cl}, {"jump_ratio", ratio}});
  }
  r.passed = worst_classical <= 1e-6 && dominated && support && smooth;
  r.summary = "classical vs max{0, x^2/(1+2t) - 1} max error " + detail::fmt(worst_classical) +
              " (<= 1e-6; exact Hopf-Lax solution " + detail::fmt(worst_exact) + "), max(u_beta - u) " +
              detail::fmt(worst_excess) + " (<= 1e-6), support " + (support ? "ok" : "violated") +
              ", kink jump ratio " + detail::fmt(worst_jump_ratio) + " (< 0.25)";
  r.detail = {{"classical_vs_quoted_formula_max_abs", worst_classical},
              {"classical_vs_exact_max_abs", worst_exact},
              {"per_beta", per_beta}};
  return r;
}

/// Quadrature against Monte Carlo at random probes of each preset.
inline CheckResult check_crossval(const SuiteOptions& o = {}) {
  CheckResult r;
  r.name = "estimator-agreement";
  bool ok = true;
  Json rows = Json::array();
  std::size_t failures = 0, total = 0;
  double worst = 0.0;
  for (auto preset : {Preset::Test1, Preset::Test2, Preset::Test3Circle, Preset::Test3TwoCircles}) {
    const auto p = make_problem(preset);
    std::mt19937_64 rng(o.seed + static_cast<std::uint64_t>(preset));
    std::uniform_real_distribution<double> ux(-3.0, 3.0), ut(0.1, 2.0);
    for (double b : o.betas_or({0.5})) {
      const FractionalOrder beta(b);
      for (std::size_t k = 0; k < o.crossval_probes; ++k) {
        Point x = p.dimension() == 1 ? Point::of(ux(rng)) : Point::of(ux(rng), ux(rng));
        const double t = ut(rng);
        QuadratureConfig q;
        q.workers = o.workers;
        const auto dens = density_for(beta, {t}, q, {});
        const double quad = problem_quadrature(p, x, dens, 0);
        MonteCarloConfig mc;
        mc.n_paths = o.crossval_paths;
        mc.seed = o.seed + 1000 * total;
        mc.workers = o.workers;
        const auto est = frac_hopf_lax_mc(p.datum, p.lagrangian, x, t, beta, mc, p.box);
        const double allowed = std::max(0.01 * std::abs(quad), 3.0 * est.std_error);
        const double gap = std::abs(quad - est.mean);
        const bool pass = gap <= allowed && est.contaminated == 0;
        if (!pass) ++failures;
        ok = ok && pass;
        worst = std::max(worst, allowed > 0.0 ? gap / allowed : (gap > 0.0 ? kInfinity : 0.0));
        ++total;
        rows.push_back({{"preset", to_string(preset)}, {"beta", b}, {"x", to_json(x)}, {"t", t}, {"quadrature", quad},
                        {"mc_mean", est.mean}, {"mc_std_error", est.std_error}, {"allowed", allowed},
                        {"contaminated", est.contaminated}, {"pass", pass}});
      }
    }
  }
  r.passed = ok;
  r.summary = std::to_string(total - failures) + "/" + std::to_string(total) +
              " probes within max(1%, 3 stderr); worst gap/allowed " + detail::fmt(worst);
  r.detail = {{"probes", rows}};
  return r;
}

/// Dynamic programming identity on Test 2 with joint (E_s, E_t) paths.
inline CheckResult check_dpp(const SuiteOptions& o = {}) {
  CheckResult r;
  r.name = "dynamic-programming";
  const auto p = make_problem(Preset::Test2);
  struct Probe {
    double x, t, s;
  };
  bool ok = true;
  Json rows = Json::array();
  std::vector<std::string> notes;
  for (double b : o.betas_or({0.5})) {
    for (const auto& pr : {Probe{2, 1, 0.5}, Probe{0, 1, 0.25}, Probe{1, 2, 1}}) {
      MonteCarloConfig mc;
      mc.n_paths = o.dpp_paths;
      mc.seed = o.seed;
      mc.workers = o.workers;
      QuadratureConfig q;
      q.workers = o.workers;
      const auto d = dpp_check(p, Point::of(pr.x), pr.t, pr.s, FractionalOrder(b), mc, q);
      const double gap = std::abs(d.lhs - d.rhs);
      const bool pass = gap <= 3.0 * d.rhs_std_error;
      ok = ok && pass;
      if (!pass)
        notes.push_back("(" + detail::fmt(pr.x) + "," + detail::fmt(pr.t) + "," + detail::fmt(pr.s) + ") beta=" +
                        detail::fmt(b) + ": lhs " + detail::fmt(d.lhs) + " rhs " + detail::fmt(d.rhs) + " +- " +
                        detail::fmt(d.rhs_std_error) + "; pathwise rhs " + detail::fmt(d.rhs_pathwise) + " +- " +
                        detail::fmt(d.rhs_pathwise_std_error));
      Json row = to_json(d);
      row["x"] = pr.x, row["t"] = pr.t, row["s"] = pr.s, row["beta"] = b, row["pass"] = pass;
      rows.push_back(row);
    }
  }
  r.passed = ok;
  r.summary = ok ? "all probes within 3 stderr" : "outside 3 stderr at";
  for (const auto& n : notes) r.summary += " " + n;
  r.detail = {{"probes", rows}};
  return r;
}

/// Lipschitz bound and fitted C t^beta exponent on Test-2 fields.
inline CheckResult check_regularity_suite(const SuiteOptions& o = {}) {
  CheckResult r;
  r.name = "regularity";
  const auto p = make_problem(Preset::Test2);
  bool ok = true;
  Json rows = Json::array();
  std::string notes;
  for (double b : o.betas_or({0.4, 0.5, 0.8})) {
    SolveOptions opt;
    opt.method = Method::Quadrature;
    opt.beta = FractionalOrder(b);
    opt.quadrature.workers = o.workers;
    SpaceTimeGrid grid = p.box;
    // The bound is a small-time statement; by t ~ 1e-2 the box-edge values of
    // |u_beta - g| already bend away from t^beta.
    grid.times = {1e-6, 1e-5, 1e-4, 1e-3};
    const auto f = solve_field(p, grid, opt);
    const auto rep = check_regularity(f, p.datum);
    const bool pass = rep.lipschitz == Verdict::Pass && rep.initial.verdict == Verdict::Pass;
    ok = ok && pass;
    notes += " beta=" + detail::fmt(b) + ": Lipschitz " + detail::fmt(rep.lipschitz_observed) + "/" +
             detail::fmt(rep.lipschitz_bound) + ", exponent " + detail::fmt(rep.initial.exponent, 3) + ";";
    Json row = to_json(rep);
    row["beta"] = b;
    rows.push_back(row);
  }
  r.passed = ok;
  r.summary = "exponent window +-0.05:" + notes;
  r.detail = {{"per_beta", rows}};
  return r;
}

/// Refinement of the Test-1 PDE residual and of the density equation residual.
inline CheckResult check_residuals(const SuiteOptions& o = {}) {
  CheckResult r;
  r.name = "pde-residual";
  const auto p = make_problem(Preset::Test1);
  bool ok = true;
  Json rows = Json::array();
  std::string notes;
  for (double b : o.betas_or({0.5})) {
    const FractionalOrder beta(b);
    std::vector<ResidualReport> reps;
    for (double h : {0.1, 0.05}) {
      auto times = caputo_time_grid(1.0, h);
      times.erase(times.begin());
      std::vector<Point> pts;
      std::vector<std::pair<Point, double>> probes;
      for (double x : {0.5, 1.0, 1.5}) {
        for (int k = -1; k <= 1; ++k) pts.push_back(Point::of(x + k * h));
        probes.emplace_back(Point::of(x), 1.0);
      }
      SolveOptions opt;
      opt.method = Method::Quadrature;
      opt.beta = beta;
      opt.quadrature.n_intervals = 2000;
      opt.quadrature.workers = o.workers;
      auto f = solve_points(p, pts, times, opt);
      f.grid.dx = h;
      reps.push_back(pde_residual(f, p.hamiltonian, beta, probes));
    }
    const auto pde = refinement_check(reps[0], reps[1], beta);
    const auto dc = check_density_equation(beta, {0.5, 2.0}, {0.5, 2.0}, {0.02, 0.02});
    const auto df = check_density_equation(beta, {0.5, 2.0}, {0.5, 2.0}, {0.01, 0.01});
    const auto dens = refinement_check(dc, df, beta);
    const bool pass = pde.verdict == Verdict::Pass && dens.verdict == Verdict::Pass;
    ok = ok && pass;
    notes += " beta=" + detail::fmt(b) + ": HJ residual " + detail::fmt(pde.coarse_max) + " -> " +
             detail::fmt(pde.fine_max) + " (x" + detail::fmt(pde.ratio, 3) + "), density residual " +
             detail::fmt(dens.coarse_max) + " -> " + detail::fmt(dens.fine_max) + " (x" + detail::fmt(dens.ratio, 3) + ");";
    rows.push_back({{"beta", b}, {"pde", to_json(pde)}, {"pde_coarse", to_json(reps[0])}, {"pde_fine", to_json(reps[1])},
                    {"density", to_json(dens)}});
  }
  r.passed = ok;
  r.summary = "decrease >= 1.5x under halving:" + notes;
  r.detail = {{"per_beta", rows}};
  return r;
}

/// Classical and fractional circle fronts.
inline CheckResult check_fronts(const SuiteOptions& o = {}) {
  CheckResult r;
  r.name = "fronts";
  const auto p = make_problem(Preset::Test3Circle);
  const auto grid = SpaceTimeGrid::square(-20.0, 20.0, 0.1);
  const double tol = 2.0 * grid.dx;
  FrontOptions copt;
  copt.quadrature.workers = o.workers;
  std::vector<double> ct;
  for (int k = 0; k <= 15; ++k) ct.push_back(k);
  const auto classical = radius_series(evolve_front(p, ct, grid, copt));
  double worst_classical = 0.0, worst_circ = 0.0;
  for (const auto& s : classical) {
    worst_classical = std::max(worst_classical, std::abs(s.mean_radius - (1.0 + s.time)));
    worst_circ = std::max(worst_circ, s.deviation);
  }
  bool ok = worst_classical <= tol && worst_circ <= tol;
  Json fr = Json::array();
  std::string notes;
  for (double b : o.betas_or({0.5})) {
    FrontOptions fopt;
    fopt.beta = FractionalOrder(b);
    fopt.quadrature.workers = o.workers;
    const auto series = radius_series(evolve_front(p, {1.0, 3.0, 6.0, 9.0, 12.0, 15.0}, grid, fopt));
    double circ = 0.0;
    for (const auto& s : series) circ = std::max(circ, s.deviation);
    const double inc1 = series[4].mean_radius - series[3].mean_radius;
    const double inc2 = series[5].mean_radius - series[4].mean_radius;
    const bool slowing = inc1 > 0.0 && inc2 > 0.0 && inc2 < inc1;
    ok = ok && circ <= tol && slowing;
    worst_circ = std::max(worst_circ, circ);
    notes += " beta=" + detail::fmt(b) + ": increments " + detail::fmt(inc1) + ", " + detail::fmt(inc2) + ";";
    Json rows = Json::array();
    for (const auto& s : series) rows.push_back(to_json(s));
    fr.push_back({{"beta", b}, {"radii", rows}, {"late_increments", {inc1, inc2}}});
  }
  Json cl = Json::array();
  for (const auto& s : classical) cl.push_back(to_json(s));
  r.passed = ok;
  r.summary = "classical |r - (1+t)| " + detail::fmt(worst_classical) + ", max circularity deviation " +
              detail::fmt(worst_circ) + " (<= " + detail::fmt(tol) + ");" + notes;
  r.detail = {{"classical", cl}, {"fractional", fr}};
  return r;
}

/// Observed order of the L1 scheme on t^beta at t = 1.
inline CheckResult check_caputo(const SuiteOptions& o = {}) {
  CheckResult r;
  r.name = "l1-caputo";
  bool ok = true;
  Json rows = Json::array();
  std::string notes;
  for (double b : o.betas_or({0.4, 0.5, 0.6, 0.8})) {
    const FractionalOrder beta(b);
    std::vector<double> lh, le;
    for (int n : {20, 40, 80, 160, 320}) {
      TimeSeries s;
      for (int k = 0; k <= n; ++k) {
        const double t = static_cast<double>(k) / n;
        s.times.push_back(t);
        s.values.push_back(std::pow(t, b));
      }
      const double err = std::abs(caputo_derivative_discrete(s, beta, static_cast<std::size_t>(n)) - std::tgamma(b + 1.0));
      lh.push_back(std::log(1.0 / n));
      le.push_back(std::log(err));
    }
    const double order = fit_line(lh, le).slope;
    const bool pass = std::abs(order - (2.0 - b)) <= 0.2;
    ok = ok && pass;
    notes += " beta=" + detail::fmt(b) + ": " + detail::fmt(order, 3) + " vs " + detail::fmt(2.0 - b, 3) + ";";
    rows.push_back({{"beta", b}, {"order", order}, {"expected", 2.0 - b}, {"pass", pass}});
  }
  r.passed = ok;
  r.summary = "fitted order within 0.2 of 2-beta:" + notes;
  r.detail = {{"per_beta", rows}};
  return r;
}

struct NamedCheck {
  std::string name;
  CheckResult (*run)(const SuiteOptions&);
};

/// Every check of the suite, cheapest first.
inline const std::vector<NamedCheck>& suite_checks() {
  static const std::vector<NamedCheck> checks{
      {"stable-law", check_stable_law},          {"inverse-stable-density", check_inverse_density},
      {"l1-caputo", check_caputo},               {"test2", check_test2},
      {"regularity", check_regularity_suite},    {"fronts", check_fronts},
      {"dynamic-programming", check_dpp},        {"test1", check_test1},
      {"pde-residual", check_residuals},         {"moment-law", check_moments},
      {"estimator-agreement", check_crossval}};
  return checks;
}

}  // namespace fhl

#pragma once

// The fractional Hopf-Lax value u_beta(x, t) = E[u(x, E_t)], evaluated either by
// midpoint quadrature against the inverse-stable density or by Monte Carlo
// over simulated inverse-subordinator paths.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fhl/convex.hpp"
#include "fhl/datum.hpp"
#include "fhl/errors.hpp"
#include "fhl/geometry.hpp"
#include "fhl/hopflax.hpp"
#include "fhl/parallel.hpp"
#include "fhl/rng.hpp"
#include "fhl/stablelaw.hpp"

namespace fhl {

/// Sampled operational times below this use the limit value g(x) + E L(0).
inline constexpr double kTinyTime = 1e-8;

enum class Preset { Test1, Test2, Test3Circle, Test3TwoCircles, Custom };

inline std::string to_string(Preset p) {
  switch (p) {
    case Preset::Test1: return "test1";
    case Preset::Test2: return "test2";
    case Preset::Test3Circle: return "test3-circle";
    case Preset::Test3TwoCircles: return "test3-two-circles";
    case Preset::Custom: return "custom";
  }
  return "unknown";
}

inline Preset parse_preset(const std::string& name) {
  for (auto p : {Preset::Test1, Preset::Test2, Preset::Test3Circle, Preset::Test3TwoCircles, Preset::Custom})
    if (to_string(p) == name) return p;
  throw ValidationError("unknown preset '" + name + "' (expected test1, test2, test3-circle, test3-two-circles or custom)");
}

/// A datum, a Hamiltonian/Lagrangian pair and the working box they live on.
struct Problem {
  Preset preset = Preset::Custom;
  InitialDatum datum;
  HamiltonianSpec hamiltonian;
  LagrangianSpec lagrangian;
  SpaceTimeGrid box;

  int dimension() const { return box.dimension; }

  /// Classical solution u(x, s): closed forms for Tests 1-2, exact ball minimum
  /// for radial data under the indicator Lagrangian, lattice scan otherwise.
  double classical(const Point& x, double s) const {
    if (s < 0.0) throw DomainError("classical solution requires s >= 0");
    if (s == 0.0) return datum(x);
    switch (preset) {
      case Preset::Test1: return classical_reference(ClassicalTest::Test1, x, s);
      case Preset::Test2: return classical_reference(ClassicalTest::Test2, x, s);
      default: break;
    }
    const double reach = lagrangian.speed_limit();
    if (std::isfinite(reach))
      if (auto v = datum.ball_min(x, reach * s)) return *v;
    return hopf_lax(datum, lagrangian, x, s, box).value;
  }

  /// Returns body(profile) with profile(r) = u(x, r), where the work that does
  /// not depend on r is done once.
  template <class Body>
  double with_profile(const Point& x, Body&& body) const {
    switch (preset) {
      case Preset::Test1: {
        const double d = x.norm();
        return body([d](double r) { return -(d + r) * (d + r); });
      }
      case Preset::Test2: {
        const Point y = x;
        return body([y](double r) { return classical_reference(ClassicalTest::Test2, y, r); });
      }
      default: break;
    }
    const double reach = lagrangian.speed_limit();
    if (std::isfinite(reach))
      if (const auto b = datum.ball_profile(x)) return body([&b, reach](double r) { return (*b)(reach * r); });
    return body([this, &x](double r) { return classical(x, r); });
  }
};

inline const std::vector<Point>& default_two_circle_centers() {
  static const std::vector<Point> c{Point::of(-1.5, 0.0), Point::of(1.5, 0.0)};
  return c;
}
inline const std::vector<double>& default_two_circle_radii() {
  static const std::vector<double> r{1.0, 1.0};
  return r;
}

/// Default working box of each preset.
inline SpaceTimeGrid default_box(Preset p) {
  switch (p) {
    case Preset::Test1: return SpaceTimeGrid::line(-10.0, 10.0, 0.01);
    case Preset::Test2: return SpaceTimeGrid::line(-4.0, 4.0, 0.01);
    case Preset::Test3Circle:
    case Preset::Test3TwoCircles: return SpaceTimeGrid::square(-20.0, 20.0, 0.05);
    case Preset::Custom: break;
  }
  throw ValidationError("custom problems have no default box");
}

inline Problem make_problem(Preset p, std::optional<SpaceTimeGrid> box = std::nullopt) {
  SpaceTimeGrid b = box.value_or(default_box(p));
  b.times.clear();
  b.validate();
  switch (p) {
    case Preset::Test1:
      if (b.dimension != 1) throw ValidationError("test1 is one-dimensional");
      return {p, InitialDatum::neg_square(b), HamiltonianSpec::norm(1), LagrangianSpec::indicator_ball(1.0), b};
    case Preset::Test2:
      if (b.dimension != 1) throw ValidationError("test2 is one-dimensional");
      return {p, InitialDatum::parabola_hinge(b), HamiltonianSpec::scaled_quadratic(0.5, 1),
              LagrangianSpec::scaled_quadratic(0.5), b};
    case Preset::Test3Circle:
      if (b.dimension != 2) throw ValidationError("test3 presets are two-dimensional");
      return {p, InitialDatum::signed_circle(b), HamiltonianSpec::norm(2), LagrangianSpec::indicator_ball(1.0), b};
    case Preset::Test3TwoCircles:
      if (b.dimension != 2) throw ValidationError("test3 presets are two-dimensional");
      return {p, InitialDatum::two_circles(default_two_circle_centers(), default_two_circle_radii(), b),
              HamiltonianSpec::norm(2), LagrangianSpec::indicator_ball(1.0), b};
    case Preset::Custom: break;
  }
  throw ValidationError("use make_custom_problem for custom problems");
}

inline Problem make_custom_problem(InitialDatum g, HamiltonianSpec h) {
  if (g.dimension() != h.dimension()) throw ValidationError("datum and Hamiltonian dimensions differ");
  SpaceTimeGrid box = g.box();
  box.times.clear();
  LagrangianSpec lag = lagrangian_of(h);
  return {Preset::Custom, std::move(g), std::move(h), std::move(lag), box};
}

struct QuadratureConfig {
  /// Upper limit replacing infinity; empty means 4 E[E_{t_max}].
  std::optional<double> truncation_M;
  std::size_t n_intervals = 4000;
  bool adaptive = true;
  int max_doublings = 24;
  unsigned workers = 1;

  void validate() const {
    if (n_intervals < 8) throw ValidationError("n_intervals must be >= 8");
    if (truncation_M && !(*truncation_M > 0.0)) throw ValidationError("truncation_M must be positive");
    if (max_doublings < 0) throw ValidationError("max_doublings must be >= 0");
  }
};

struct MonteCarloConfig {
  std::size_t n_paths = 10000;
  /// Operational-time step; empty means 1e-3 E[E_t] at the evaluation time.
  std::optional<double> tau_step;
  std::uint64_t seed = 20240917;
  std::size_t block_size = 250;
  unsigned workers = 1;

  void validate() const {
    if (n_paths < 100) throw ValidationError("n_paths must be >= 100");
    if (tau_step && !(*tau_step > 0.0)) throw ValidationError("tau_step must be positive");
    if (block_size == 0) throw ValidationError("block_size must be positive");
  }
};

/// Step whose single-step overshoot is about 0.1% of E[E_t].
inline double default_tau_step(FractionalOrder beta, double t) { return 1e-3 * moment(1.0, beta, t); }

inline double resolve_tau_step(const MonteCarloConfig& cfg, FractionalOrder beta, double t) {
  return cfg.tau_step.value_or(default_tau_step(beta, t));
}

/// Truncation level for the times up to t_max: the configured or default M,
/// doubled while the omitted mass P(E_{t_max} > M) is not below the target.
/// The target is a tenth of tail_epsilon so that the midpoint mass check on
/// the density grid keeps room for the quadrature error.
inline double resolve_truncation(FractionalOrder beta, double t_max, const QuadratureConfig& q,
                                 const StablePdfConfig& s) {
  q.validate();
  double m = q.truncation_M.value_or(4.0 * moment(1.0, beta, t_max));
  if (!q.adaptive) return m;
  const double target = 0.1 * s.tail_epsilon;
  double tail = inverse_stable_tail(m, t_max, beta, s);
  for (int k = 0; tail >= target; ++k) {
    if (k >= q.max_doublings)
      throw AccuracyError("tail mass above tail_epsilon after " + std::to_string(k) + " doublings of M", tail);
    m *= 2.0;
    tail = inverse_stable_tail(m, t_max, beta, s);
  }
  return m;
}

inline DensityGrid density_for(FractionalOrder beta, std::vector<double> times, const QuadratureConfig& q,
                               const StablePdfConfig& s) {
  const double m = resolve_truncation(beta, times.back(), q, s);
  return make_density_grid(beta, std::move(times), m, q.n_intervals, s, q.workers);
}

using ClassicalEvaluator = std::function<double(const Point&, double)>;

struct QuadratureResult {
  double value = 0.0;
  /// |u(x, M)| times the omitted mass, a size estimate of the dropped tail.
  double tail_bound = 0.0;
  double tail_mass = 0.0;
  double captured_mass = 0.0;
  double truncation_M = 0.0;
};

/// Midpoint rule for int_0^M f(r) E_beta(r, t_j) dr on column j of `grid`.
template <class F>
QuadratureResult integrate_profile(F&& f, const DensityGrid& grid, std::size_t j) {
  QuadratureResult out;
  double sum = 0.0;
  for (std::size_t i = 0; i < grid.r_nodes.size(); ++i) sum += f(grid.r_nodes[i]) * grid.at(i, j);
  out.value = sum * grid.delta_r;
  out.tail_mass = grid.tail_mass[j];
  out.captured_mass = grid.midpoint_mass(j);
  out.truncation_M = grid.truncation_M;
  out.tail_bound = std::abs(f(grid.truncation_M)) * out.tail_mass;
  return out;
}

template <class U>
QuadratureResult integrate_against_density(U&& u, const Point& x, const DensityGrid& grid, std::size_t j) {
  return integrate_profile([&](double r) { return u(x, r); }, grid, j);
}

/// u_beta(x, t_j) of problem p from column j of `grid`.
inline double problem_quadrature(const Problem& p, const Point& x, const DensityGrid& grid, std::size_t j) {
  return p.with_profile(x, [&](auto&& f) { return integrate_profile(f, grid, j).value; });
}

inline QuadratureResult frac_hopf_lax_quadrature(const ClassicalEvaluator& u, const Point& x, double t,
                                                 FractionalOrder beta, const QuadratureConfig& q = {},
                                                 const StablePdfConfig& s = {}) {
  if (!(t > 0.0)) throw DomainError("frac_hopf_lax_quadrature requires t > 0");
  const auto grid = density_for(beta, {t}, q, s);
  return integrate_against_density(u, x, grid, 0);
}

/// Streaming mean and variance; blocks merge with Chan's pairwise rule.
struct RunningStats {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t infinite = 0;

  void push(double v) {
    if (std::isinf(v) && v > 0.0) {
      ++infinite;
      return;
    }
    ++n;
    const double d = v - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (v - mean);
  }

  void merge(const RunningStats& o) {
    infinite += o.infinite;
    if (o.n == 0) return;
    if (n == 0) {
      n = o.n, mean = o.mean, m2 = o.m2;
      return;
    }
    const double na = static_cast<double>(n), nb = static_cast<double>(o.n);
    const double d = o.mean - mean;
    mean += d * nb / (na + nb);
    m2 += o.m2 + d * d * na * nb / (na + nb);
    n += o.n;
  }

  double estimate() const { return infinite ? kInfinity : mean; }
  double std_error() const {
    if (infinite) return kInfinity;
    return n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
  }
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
  std::size_t contaminated = 0;
  std::size_t degenerate = 0;
  double tau_step = 0.0;
};

namespace detail {

struct Tally {
  std::size_t contaminated = 0;
  std::size_t degenerate = 0;
};

/// Runs `sample(rng, tally)` n_paths times in fixed-size blocks, block b
/// drawing from derived_stream(seed, b). `sample` returns one value per
/// statistic; block results merge in block order.
template <std::size_t K, class Sample>
std::array<RunningStats, K> run_blocks(const MonteCarloConfig& cfg, Tally& total, Sample&& sample) {
  cfg.validate();
  const std::size_t blocks = (cfg.n_paths + cfg.block_size - 1) / cfg.block_size;
  std::vector<std::array<RunningStats, K>> stats(blocks);
  std::vector<Tally> tallies(blocks);
  parallel_for(blocks, cfg.workers, [&](std::size_t b) {
    Rng rng = derived_stream(cfg.seed, b);
    const std::size_t count = std::min(cfg.block_size, cfg.n_paths - b * cfg.block_size);
    for (std::size_t k = 0; k < count; ++k) {
      const std::array<double, K> v = sample(rng, tallies[b]);
      for (std::size_t m = 0; m < K; ++m) stats[b][m].push(v[m]);
    }
  });
  std::array<RunningStats, K> out{};
  for (std::size_t b = 0; b < blocks; ++b) {
    for (std::size_t m = 0; m < K; ++m) out[m].merge(stats[b][m]);
    total.contaminated += tallies[b].contaminated;
    total.degenerate += tallies[b].degenerate;
  }
  return out;
}

inline McEstimate finish(const RunningStats& s, const Tally& t, double tau) {
  return {s.estimate(), s.std_error(), s.n + s.infinite, t.contaminated, t.degenerate, tau};
}

}  // namespace detail

/// Mean of min_y { E_t L((x - y) / E_t) + g(y) } over sampled E_t.
inline McEstimate frac_hopf_lax_mc(const InitialDatum& g, const LagrangianSpec& lag, const Point& x, double t,
                                   FractionalOrder beta, const MonteCarloConfig& cfg, const SpaceTimeGrid& grid) {
  if (!(t > 0.0)) throw DomainError("frac_hopf_lax_mc requires t > 0");
  const double tau = resolve_tau_step(cfg, beta, t);
  const std::vector<double> level{t};
  detail::Tally tally;
  const auto stats = detail::run_blocks<1>(cfg, tally, [&](Rng& rng, detail::Tally& tl) -> std::array<double, 1> {
    const double e = sample_first_passages(level, beta, tau, rng)[0];
    if (e < kTinyTime) {
      ++tl.degenerate;
      return {g(x) + e * lag.at_zero()};
    }
    const auto r = hopf_lax(g, lag, x, e, grid);
    if (r.boundary_contaminated) ++tl.contaminated;
    return {r.value};
  });
  return detail::finish(stats[0], tally, tau);
}

/// Cost of the straight-line control from y at time 0 to x at time t:
/// mean of E_t L((x - y) / E_t) + g(y).
inline McEstimate cost_functional_mc(const Point& y, const InitialDatum& g, const LagrangianSpec& lag, const Point& x,
                                     double t, FractionalOrder beta, const MonteCarloConfig& cfg) {
  if (!(t > 0.0)) throw DomainError("cost_functional_mc requires t > 0");
  const double tau = resolve_tau_step(cfg, beta, t);
  const std::vector<double> level{t};
  const Point v = x - y;
  const bool still = v.norm() == 0.0;
  const double gy = g(y);
  detail::Tally tally;
  const auto stats = detail::run_blocks<1>(cfg, tally, [&](Rng& rng, detail::Tally& tl) -> std::array<double, 1> {
    const double e = sample_first_passages(level, beta, tau, rng)[0];
    if (still) return {gy + e * lag.at_zero()};
    if (!(e > 0.0)) {
      ++tl.degenerate;
      return {kInfinity};
    }
    return {e * lag((1.0 / e) * v) + gy};
  });
  return detail::finish(stats[0], tally, tau);
}

struct DppResult {
  double lhs = 0.0;
  double lhs_tail_bound = 0.0;
  double rhs = 0.0;
  double rhs_std_error = 0.0;
  /// Same estimator with the classical u(y, E_s) of each path in place of u_beta(y, s).
  double rhs_pathwise = 0.0;
  double rhs_pathwise_std_error = 0.0;
  double degenerate_fraction = 0.0;
  std::size_t samples = 0;
  std::size_t contaminated = 0;
};

/// Both sides of u_beta(x, t) = E[ min_y { (E_t - E_s) L((x - y) / (E_t - E_s)) + u_beta(y, s) } ]
/// with (E_s, E_t) read off the same path. One-dimensional problems only.
inline DppResult dpp_check(const Problem& p, const Point& x, double t, double s, FractionalOrder beta,
                           const MonteCarloConfig& mc = {}, const QuadratureConfig& q = {},
                           const StablePdfConfig& sc = {}) {
  if (!(s > 0.0) || !(s < t)) throw DomainError("dpp_check requires 0 < s < t");
  if (p.dimension() != 1) throw DomainError("dpp_check supports one-dimensional problems");
  if (!p.box.contains(x)) throw DomainError("dpp_check point lies outside the working box");
  const ClassicalEvaluator u = [&p](const Point& y, double r) { return p.classical(y, r); };

  DppResult out;
  const auto lhs = frac_hopf_lax_quadrature(u, x, t, beta, q, sc);
  out.lhs = lhs.value;
  out.lhs_tail_bound = lhs.tail_bound;

  const auto dens = density_for(beta, {s}, q, sc);
  const SpaceTimeGrid& box = p.box;
  const std::size_t n = box.nodes(0);
  std::vector<double> us(n);
  parallel_for(n, q.workers, [&](std::size_t i) {
    us[i] = problem_quadrature(p, Point::of(box.node(0, i)), dens, 0);
  });
  auto us_at = [&](double y) {
    const double pos = std::clamp((y - box.box[0].lo) / box.dx, 0.0, static_cast<double>(n - 1));
    const std::size_t i = std::min(static_cast<std::size_t>(pos), n - 2);
    const double w = pos - static_cast<double>(i);
    return (1.0 - w) * us[i] + w * us[i + 1];
  };
  const double us_x = us_at(x[0]);
  const double reach_rate = p.lagrangian.speed_limit();
  auto inner = [&](double delta, auto&& value_at) {
    auto objective = [&](double y) { return delta * p.lagrangian(Point::of((x[0] - y) / delta)) + value_at(y); };
    double lo = box.box[0].lo, hi = box.box[0].hi;
    if (std::isfinite(reach_rate))
      lo = std::max(lo, x[0] - reach_rate * delta), hi = std::min(hi, x[0] + reach_rate * delta);
    return detail::scan_refine_1d(objective, box, lo, hi);
  };

  const double tau = resolve_tau_step(mc, beta, s);
  const std::vector<double> levels{s, t};
  detail::Tally tally;
  const auto stats = detail::run_blocks<2>(mc, tally, [&](Rng& rng, detail::Tally& tl) -> std::array<double, 2> {
    const auto e = sample_first_passages(levels, beta, tau, rng);
    const double delta = e[1] - e[0];
    if (delta < kTinyTime) {
      ++tl.degenerate;
      return {us_x, p.classical(x, e[0])};
    }
    const auto a = inner(delta, us_at);
    if (detail::on_box_boundary(box, a.y)) ++tl.contaminated;
    const auto b = inner(delta, [&](double y) { return p.classical(Point::of(y), e[0]); });
    return {a.value, b.value};
  });
  out.rhs = stats[0].estimate();
  out.rhs_std_error = stats[0].std_error();
  out.rhs_pathwise = stats[1].estimate();
  out.rhs_pathwise_std_error = stats[1].std_error();
  out.samples = stats[0].n;
  out.contaminated = tally.contaminated;
  out.degenerate_fraction = static_cast<double>(tally.degenerate) / static_cast<double>(mc.n_paths);
  return out;
}

enum class Method { Classical, Quadrature, MonteCarlo };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::Classical: return "classical";
    case Method::Quadrature: return "quadrature";
    case Method::MonteCarlo: return "monte_carlo";
  }
  return "unknown";
}

inline Method parse_method(const std::string& name) {
  for (auto m : {Method::Classical, Method::Quadrature, Method::MonteCarlo})
    if (to_string(m) == name) return m;
  throw ValidationError("unknown method '" + name + "' (expected classical, quadrature or monte_carlo)");
}

/// u or u_beta at points x_i and times t_j, with the configuration that produced it.
struct SolutionField {
  Preset preset = Preset::Custom;
  SpaceTimeGrid grid;
  std::vector<Point> points;
  std::vector<double> times;
  std::vector<double> values;      // values[i * times.size() + j]; NaN where the point failed
  std::vector<double> std_errors;  // Monte Carlo only, same layout
  std::vector<double> initial;     // g(x_i)
  Method method = Method::Classical;
  std::optional<FractionalOrder> beta;
  QuadratureConfig quadrature;
  MonteCarloConfig monte_carlo;
  StablePdfConfig density;
  std::vector<double> truncation_M;  // per time (quadrature)
  std::vector<double> tail_mass;     // per time (quadrature)
  std::size_t failed_points = 0;
  std::size_t contaminated_points = 0;
  std::vector<std::string> messages;

  double at(std::size_t i, std::size_t j) const { return values[i * times.size() + j]; }
  std::size_t index(std::size_t i, std::size_t j) const { return i * times.size() + j; }
};

struct SolveOptions {
  Method method = Method::Quadrature;
  std::optional<FractionalOrder> beta;
  QuadratureConfig quadrature;
  MonteCarloConfig monte_carlo;
  StablePdfConfig density;
};

/// Fills u (classical) or u_beta (quadrature, Monte Carlo) at the given points
/// and times. Per-point failures are recorded; more than 1% failed points
/// raise an AccuracyError.
inline SolutionField solve_points(const Problem& p, std::vector<Point> points, std::vector<double> times,
                                  const SolveOptions& opt) {
  SpaceTimeGrid grid = p.box;
  grid.times = times;
  grid.validate();
  if (times.empty()) throw ValidationError("solve needs at least one time");
  if (opt.method != Method::Classical && !opt.beta) throw ValidationError("fractional methods need beta");
  opt.quadrature.validate();
  opt.monte_carlo.validate();
  opt.density.validate();
  for (const auto& x : points)
    if (!grid.contains(x)) throw ValidationError("solve point lies outside the working box");

  SolutionField f;
  f.preset = p.preset;
  f.grid = grid;
  f.points = std::move(points);
  f.times = std::move(times);
  f.method = opt.method;
  f.beta = opt.method == Method::Classical ? std::nullopt : opt.beta;
  f.quadrature = opt.quadrature;
  f.monte_carlo = opt.monte_carlo;
  f.density = opt.density;
  const std::size_t np = f.points.size(), nt = f.times.size();
  f.values.assign(np * nt, std::numeric_limits<double>::quiet_NaN());
  if (opt.method == Method::MonteCarlo) f.std_errors.assign(np * nt, std::numeric_limits<double>::quiet_NaN());
  f.initial.resize(np);
  for (std::size_t i = 0; i < np; ++i) f.initial[i] = p.datum(f.points[i]);

  std::vector<std::string> errors(np);
  std::vector<char> contaminated(np, 0);
  auto guarded = [&](std::size_t i, auto&& body) {
    if (!errors[i].empty()) return;
    try {
      body();
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  };

  switch (opt.method) {
    case Method::Classical: {
      const unsigned workers = opt.quadrature.workers;
      parallel_for(np, workers, [&](std::size_t i) {
        guarded(i, [&] {
          for (std::size_t j = 0; j < nt; ++j) {
            const auto r = hopf_lax(p.datum, p.lagrangian, f.points[i], f.times[j], p.box);
            if (r.boundary_contaminated) contaminated[i] = 1;
            f.values[f.index(i, j)] = r.value;
          }
        });
      });
      break;
    }
    case Method::Quadrature: {
      for (std::size_t j = 0; j < nt; ++j) {
        const auto dens = density_for(*opt.beta, {f.times[j]}, opt.quadrature, opt.density);
        f.truncation_M.push_back(dens.truncation_M);
        f.tail_mass.push_back(dens.tail_mass[0]);
        parallel_for(np, opt.quadrature.workers, [&](std::size_t i) {
          guarded(i, [&] { f.values[f.index(i, j)] = problem_quadrature(p, f.points[i], dens, 0); });
        });
      }
      break;
    }
    case Method::MonteCarlo: {
      for (std::size_t i = 0; i < np; ++i)
        guarded(i, [&] {
          for (std::size_t j = 0; j < nt; ++j) {
            const auto est = frac_hopf_lax_mc(p.datum, p.lagrangian, f.points[i], f.times[j], *opt.beta,
                                              opt.monte_carlo, p.box);
            if (est.contaminated) contaminated[i] = 1;
            f.values[f.index(i, j)] = est.mean;
            f.std_errors[f.index(i, j)] = est.std_error;
          }
        });
      break;
    }
  }

  for (std::size_t i = 0; i < np; ++i) {
    if (!errors[i].empty()) {
      ++f.failed_points;
      for (std::size_t j = 0; j < nt; ++j) f.values[f.index(i, j)] = std::numeric_limits<double>::quiet_NaN();
      if (f.messages.size() < 20) f.messages.push_back("point " + std::to_string(i) + ": " + errors[i]);
    }
    if (contaminated[i]) ++f.contaminated_points;
  }
  if (f.contaminated_points)
    f.messages.push_back(std::to_string(f.contaminated_points) + " points with boundary contamination");
  const double fraction = np ? static_cast<double>(f.failed_points) / static_cast<double>(np) : 0.0;
  if (fraction > 0.01)
    throw AccuracyError(std::to_string(f.failed_points) + " of " + std::to_string(np) +
                            " points failed; first: " + f.messages.front(),
                        fraction);
  return f;
}

/// solve_points over every lattice node of `grid` at grid.times.
inline SolutionField solve_field(const Problem& p, const SpaceTimeGrid& grid, const SolveOptions& opt) {
  grid.validate();
  Problem q = p;
  q.box.box = grid.box;
  q.box.dx = grid.dx;
  q.box.dimension = grid.dimension;
  std::vector<Point> points(grid.size());
  for (std::size_t k = 0; k < points.size(); ++k) points[k] = grid.point(k);
  return solve_points(q, std::move(points), grid.times, opt);
}

}  // namespace fhl

#pragma once

// One-sided stable subordinator D with E[exp(-s D_tau)] = exp(-tau s^beta), its
// inverse (first-passage) process E_t = inf{tau > 0 : D_tau > t}, and samplers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "fhl/errors.hpp"
#include "fhl/parallel.hpp"
#include "fhl/quadrature.hpp"
#include "fhl/rng.hpp"

namespace fhl {

/// Order beta of the Caputo derivative, strictly inside (0, 1).
class FractionalOrder {
 public:
  explicit FractionalOrder(double beta) : beta_(beta) {
    if (!(beta > 0.0 && beta < 1.0))
      throw DomainError("fractional order must lie in (0,1), got " + std::to_string(beta));
  }

  double value() const noexcept { return beta_; }
  friend bool operator==(const FractionalOrder&, const FractionalOrder&) = default;

 private:
  double beta_;
};

/// Above this order the angular integrand is too stiff; callers should use the
/// classical limit E_t = t instead.
inline constexpr double kMaxDensityOrder = 0.99;

struct StablePdfConfig {
  int integrand_nodes = 64;
  double tail_epsilon = 1e-6;
  double singularity_margin = 1e-10;

  void validate() const {
    if (integrand_nodes < 16) throw ValidationError("integrand_nodes must be >= 16");
    if (!(tail_epsilon > 0.0 && tail_epsilon < 1e-3))
      throw ValidationError("tail_epsilon must lie in (0, 1e-3)");
    if (!(singularity_margin > 0.0 && singularity_margin < 1e-3))
      throw ValidationError("singularity_margin must lie in (0, 1e-3)");
  }
};

namespace detail {

inline constexpr double kPi = std::numbers::pi;
// Successive refinements of the angular integral must agree to this level.
inline constexpr double kAngularTolerance = 1e-9;

// log of Zolotarev's function
//   A(phi) = [sin(b phi)^b sin((1-b) phi)^(1-b) / sin(phi)]^(1/(1-b)),
// given both phi and psi = pi - phi so that either end is resolved exactly.
inline double log_zolotarev(double b, double phi, double psi) {
  const double s_b = phi <= psi ? std::sin(b * phi) : std::sin(b * kPi - b * psi);
  const double s_1b = phi <= psi ? std::sin((1.0 - b) * phi) : std::sin((1.0 - b) * kPi - (1.0 - b) * psi);
  const double s = std::sin(std::min(phi, psi));
  return (b * std::log(s_b) + (1.0 - b) * std::log(s_1b) - std::log(s)) / (1.0 - b);
}

inline void check_density_order(FractionalOrder beta) {
  if (beta.value() > kMaxDensityOrder)
    throw DomainError("density evaluation supports beta <= 0.99; use the classical limit E_t = t");
}

// Integrates kernel(log V(phi)) d phi over (0, pi), where
// log V(phi) = log A(phi) - shift is increasing in phi. The two halves are
// parametrised by log(phi) and log(pi - phi); the half containing V = 1 is split
// there.
template <class Kernel>
quad::Estimate angular_integral(double b, double shift, const StablePdfConfig& cfg, Kernel&& kernel) {
  const double w_lo = std::log(cfg.singularity_margin);
  const double w_hi = std::log(kPi / 2.0);
  auto lv_left = [&](double w) {
    const double phi = std::exp(w);
    return log_zolotarev(b, phi, kPi - phi) - shift;
  };
  auto lv_right = [&](double w) {
    const double psi = std::exp(w);
    return log_zolotarev(b, kPi - psi, psi) - shift;
  };
  auto left = [&](double w) { return kernel(lv_left(w)) * std::exp(w); };
  auto right = [&](double w) { return kernel(lv_right(w)) * std::exp(w); };

  auto bisect = [](auto&& fn, double lo, double hi) {
    // fn(lo) and fn(hi) have opposite signs
    const bool lo_negative = fn(lo) < 0.0;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      if ((fn(mid) < 0.0) == lo_negative) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
  };

  std::vector<std::pair<double, double>> left_pieces{{w_lo, w_hi}};
  std::vector<std::pair<double, double>> right_pieces{{w_lo, w_hi}};
  const double mid_value = lv_left(w_hi);
  if (mid_value < 0.0) {
    // V = 1 lies in the half next to pi; lv_right decreases in log(psi).
    if (lv_right(w_lo) > 0.0) {
      const double w_star = bisect(lv_right, w_lo, w_hi);
      right_pieces = {{w_lo, w_star}, {w_star, w_hi}};
    }
  } else if (lv_left(w_lo) < 0.0) {
    const double w_star = bisect(lv_left, w_lo, w_hi);
    left_pieces = {{w_lo, w_star}, {w_star, w_hi}};
  }

  const auto panels = static_cast<std::size_t>((cfg.integrand_nodes + 14) / 15);
  quad::Estimate total;
  total.converged = true;
  auto accumulate = [&](auto&& fn, const auto& pieces) {
    for (const auto& [a, c] : pieces) {
      const auto e = quad::integrate(fn, a, c, 1e-12, 1e-300, panels, 4000);
      total.value += e.value;
      total.error += e.error;
      total.evaluations += e.evaluations;
    }
  };
  accumulate(left, left_pieces);
  accumulate(right, right_pieces);
  // Values near the underflow threshold carry no relative accuracy and are
  // zero for every use downstream.
  total.converged = total.error <= kAngularTolerance * std::abs(total.value) || total.error < 1e-280;
  return total;
}

// Draws from (0,1) excluding both endpoints.
inline double open_unit(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace detail

/// Density g_beta(x) of D_1, the standard one-sided stable law with Laplace
/// transform exp(-s^beta), from Kanter's angular representation
///   g(x) = c / (pi x) * int_0^pi V(phi) exp(-V(phi)) dphi,
///   V = A(phi) x^(-c),  c = beta / (1 - beta).
inline double stable_pdf(double x, FractionalOrder beta, const StablePdfConfig& cfg = {}) {
  cfg.validate();
  detail::check_density_order(beta);
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("stable_pdf requires a finite x > 0");
  const double b = beta.value();
  const double c = b / (1.0 - b);
  auto kernel = [](double lv) { return lv > 700.0 ? 0.0 : std::exp(lv - std::exp(lv)); };
  const auto est = detail::angular_integral(b, c * std::log(x), cfg, kernel);
  if (!est.converged)
    throw AccuracyError("angular quadrature for the stable density did not converge",
                        est.error / std::abs(est.value));
  return c / (detail::kPi * x) * est.value;
}

/// Distribution function P(D_1 <= y) = (1/pi) int_0^pi exp(-A(phi) y^(-c)) dphi.
inline double stable_cdf(double y, FractionalOrder beta, const StablePdfConfig& cfg = {}) {
  cfg.validate();
  detail::check_density_order(beta);
  if (y <= 0.0) return 0.0;
  if (!std::isfinite(y)) return 1.0;
  const double b = beta.value();
  const double c = b / (1.0 - b);
  auto kernel = [](double lv) { return lv > 700.0 ? 0.0 : std::exp(-std::exp(lv)); };
  const auto est = detail::angular_integral(b, c * std::log(y), cfg, kernel);
  if (!est.converged)
    throw AccuracyError("angular quadrature for the stable distribution did not converge",
                        est.error / std::abs(est.value));
  return est.value / detail::kPi;
}

/// Density of the inverse stable subordinator E_t at r:
///   E_beta(r, t) = (t / beta) r^(-1 - 1/beta) g_beta(t r^(-1/beta)).
inline double inverse_stable_pdf(double r, double t, FractionalOrder beta, const StablePdfConfig& cfg = {}) {
  if (!(r > 0.0) || !(t > 0.0)) throw DomainError("inverse_stable_pdf requires r > 0 and t > 0");
  const double b = beta.value();
  const double log_arg = std::log(t) - std::log(r) / b;
  const double x = std::exp(log_arg);
  if (!std::isfinite(x) || x == 0.0)
    throw DomainError("inverse_stable_pdf argument leaves the representable range");
  return (t / b) * std::exp((-1.0 - 1.0 / b) * std::log(r)) * stable_pdf(x, beta, cfg);
}

/// P(E_t > m) = P(D_m < t) = P(D_1 < t m^(-1/beta)).
inline double inverse_stable_tail(double m, double t, FractionalOrder beta, const StablePdfConfig& cfg = {}) {
  if (!(t > 0.0)) throw DomainError("inverse_stable_tail requires t > 0");
  if (m <= 0.0) return 1.0;
  return stable_cdf(t * std::pow(m, -1.0 / beta.value()), beta, cfg);
}

/// Moment constant C(alpha, beta) = Gamma(alpha + 1) / Gamma(alpha beta + 1).
inline double moment_constant(double alpha, FractionalOrder beta) {
  if (!(alpha > 0.0)) throw DomainError("moment order must be positive");
  return std::exp(std::lgamma(alpha + 1.0) - std::lgamma(alpha * beta.value() + 1.0));
}

/// E[E_t^alpha] = C(alpha, beta) t^(alpha beta).
inline double moment(double alpha, FractionalOrder beta, double t) {
  if (!(t > 0.0)) throw DomainError("moment requires t > 0");
  return moment_constant(alpha, beta) * std::pow(t, alpha * beta.value());
}

/// One draw of D_dtau = dtau^(1/beta) S with S standard one-sided stable
/// (Kanter: S = (A(U) / W)^((1-beta)/beta), U ~ U(0, pi), W ~ Exp(1)).
inline double sample_stable_increment(FractionalOrder beta, double dtau, Rng& rng) {
  if (!(dtau > 0.0)) throw DomainError("sample_stable_increment requires dtau > 0");
  const double b = beta.value();
  const double u = detail::open_unit(rng);
  const double w = -std::log(detail::open_unit(rng));
  const double log_a = detail::log_zolotarev(b, detail::kPi * u, detail::kPi * (1.0 - u));
  return std::exp(std::log(dtau) / b + (1.0 - b) / b * (log_a - std::log(w)));
}

inline constexpr std::size_t kDefaultStepBudget = 50'000'000;

/// Subordinator sampled on the operational-time lattice k * tau_step.
struct SubordinatorPath {
  double tau_step = 0.0;
  std::vector<double> levels;  // levels[k] = D at operational time k * tau_step
  std::uint64_t seed = 0;

  /// First passage E_s over `level`, linearly interpolated inside the crossing step.
  double first_passage(double level) const {
    if (level < 0.0) throw DomainError("first_passage requires a nonnegative level");
    const auto it = std::upper_bound(levels.begin(), levels.end(), level);
    if (it == levels.end())
      throw TruncationError("path ends before crossing the level", levels.empty() ? 0.0 : levels.back());
    const auto k = static_cast<std::size_t>(it - levels.begin());
    const double lo = levels[k - 1], hi = levels[k];
    return (static_cast<double>(k - 1) + (level - lo) / (hi - lo)) * tau_step;
  }
};

struct InverseSubordinatorSample {
  double value = 0.0;  // E_t
  SubordinatorPath path;
};

/// Walks D in steps of tau_step until it first exceeds t and returns the
/// interpolated passage time together with the whole path.
inline InverseSubordinatorSample sample_inverse_subordinator(double t, FractionalOrder beta, double tau_step, Rng& rng,
                                                             std::uint64_t seed = 0,
                                                             std::size_t step_budget = kDefaultStepBudget) {
  if (!(t > 0.0) || !(tau_step > 0.0))
    throw DomainError("sample_inverse_subordinator requires t > 0 and tau_step > 0");
  InverseSubordinatorSample out;
  out.path.tau_step = tau_step;
  out.path.seed = seed;
  out.path.levels.push_back(0.0);
  double level = 0.0;
  while (level <= t) {
    if (out.path.levels.size() > step_budget) throw TruncationError("step budget exhausted", level);
    level += sample_stable_increment(beta, tau_step, rng);
    out.path.levels.push_back(level);
  }
  out.value = out.path.first_passage(t);
  return out;
}

/// First passages over each of the increasing `levels` along one walk, without
/// storing the path.
inline std::vector<double> sample_first_passages(const std::vector<double>& levels, FractionalOrder beta,
                                                 double tau_step, Rng& rng,
                                                 std::size_t step_budget = kDefaultStepBudget) {
  if (!(tau_step > 0.0)) throw DomainError("tau_step must be positive");
  if (!std::is_sorted(levels.begin(), levels.end()) || (!levels.empty() && levels.front() < 0.0))
    throw DomainError("levels must be nonnegative and sorted");
  std::vector<double> out(levels.size());
  double level = 0.0;
  std::size_t step = 0, next = 0;
  while (next < levels.size()) {
    if (step >= step_budget) throw TruncationError("step budget exhausted", level);
    const double inc = sample_stable_increment(beta, tau_step, rng);
    const double after = level + inc;
    while (next < levels.size() && after > levels[next]) {
      out[next] = (static_cast<double>(step) + (levels[next] - level) / inc) * tau_step;
      ++next;
    }
    level = after;
    ++step;
  }
  return out;
}

/// Tabulated E_beta(r, t) on midpoints of a uniform partition of [0, M].
struct DensityGrid {
  FractionalOrder beta{0.5};
  std::vector<double> r_nodes;
  std::vector<double> t_nodes;
  std::vector<double> values;  // values[i * t_nodes.size() + j] = E_beta(r_i, t_j)
  double truncation_M = 0.0;
  double delta_r = 0.0;
  std::string rule = "midpoint";
  std::vector<double> tail_mass;  // P(E_t > M) per t node

  double at(std::size_t i, std::size_t j) const { return values[i * t_nodes.size() + j]; }

  double midpoint_mass(std::size_t j) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < r_nodes.size(); ++i) sum += at(i, j);
    return sum * delta_r;
  }
};

/// Builds the (r, t) density table with n_intervals midpoint nodes on [0, M] and
/// checks that every column carries unit mass within cfg.tail_epsilon.
inline DensityGrid make_density_grid(FractionalOrder beta, std::vector<double> t_nodes, double truncation_M,
                                     std::size_t n_intervals, const StablePdfConfig& cfg = {},
                                     unsigned workers = 1) {
  cfg.validate();
  if (t_nodes.empty() || !(truncation_M > 0.0) || n_intervals == 0)
    throw DomainError("density grid needs times, M > 0 and at least one interval");
  for (std::size_t j = 0; j < t_nodes.size(); ++j)
    if (!(t_nodes[j] > 0.0) || (j > 0 && !(t_nodes[j] > t_nodes[j - 1])))
      throw DomainError("density grid times must be positive and strictly increasing");
  DensityGrid grid;
  grid.beta = beta;
  grid.t_nodes = std::move(t_nodes);
  grid.truncation_M = truncation_M;
  grid.delta_r = truncation_M / static_cast<double>(n_intervals);
  grid.r_nodes.resize(n_intervals);
  for (std::size_t i = 0; i < n_intervals; ++i)
    grid.r_nodes[i] = (static_cast<double>(i) + 0.5) * grid.delta_r;
  const std::size_t nt = grid.t_nodes.size();
  grid.values.resize(n_intervals * nt);
  parallel_for(n_intervals, workers, [&](std::size_t i) {
    for (std::size_t j = 0; j < nt; ++j)
      grid.values[i * nt + j] = inverse_stable_pdf(grid.r_nodes[i], grid.t_nodes[j], beta, cfg);
  });
  for (std::size_t j = 0; j < nt; ++j) {
    grid.tail_mass.push_back(inverse_stable_tail(truncation_M, grid.t_nodes[j], beta, cfg));
    const double mass = grid.midpoint_mass(j);
    if (std::abs(mass - 1.0) > cfg.tail_epsilon)
      throw AccuracyError("density grid column mass outside 1 +/- tail_epsilon at t = " +
                              std::to_string(grid.t_nodes[j]),
                          std::abs(mass - 1.0));
  }
  return grid;
}

/// CSV: a metadata header (beta, truncation_M, rule) followed by r,t,value rows.
inline void write_csv(std::ostream& os, const DensityGrid& grid) {
  const auto old_precision = os.precision(17);
  os << "beta,truncation_M,rule\n"
     << grid.beta.value() << ',' << grid.truncation_M << ',' << grid.rule << '\n'
     << "r,t,value\n";
  for (std::size_t i = 0; i < grid.r_nodes.size(); ++i)
    for (std::size_t j = 0; j < grid.t_nodes.size(); ++j)
      os << grid.r_nodes[i] << ',' << grid.t_nodes[j] << ',' << grid.at(i, j) << '\n';
  os.precision(old_precision);
}

}  // namespace fhl

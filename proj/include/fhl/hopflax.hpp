#pragma once

// Classical Hopf-Lax formula u(x,t) = min_y { t L((x-y)/t) + g(y) } on a
// truncated working box: lattice scan followed by golden-section refinement.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fhl/convex.hpp"
#include "fhl/datum.hpp"
#include "fhl/geometry.hpp"

namespace fhl {

/// Golden-section refinement stops when the bracket is shorter than this.
inline constexpr double kRefinementTolerance = 1e-8;

struct MinResult {
  double value = 0.0;
  Point argmin;
  /// The minimiser sits on the box boundary (or the feasible ball leaves the
  /// box), so the truncated box may have cut off a better candidate.
  bool boundary_contaminated = false;
};

namespace detail {

template <class F>
double golden_min_arg(F&& f, double a, double b, double tol = kRefinementTolerance) {
  constexpr double r = 0.6180339887498949;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d; d = c; fd = fc;
      c = b - r * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + r * (b - a); fd = f(d);
    }
  }
  return fc < fd ? c : d;
}

struct Candidate {
  double value = kInfinity;
  Point y;
  void offer(double v, const Point& p) {
    if (v < value) value = v, y = p;
  }
};

inline bool on_box_boundary(const SpaceTimeGrid& grid, const Point& y) {
  const double eps = 1e-9 * std::max(1.0, grid.max_radius()) + kRefinementTolerance;
  for (int a = 0; a < grid.dimension; ++a) {
    const auto& iv = grid.box[static_cast<std::size_t>(a)];
    if (y[a] <= iv.lo + eps || y[a] >= iv.hi - eps) return true;
  }
  return false;
}

/// Lattice scan of objective over [lo, hi] (nodes of grid axis 0 plus both
/// ends) followed by golden-section refinement around the best node.
template <class F>
Candidate scan_refine_1d(F&& objective, const SpaceTimeGrid& grid, double lo, double hi) {
  Candidate best;
  if (lo > hi) return best;
  const auto& iv = grid.box[0];
  const std::size_t n = grid.nodes(0);
  const auto first = static_cast<std::size_t>(std::max(0.0, std::ceil((lo - iv.lo) / grid.dx - 1e-9)));
  for (std::size_t i = first; i < n; ++i) {
    const double y = grid.node(0, i);
    if (y > hi + 1e-12) break;
    best.offer(objective(y), Point::of(y));
  }
  best.offer(objective(lo), Point::of(lo));
  best.offer(objective(hi), Point::of(hi));
  const double a = std::max(lo, best.y[0] - grid.dx), b = std::min(hi, best.y[0] + grid.dx);
  if (b > a) {
    const double y = golden_min_arg(objective, a, b);
    best.offer(objective(y), Point::of(y));
  }
  return best;
}

inline MinResult minimize_1d(const InitialDatum& g, const LagrangianSpec& lag, const Point& x, double t,
                             const SpaceTimeGrid& grid) {
  auto objective = [&](double y) {
    return t * lag(Point::of((x[0] - y) / t)) + g(Point::of(y));
  };
  const auto& iv = grid.box[0];
  const double reach = lag.speed_limit() * t;
  double lo = iv.lo, hi = iv.hi;
  if (std::isfinite(reach)) lo = std::max(lo, x[0] - reach), hi = std::min(hi, x[0] + reach);
  auto best = scan_refine_1d(objective, grid, lo, hi);
  // Staying put is always feasible and is often the exact minimizer.
  best.offer(objective(x[0]), x);
  return {best.value, best.y, on_box_boundary(grid, best.y)};
}

inline MinResult minimize_2d(const InitialDatum& g, const LagrangianSpec& lag, const Point& x, double t,
                             const SpaceTimeGrid& grid) {
  auto objective = [&](const Point& y) {
    if (!grid.contains(y)) return kInfinity;
    return t * lag(Point::of((x[0] - y[0]) / t, (x[1] - y[1]) / t)) + g(y);
  };
  const double reach = lag.speed_limit() * t;
  const bool bounded = std::isfinite(reach);
  const std::size_t nx = grid.nodes(0), ny = grid.nodes(1);
  auto index_range = [&](int axis, std::size_t n, std::size_t& i0, std::size_t& i1) {
    const auto& iv = grid.box[static_cast<std::size_t>(axis)];
    if (!bounded) {
      i0 = 0, i1 = n - 1;
      return;
    }
    const double a = std::max(iv.lo, x[axis] - reach), b = std::min(iv.hi, x[axis] + reach);
    i0 = static_cast<std::size_t>(std::max(0.0, std::ceil((a - iv.lo) / grid.dx - 1e-9)));
    i1 = static_cast<std::size_t>(std::max(0.0, std::min(static_cast<double>(n - 1), std::floor((b - iv.lo) / grid.dx + 1e-9))));
  };
  std::size_t i0, i1, j0, j1;
  index_range(0, nx, i0, i1);
  index_range(1, ny, j0, j1);

  Candidate best;
  for (std::size_t j = j0; j <= j1 && j < ny; ++j)
    for (std::size_t i = i0; i <= i1 && i < nx; ++i) {
      const Point y = Point::of(grid.node(0, i), grid.node(1, j));
      if (bounded && distance(x, y) > reach) continue;
      best.offer(objective(y), y);
    }
  bool on_circle = false;
  double best_angle = 0.0, dtheta = 0.0;
  if (bounded && reach > 0.0) {
    const auto k = static_cast<std::size_t>(std::max(16.0, std::ceil(4.0 * std::numbers::pi * reach / grid.dx)));
    dtheta = 2.0 * std::numbers::pi / static_cast<double>(k);
    for (std::size_t m = 0; m < k; ++m) {
      const double th = dtheta * static_cast<double>(m);
      const Point y = Point::of(x[0] + reach * std::cos(th), x[1] + reach * std::sin(th));
      const double v = objective(y);
      if (v < best.value) {
        best.offer(v, y);
        on_circle = true;
        best_angle = th;
      }
    }
  }
  // Staying put is always feasible; it also covers balls smaller than the lattice spacing.
  best.offer(objective(x), x);

  if (on_circle) {
    auto along = [&](double th) {
      return objective(Point::of(x[0] + reach * std::cos(th), x[1] + reach * std::sin(th)));
    };
    const double th = golden_min_arg(along, best_angle - dtheta, best_angle + dtheta, kRefinementTolerance / std::max(reach, 1e-12));
    best.offer(along(th), Point::of(x[0] + reach * std::cos(th), x[1] + reach * std::sin(th)));
  }
  // Coordinate descent inside the feasible set.
  Point cur = best.y;
  for (int sweep = 0; sweep < 40; ++sweep) {
    const Point before = cur;
    for (int a = 0; a < 2; ++a) {
      const auto& iv = grid.box[static_cast<std::size_t>(a)];
      double lo = std::max(iv.lo, cur[a] - grid.dx), hi = std::min(iv.hi, cur[a] + grid.dx);
      if (bounded) {
        const double other = cur[1 - a] - x[1 - a];
        const double half = std::sqrt(std::max(0.0, reach * reach - other * other));
        lo = std::max(lo, x[a] - half), hi = std::min(hi, x[a] + half);
      }
      if (!(hi > lo)) continue;
      auto line = [&](double v) {
        Point y = cur;
        y[a] = v;
        return objective(y);
      };
      const double v = golden_min_arg(line, lo, hi);
      Point y = cur;
      y[a] = v;
      const double fy = objective(y);
      if (fy <= best.value) {
        best.offer(fy, y);
        cur = y;
      }
    }
    if (distance(before, cur) < kRefinementTolerance) break;
  }
  return {best.value, best.y, on_box_boundary(grid, best.y)};
}

}  // namespace detail

/// min_y { t L((x - y) / t) + g(y) } over the working box of `grid`.
inline MinResult hopf_lax(const InitialDatum& g, const LagrangianSpec& lag, const Point& x, double t,
                          const SpaceTimeGrid& grid) {
  if (!(t > 0.0)) throw DomainError("hopf_lax requires t > 0");
  if (!grid.contains(x)) throw DomainError("hopf_lax point lies outside the working box");
  return grid.dimension == 1 ? detail::minimize_1d(g, lag, x, t, grid) : detail::minimize_2d(g, lag, x, t, grid);
}

/// min { g(y) : |x - y| <= t }, the Hopf-Lax formula for H(p) = |p|.
inline MinResult eikonal_hopf_lax(const InitialDatum& g, const Point& x, double t, const SpaceTimeGrid& grid) {
  if (t < 0.0) throw DomainError("eikonal_hopf_lax requires t >= 0");
  if (t == 0.0) return {g(x), x, false};
  auto out = hopf_lax(g, LagrangianSpec::indicator_ball(1.0), x, t, grid);
  for (int a = 0; a < grid.dimension; ++a) {
    const auto& iv = grid.box[static_cast<std::size_t>(a)];
    if (x[a] - t < iv.lo || x[a] + t > iv.hi) out.boundary_contaminated = true;
  }
  return out;
}

enum class ClassicalTest { Test1, Test2 };

/// Closed-form classical solutions of the reference tests:
/// Test1: u = -(|x| + t)^2 (eikonal, g = -|x|^2);
/// Test2: H = |p|^2 / 2, g = max{0, x^2 - 1}. The minimizer is x / (1 + 2t)
/// while that lies outside [-1, 1] and the nearer end of [-1, 1] otherwise:
/// u = x^2 / (1 + 2t) - 1 for |x| >= 1 + 2t, (|x| - 1)^2 / (2t) for
/// 1 < |x| < 1 + 2t, and 0 for |x| <= 1.
inline double classical_reference(ClassicalTest test, const Point& x, double t) {
  if (t < 0.0) throw DomainError("classical_reference requires t >= 0");
  const double r = x.norm();
  switch (test) {
    case ClassicalTest::Test1: return -(r + t) * (r + t);
    case ClassicalTest::Test2:
      if (r <= 1.0) return 0.0;
      if (t == 0.0) return r * r - 1.0;
      if (r >= 1.0 + 2.0 * t) return r * r / (1.0 + 2.0 * t) - 1.0;
      return (r - 1.0) * (r - 1.0) / (2.0 * t);
  }
  throw DomainError("unknown classical test");
}

/// The simpler formula max{0, x^2 / (1 + 2t) - 1} often quoted for Test2. It
/// agrees with classical_reference only where |x| >= 1 + 2t or |x| <= 1.
inline double test2_quoted_formula(const Point& x, double t) {
  const double r = x.norm();
  return std::max(0.0, r * r / (1.0 + 2.0 * t) - 1.0);
}

}  // namespace fhl

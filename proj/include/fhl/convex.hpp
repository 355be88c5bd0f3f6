#pragma once

// Convex Hamiltonians, their Lagrangians, and the Legendre transform
// L(q) = sup_p { p.q - H(p) }.

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>
#include <vector>

#include "fhl/errors.hpp"
#include "fhl/geometry.hpp"

namespace fhl {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// A convex function of one variable given by samples, linearly interpolated.
struct ConvexTable {
  std::vector<double> x;
  std::vector<double> y;

  double first_slope() const { return (y[1] - y[0]) / (x[1] - x[0]); }
  double last_slope() const {
    const auto n = x.size();
    return (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2]);
  }

  void validate_convex() const {
    if (x.size() != y.size() || x.size() < 3) throw ValidationError("convex table needs >= 3 matching samples");
    for (std::size_t i = 1; i < x.size(); ++i)
      if (!(x[i] > x[i - 1])) throw ValidationError("convex table abscissae must increase");
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
      const double left = (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
      const double right = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
      if (right < left - 1e-12 * std::max(1.0, std::abs(left)))
        throw ValidationError("table is not convex (negative second difference)");
    }
  }

  /// Linear interpolation; +inf outside the sampled range.
  double operator()(double v) const {
    if (v < x.front() || v > x.back()) return kInfinity;
    const auto it = std::upper_bound(x.begin(), x.end(), v);
    if (it == x.end()) return y.back();
    const auto k = static_cast<std::size_t>(it - x.begin());
    const double w = (v - x[k - 1]) / (x[k] - x[k - 1]);
    return (1.0 - w) * y[k - 1] + w * y[k];
  }
};

class HamiltonianSpec {
 public:
  struct ScaledQuadratic {
    double c;  // H(p) = c |p|^2
  };
  struct Norm {};  // H(p) = |p|
  struct Sampled {
    ConvexTable table;
    double superlinear_margin;
  };
  using Kind = std::variant<ScaledQuadratic, Norm, Sampled>;

  static HamiltonianSpec scaled_quadratic(double c, int dimension = 1) {
    return HamiltonianSpec(ScaledQuadratic{c}, dimension);
  }
  static HamiltonianSpec norm(int dimension = 1) { return HamiltonianSpec(Norm{}, dimension); }
  /// One-dimensional sampled Hamiltonian; the last chord slope must exceed the
  /// first by `superlinear_margin`.
  static HamiltonianSpec sampled(ConvexTable table, double superlinear_margin = 1.0) {
    return HamiltonianSpec(Sampled{std::move(table), superlinear_margin}, 1);
  }

  const Kind& kind() const { return kind_; }
  int dimension() const { return dimension_; }

  double operator()(const Point& p) const {
    return std::visit(
        [&](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, ScaledQuadratic>) return k.c * (p[0] * p[0] + p[1] * p[1]);
          else if constexpr (std::is_same_v<K, Norm>) return p.norm();
          else return k.table(p[0]);
        },
        kind_);
  }

 private:
  HamiltonianSpec(Kind kind, int dimension) : kind_(std::move(kind)), dimension_(dimension) {
    if (dimension != 1 && dimension != 2) throw ValidationError("Hamiltonian dimension must be 1 or 2");
    if (const auto* q = std::get_if<ScaledQuadratic>(&kind_); q && !(q->c > 0.0))
      throw ValidationError("quadratic Hamiltonian needs c > 0");
    if (const auto* s = std::get_if<Sampled>(&kind_)) {
      s->table.validate_convex();
      if (!(s->table.last_slope() - s->table.first_slope() > s->superlinear_margin))
        throw ValidationError("sampled Hamiltonian is not superlinear over its range");
    }
  }

  Kind kind_;
  int dimension_;
};

class LagrangianSpec {
 public:
  struct ScaledQuadratic {
    double c;  // L(q) = c |q|^2
  };
  struct IndicatorBall {
    double radius;  // L(q) = 0 if |q| <= radius, +inf otherwise
  };
  struct Sampled {
    ConvexTable table;
  };
  using Kind = std::variant<ScaledQuadratic, IndicatorBall, Sampled>;

  static LagrangianSpec scaled_quadratic(double c) { return LagrangianSpec(ScaledQuadratic{c}); }
  static LagrangianSpec indicator_ball(double radius = 1.0) { return LagrangianSpec(IndicatorBall{radius}); }
  static LagrangianSpec sampled(ConvexTable table) { return LagrangianSpec(Sampled{std::move(table)}); }

  const Kind& kind() const { return kind_; }

  /// Radius of the feasible velocity ball for indicator Lagrangians, else +inf.
  double speed_limit() const {
    if (const auto* b = std::get_if<IndicatorBall>(&kind_)) return b->radius;
    return kInfinity;
  }

  double operator()(const Point& q) const {
    return std::visit(
        [&](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, ScaledQuadratic>) return k.c * (q[0] * q[0] + q[1] * q[1]);
          else if constexpr (std::is_same_v<K, IndicatorBall>) return q.norm() <= k.radius * (1.0 + 1e-12) ? 0.0 : kInfinity;
          else return k.table(q[0]);
        },
        kind_);
  }

  double at_zero() const { return (*this)(Point::of(0.0, 0.0)); }

 private:
  explicit LagrangianSpec(Kind kind) : kind_(std::move(kind)) {
    if (const auto* q = std::get_if<ScaledQuadratic>(&kind_); q && !(q->c > 0.0))
      throw ValidationError("quadratic Lagrangian needs c > 0");
    if (const auto* b = std::get_if<IndicatorBall>(&kind_); b && !(b->radius > 0.0))
      throw ValidationError("indicator ball needs a positive radius");
    if (const auto* s = std::get_if<Sampled>(&kind_)) s->table.validate_convex();
  }

  Kind kind_;
};

namespace detail {

// Golden-section maximisation of a concave function on [a, b].
template <class F>
double golden_max(F&& f, double a, double b, double tol = 1e-12) {
  constexpr double r = 0.6180339887498949;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol * std::max(1.0, std::abs(a) + std::abs(b))) {
    if (fc > fd) {
      b = d; d = c; fd = fc;
      c = b - r * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + r * (b - a); fd = f(d);
    }
  }
  return std::max({fc, fd, f(a), f(b)});
}

}  // namespace detail

/// sup_p { p.q - H(p) }. Returns +inf when the supremum diverges: |q| > 1 for the
/// norm, or q outside the range of chord slopes of a sampled table.
inline double legendre_transform(const HamiltonianSpec& h, const Point& q) {
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, HamiltonianSpec::ScaledQuadratic>) {
          return (q[0] * q[0] + q[1] * q[1]) / (4.0 * k.c);
        } else if constexpr (std::is_same_v<K, HamiltonianSpec::Norm>) {
          return q.norm() <= 1.0 + 1e-12 ? 0.0 : kInfinity;
        } else {
          const auto& t = k.table;
          const double v = q[0];
          // Beyond the extreme chord slopes the objective still grows at the edge
          // of the sampled range.
          if (v > t.last_slope() + 1e-12 || v < t.first_slope() - 1e-12) return kInfinity;
          std::size_t best = 0;
          double best_value = -kInfinity;
          for (std::size_t i = 0; i < t.x.size(); ++i) {
            const double val = t.x[i] * v - t.y[i];
            if (val > best_value) best_value = val, best = i;
          }
          const double lo = t.x[best == 0 ? 0 : best - 1];
          const double hi = t.x[std::min(best + 1, t.x.size() - 1)];
          const double refined = detail::golden_max([&](double p) { return p * v - t(p); }, lo, hi);
          return std::max(best_value, refined);
        }
      },
      h.kind());
}

/// The Lagrangian paired with H.
inline LagrangianSpec lagrangian_of(const HamiltonianSpec& h, std::size_t samples = 401) {
  return std::visit(
      [&](const auto& k) -> LagrangianSpec {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, HamiltonianSpec::ScaledQuadratic>) {
          return LagrangianSpec::scaled_quadratic(1.0 / (4.0 * k.c));
        } else if constexpr (std::is_same_v<K, HamiltonianSpec::Norm>) {
          return LagrangianSpec::indicator_ball(1.0);
        } else {
          ConvexTable table;
          const double lo = k.table.first_slope(), hi = k.table.last_slope();
          for (std::size_t i = 0; i < samples; ++i) {
            const double q = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
            table.x.push_back(q);
            table.y.push_back(legendre_transform(h, Point::of(q)));
          }
          return LagrangianSpec::sampled(std::move(table));
        }
      },
      h.kind());
}

}  // namespace fhl

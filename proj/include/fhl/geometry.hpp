#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "fhl/errors.hpp"

namespace fhl {

/// A point of R^1 or R^2; unused coordinates stay zero.
struct Point {
  std::array<double, 2> c{0.0, 0.0};
  int dim = 1;

  static Point of(double x) { return {{x, 0.0}, 1}; }
  static Point of(double x, double y) { return {{x, y}, 2}; }

  double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  double norm() const { return std::sqrt(c[0] * c[0] + c[1] * c[1]); }

  friend Point operator-(Point a, const Point& b) {
    a.c[0] -= b.c[0];
    a.c[1] -= b.c[1];
    return a;
  }
  friend Point operator+(Point a, const Point& b) {
    a.c[0] += b.c[0];
    a.c[1] += b.c[1];
    return a;
  }
  friend Point operator*(double s, Point a) {
    a.c[0] *= s;
    a.c[1] *= s;
    return a;
  }
};

inline double distance(const Point& a, const Point& b) { return (a - b).norm(); }

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Uniform space lattice with spacing dx on a box, plus output times.
struct SpaceTimeGrid {
  int dimension = 1;
  std::array<Interval, 2> box{};
  double dx = 0.01;
  std::vector<double> times;

  void validate() const {
    if (dimension != 1 && dimension != 2) throw ValidationError("grid dimension must be 1 or 2");
    if (!(dx > 0.0)) throw ValidationError("grid spacing must be positive");
    for (int a = 0; a < dimension; ++a) {
      const auto& iv = box[static_cast<std::size_t>(a)];
      if (!(iv.hi > iv.lo)) throw ValidationError("grid box is degenerate");
      const double cells = (iv.hi - iv.lo) / dx;
      if (std::abs(cells - std::round(cells)) > 1e-6 * std::max(1.0, cells))
        throw ValidationError("grid spacing does not divide the box extent");
    }
    for (std::size_t j = 0; j < times.size(); ++j)
      if (!(times[j] > 0.0) || (j > 0 && !(times[j] > times[j - 1])))
        throw ValidationError("grid times must be positive and strictly increasing");
  }

  std::size_t nodes(int axis) const {
    const auto& iv = box[static_cast<std::size_t>(axis)];
    return static_cast<std::size_t>(std::llround((iv.hi - iv.lo) / dx)) + 1;
  }

  double node(int axis, std::size_t i) const {
    const auto& iv = box[static_cast<std::size_t>(axis)];
    return i + 1 == nodes(axis) ? iv.hi : iv.lo + static_cast<double>(i) * dx;
  }

  std::size_t size() const { return dimension == 1 ? nodes(0) : nodes(0) * nodes(1); }

  /// Node k in row-major order (x index fastest).
  Point point(std::size_t k) const {
    if (dimension == 1) return Point::of(node(0, k));
    const std::size_t nx = nodes(0);
    return Point::of(node(0, k % nx), node(1, k / nx));
  }

  bool contains(const Point& p, double slack = 1e-12) const {
    for (int a = 0; a < dimension; ++a) {
      const auto& iv = box[static_cast<std::size_t>(a)];
      if (p[a] < iv.lo - slack || p[a] > iv.hi + slack) return false;
    }
    return true;
  }

  /// Largest distance from the origin to a point of the box.
  double max_radius() const {
    double s = 0.0;
    for (int a = 0; a < dimension; ++a) {
      const auto& iv = box[static_cast<std::size_t>(a)];
      const double m = std::max(std::abs(iv.lo), std::abs(iv.hi));
      s += m * m;
    }
    return std::sqrt(s);
  }

  static SpaceTimeGrid line(double lo, double hi, double dx, std::vector<double> times = {}) {
    SpaceTimeGrid g;
    g.dimension = 1;
    g.box[0] = {lo, hi};
    g.dx = dx;
    g.times = std::move(times);
    return g;
  }

  static SpaceTimeGrid square(double lo, double hi, double dx, std::vector<double> times = {}) {
    SpaceTimeGrid g;
    g.dimension = 2;
    g.box = {Interval{lo, hi}, Interval{lo, hi}};
    g.dx = dx;
    g.times = std::move(times);
    return g;
  }
};

}  // namespace fhl

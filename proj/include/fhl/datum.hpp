#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fhl/errors.hpp"
#include "fhl/geometry.hpp"

namespace fhl {

enum class DatumKind { Constant, NegSquare, ParabolaHinge, SignedCircle, TwoCircles, SampledGrid };

inline std::string to_string(DatumKind k) {
  switch (k) {
    case DatumKind::Constant: return "constant";
    case DatumKind::NegSquare: return "neg_square";
    case DatumKind::ParabolaHinge: return "parabola_hinge";
    case DatumKind::SignedCircle: return "signed_circle";
    case DatumKind::TwoCircles: return "two_circles";
    case DatumKind::SampledGrid: return "sampled_grid";
  }
  return "unknown";
}

/// Initial datum g together with its Lipschitz constant and bound on a working box.
///
/// NegSquare and SignedCircle are unbounded on R^d; they are only meaningful on
/// the explicit box they were built for.
class InitialDatum {
 public:
  static InitialDatum constant(double value, const SpaceTimeGrid& box) {
    InitialDatum g(DatumKind::Constant, box);
    g.constant_ = value;
    g.lipschitz_ = 0.0;
    g.bound_ = std::abs(value);
    return g;
  }

  /// g(x) = -|x|^2
  static InitialDatum neg_square(const SpaceTimeGrid& box) {
    InitialDatum g(DatumKind::NegSquare, box);
    const double r = box.max_radius();
    g.lipschitz_ = 2.0 * r;
    g.bound_ = r * r;
    return g;
  }

  /// g(x) = max{0, |x|^2 - 1}
  static InitialDatum parabola_hinge(const SpaceTimeGrid& box) {
    InitialDatum g(DatumKind::ParabolaHinge, box);
    const double r = box.max_radius();
    g.lipschitz_ = 2.0 * r;
    g.bound_ = std::max(0.0, r * r - 1.0);
    return g;
  }

  /// g(x) = |x|^2 - 1
  static InitialDatum signed_circle(const SpaceTimeGrid& box) {
    InitialDatum g(DatumKind::SignedCircle, box);
    const double r = box.max_radius();
    g.lipschitz_ = 2.0 * r;
    g.bound_ = std::max(1.0, r * r - 1.0);
    return g;
  }

  /// g(x) = min_i { |x - c_i|^2 - r_i^2 }
  static InitialDatum two_circles(std::vector<Point> centers, std::vector<double> radii, const SpaceTimeGrid& box) {
    if (centers.size() != radii.size() || centers.empty())
      throw ValidationError("two_circles needs matching centers and radii");
    InitialDatum g(DatumKind::TwoCircles, box);
    g.centers_ = std::move(centers);
    g.radii_ = std::move(radii);
    double far = 0.0, bound = 0.0;
    for (int cx = 0; cx < 2; ++cx)
      for (int cy = 0; cy < 2; ++cy) {
        Point corner = Point::of(cx ? box.box[0].hi : box.box[0].lo, cy ? box.box[1].hi : box.box[1].lo);
        corner.dim = box.dimension;
        for (const auto& c : g.centers_) far = std::max(far, distance(corner, c));
        bound = std::max(bound, std::abs(g(corner)));
      }
    for (double r : g.radii_) bound = std::max(bound, r * r);
    g.lipschitz_ = 2.0 * far;
    g.bound_ = bound;
    return g;
  }

  /// Values on the lattice of `box` (row-major, x fastest), bilinearly interpolated.
  static InitialDatum sampled(std::vector<double> values, double lipschitz, const SpaceTimeGrid& box) {
    if (values.size() != box.size()) throw ValidationError("sampled datum size does not match the lattice");
    if (!(lipschitz > 0.0)) throw ValidationError("sampled datum needs a positive Lipschitz constant");
    InitialDatum g(DatumKind::SampledGrid, box);
    g.samples_ = std::move(values);
    g.lipschitz_ = lipschitz;
    g.bound_ = 0.0;
    for (double v : g.samples_) g.bound_ = std::max(g.bound_, std::abs(v));
    return g;
  }

  DatumKind kind() const { return kind_; }
  int dimension() const { return box_.dimension; }
  double lipschitz_constant() const { return lipschitz_; }
  double bound() const { return bound_; }
  const SpaceTimeGrid& box() const { return box_; }
  const std::vector<Point>& centers() const { return centers_; }
  const std::vector<double>& radii() const { return radii_; }
  double constant_value() const { return constant_; }

  double operator()(const Point& x) const {
    switch (kind_) {
      case DatumKind::Constant: return constant_;
      case DatumKind::NegSquare: return -sq(x.norm());
      case DatumKind::ParabolaHinge: return std::max(0.0, sq(x.norm()) - 1.0);
      case DatumKind::SignedCircle: return sq(x.norm()) - 1.0;
      case DatumKind::TwoCircles: {
        double v = kInfinityValue;
        for (std::size_t i = 0; i < centers_.size(); ++i)
          v = std::min(v, sq(distance(x, centers_[i])) - sq(radii_[i]));
        return v;
      }
      case DatumKind::SampledGrid: return interpolate(x);
    }
    return 0.0;
  }

  /// r -> min of g over the closed ball B(x, r) for the analytic presets, with
  /// the distances from x to the centers computed once.
  struct BallProfile {
    DatumKind kind = DatumKind::Constant;
    double constant = 0.0;
    std::size_t count = 0;
    std::array<double, 4> dist{};
    std::array<double, 4> radius_sq{};

    double operator()(double r) const {
      switch (kind) {
        case DatumKind::Constant: return constant;
        case DatumKind::NegSquare: return -sq(dist[0] + r);
        case DatumKind::ParabolaHinge: return std::max(0.0, sq(std::max(dist[0] - r, 0.0)) - 1.0);
        case DatumKind::SignedCircle: return sq(std::max(dist[0] - r, 0.0)) - 1.0;
        case DatumKind::TwoCircles: {
          double v = kInfinityValue;
          for (std::size_t i = 0; i < count; ++i) v = std::min(v, sq(std::max(dist[i] - r, 0.0)) - radius_sq[i]);
          return v;
        }
        case DatumKind::SampledGrid: break;
      }
      return kInfinityValue;
    }
  };

  /// Empty for sampled data and for more than four circles.
  std::optional<BallProfile> ball_profile(const Point& x) const {
    BallProfile b;
    b.kind = kind_;
    b.constant = constant_;
    switch (kind_) {
      case DatumKind::SampledGrid: return std::nullopt;
      case DatumKind::TwoCircles:
        if (centers_.size() > b.dist.size()) return std::nullopt;
        b.count = centers_.size();
        for (std::size_t i = 0; i < b.count; ++i) b.dist[i] = distance(x, centers_[i]), b.radius_sq[i] = sq(radii_[i]);
        break;
      default:
        b.count = 1;
        b.dist[0] = x.norm();
    }
    return b;
  }

  /// Exact min of g over the closed ball B(x, r) for the analytic presets; empty
  /// for sampled data, which must be scanned.
  std::optional<double> ball_min(const Point& x, double r) const {
    if (kind_ == DatumKind::TwoCircles && centers_.size() > 4) {
      double v = kInfinityValue;
      for (std::size_t i = 0; i < centers_.size(); ++i)
        v = std::min(v, sq(std::max(distance(x, centers_[i]) - r, 0.0)) - sq(radii_[i]));
      return v;
    }
    if (auto b = ball_profile(x)) return (*b)(r);
    return std::nullopt;
  }

  /// Largest |g(x) - g(y)| / |x - y| over `pairs` random pairs in the box.
  double sampled_lipschitz(std::size_t pairs, std::uint64_t seed = 7) const {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(box_.box[0].lo, box_.box[0].hi);
    std::uniform_real_distribution<double> uy(box_.box[1].lo, box_.dimension == 2 ? box_.box[1].hi : box_.box[1].lo);
    double worst = 0.0;
    for (std::size_t k = 0; k < pairs; ++k) {
      Point a = Point::of(ux(rng), box_.dimension == 2 ? uy(rng) : 0.0);
      Point b = Point::of(ux(rng), box_.dimension == 2 ? uy(rng) : 0.0);
      a.dim = b.dim = box_.dimension;
      const double d = distance(a, b);
      if (d > 0.0) worst = std::max(worst, std::abs((*this)(a) - (*this)(b)) / d);
    }
    return worst;
  }

 private:
  static constexpr double kInfinityValue = 1e300;
  static double sq(double v) { return v * v; }

  InitialDatum(DatumKind kind, const SpaceTimeGrid& box) : kind_(kind), box_(box) {
    box_.validate();
  }

  double interpolate(const Point& x) const {
    const std::size_t nx = box_.nodes(0);
    auto locate = [&](int axis, double v, std::size_t& i, double& w) {
      const auto& iv = box_.box[static_cast<std::size_t>(axis)];
      const double s = std::clamp((v - iv.lo) / box_.dx, 0.0, static_cast<double>(box_.nodes(axis) - 1));
      i = std::min(static_cast<std::size_t>(s), box_.nodes(axis) - 2);
      w = s - static_cast<double>(i);
    };
    std::size_t i = 0, j = 0;
    double wx = 0.0, wy = 0.0;
    locate(0, x[0], i, wx);
    if (box_.dimension == 1) return (1.0 - wx) * samples_[i] + wx * samples_[i + 1];
    locate(1, x[1], j, wy);
    auto at = [&](std::size_t a, std::size_t b) { return samples_[b * nx + a]; };
    return (1.0 - wy) * ((1.0 - wx) * at(i, j) + wx * at(i + 1, j)) +
           wy * ((1.0 - wx) * at(i, j + 1) + wx * at(i + 1, j + 1));
  }

  DatumKind kind_;
  SpaceTimeGrid box_;
  double constant_ = 0.0;
  double lipschitz_ = 0.0;
  double bound_ = 0.0;
  std::vector<Point> centers_;
  std::vector<double> radii_;
  std::vector<double> samples_;
};

}  // namespace fhl

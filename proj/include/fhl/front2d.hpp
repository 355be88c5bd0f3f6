#pragma once

// Level sets of 2D eikonal solutions: field construction for classical and
// fractional time, marching-squares extraction and radius diagnostics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <unordered_map>
#include <vector>

#include "fhl/errors.hpp"
#include "fhl/fractional.hpp"
#include "fhl/geometry.hpp"
#include "fhl/parallel.hpp"
#include "fhl/stablelaw.hpp"

namespace fhl {

struct LevelSetContour {
  double time = 0.0;
  double level = 0.0;
  /// Each polyline keeps the region below `level` on its left. Closed curves
  /// repeat their first point at the end.
  std::vector<std::vector<Point>> polylines;
  bool touches_boundary = false;

  std::size_t point_count() const {
    std::size_t n = 0;
    for (const auto& p : polylines) n += p.size();
    return n;
  }
};

namespace detail {

struct Segment {
  std::uint64_t from_edge;
  std::uint64_t to_edge;
  Point from;
  Point to;
};

}  // namespace detail

/// Marching squares on the lattice of `grid` (values row-major, x fastest).
/// Crossings are linear along cell edges; a saddle cell is resolved by the
/// sign of its center value (mean of the four corners).
inline LevelSetContour extract_level_set(const std::vector<double>& values, const SpaceTimeGrid& grid, double level,
                                         double time = 0.0) {
  if (grid.dimension != 2) throw DomainError("extract_level_set needs a 2D grid");
  const std::size_t nx = grid.nodes(0), ny = grid.nodes(1);
  if (values.size() != nx * ny) throw DomainError("field size does not match the grid");
  for (double v : values)
    if (!std::isfinite(v)) throw DomainError("field must be finite for level-set extraction");

  auto val = [&](std::size_t i, std::size_t j) { return values[j * nx + i]; };
  auto pos = [&](std::size_t i, std::size_t j) { return Point::of(grid.node(0, i), grid.node(1, j)); };
  // Edge ids: horizontal edge from node (i, j) is 2k, vertical edge is 2k + 1.
  auto h_edge = [&](std::size_t i, std::size_t j) { return std::uint64_t{2} * (j * nx + i); };
  auto v_edge = [&](std::size_t i, std::size_t j) { return std::uint64_t{2} * (j * nx + i) + 1; };
  auto cross = [&](const Point& a, double fa, const Point& b, double fb) {
    const double w = (level - fa) / (fb - fa);
    return a + w * (b - a);
  };

  std::vector<detail::Segment> segs;
  for (std::size_t j = 0; j + 1 < ny; ++j)
    for (std::size_t i = 0; i + 1 < nx; ++i) {
      // Corners counter-clockwise: 0 (i,j), 1 (i+1,j), 2 (i+1,j+1), 3 (i,j+1).
      const std::array<Point, 4> p{pos(i, j), pos(i + 1, j), pos(i + 1, j + 1), pos(i, j + 1)};
      const std::array<double, 4> f{val(i, j), val(i + 1, j), val(i + 1, j + 1), val(i, j + 1)};
      std::array<bool, 4> below{};
      int mask = 0;
      for (int k = 0; k < 4; ++k) {
        below[static_cast<std::size_t>(k)] = f[static_cast<std::size_t>(k)] < level;
        mask |= below[static_cast<std::size_t>(k)] ? 1 << k : 0;
      }
      if (mask == 0 || mask == 15) continue;
      // Edge e joins corner e and corner e+1.
      const std::array<std::uint64_t, 4> edge_id{h_edge(i, j), v_edge(i + 1, j), h_edge(i, j + 1), v_edge(i, j)};
      auto edge_point = [&](int e) {
        const auto a = static_cast<std::size_t>(e), b = static_cast<std::size_t>((e + 1) % 4);
        return cross(p[a], f[a], p[b], f[b]);
      };
      // Segment between edges ea and eb, oriented so that `below_ref` is on the left
      // when below_is_left, else on the right.
      auto emit = [&](int ea, int eb, const Point& ref, bool ref_below) {
        Point a = edge_point(ea), b = edge_point(eb);
        std::uint64_t ia = edge_id[static_cast<std::size_t>(ea)], ib = edge_id[static_cast<std::size_t>(eb)];
        const Point d = b - a, r = ref - a;
        const double side = d[0] * r[1] - d[1] * r[0];
        if ((side > 0.0) != ref_below) std::swap(a, b), std::swap(ia, ib);
        segs.push_back({ia, ib, a, b});
      };
      // Corner k is adjacent to edges k-1 and k.
      auto isolate = [&](int k) {
        emit((k + 3) % 4, k, p[static_cast<std::size_t>(k)], below[static_cast<std::size_t>(k)]);
      };
      const int count = below[0] + below[1] + below[2] + below[3];
      if (count == 1 || count == 3) {
        for (int k = 0; k < 4; ++k)
          if (below[static_cast<std::size_t>(k)] == (count == 1)) isolate(k);
      } else if (below[0] == below[2]) {
        const double center = 0.25 * (f[0] + f[1] + f[2] + f[3]);
        const bool center_below = center < level;
        for (int k = 0; k < 4; ++k)
          if (below[static_cast<std::size_t>(k)] != center_below) isolate(k);
      } else {
        // Two adjacent corners below: the segment crosses the two edges with a sign change.
        std::array<int, 2> es{};
        int n = 0;
        for (int e = 0; e < 4; ++e)
          if (below[static_cast<std::size_t>(e)] != below[static_cast<std::size_t>((e + 1) % 4)]) es[static_cast<std::size_t>(n++)] = e;
        int ref = 0;
        while (!below[static_cast<std::size_t>(ref)]) ++ref;
        emit(es[0], es[1], p[static_cast<std::size_t>(ref)], true);
      }
    }

  LevelSetContour out;
  out.time = time;
  out.level = level;
  std::unordered_map<std::uint64_t, std::size_t> by_start;
  std::unordered_map<std::uint64_t, std::size_t> by_end;
  for (std::size_t k = 0; k < segs.size(); ++k) by_start[segs[k].from_edge] = k, by_end[segs[k].to_edge] = k;
  std::vector<char> used(segs.size(), 0);
  auto trace = [&](std::size_t k) {
    std::vector<Point> line{segs[k].from};
    const std::uint64_t first = segs[k].from_edge;
    while (true) {
      used[k] = 1;
      line.push_back(segs[k].to);
      if (segs[k].to_edge == first) break;
      const auto it = by_start.find(segs[k].to_edge);
      if (it == by_start.end() || used[it->second]) break;
      k = it->second;
    }
    out.polylines.push_back(std::move(line));
  };
  // Open chains start at segments with no predecessor, then closed loops.
  for (std::size_t k = 0; k < segs.size(); ++k)
    if (!by_end.count(segs[k].from_edge)) trace(k);
  for (std::size_t k = 0; k < segs.size(); ++k)
    if (!used[k]) trace(k);

  const double eps = grid.dx;
  for (const auto& line : out.polylines)
    for (const auto& q : line)
      for (int a = 0; a < 2; ++a) {
        const auto& iv = grid.box[static_cast<std::size_t>(a)];
        if (q[a] <= iv.lo + eps || q[a] >= iv.hi - eps) out.touches_boundary = true;
      }
  return out;
}

struct FrontOptions {
  /// Empty for classical time.
  std::optional<FractionalOrder> beta;
  QuadratureConfig quadrature{std::nullopt, 2000};
  StablePdfConfig density;
  double level = 0.0;
};

/// u(., t) (classical) or u_beta(., t) on the lattice of `grid`.
inline std::vector<double> front_field(const Problem& p, const SpaceTimeGrid& grid, double t, const FrontOptions& opt) {
  if (grid.dimension != 2) throw DomainError("front fields are two-dimensional");
  if (t < 0.0) throw DomainError("front times must be nonnegative");
  std::vector<double> v(grid.size());
  const std::size_t nx = grid.nodes(0), ny = grid.nodes(1);
  if (!opt.beta || t == 0.0) {
    parallel_for(ny, opt.quadrature.workers, [&](std::size_t j) {
      for (std::size_t i = 0; i < nx; ++i) v[j * nx + i] = p.classical(grid.point(j * nx + i), t);
    });
    return v;
  }
  const auto dens = density_for(*opt.beta, {t}, opt.quadrature, opt.density);
  parallel_for(ny, opt.quadrature.workers, [&](std::size_t j) {
    for (std::size_t i = 0; i < nx; ++i) v[j * nx + i] = problem_quadrature(p, grid.point(j * nx + i), dens, 0);
  });
  return v;
}

/// Zero level sets (or opt.level) of the eikonal solution at each of `times`.
inline std::vector<LevelSetContour> evolve_front(const Problem& p, const std::vector<double>& times,
                                                 const SpaceTimeGrid& grid, const FrontOptions& opt = {}) {
  if (grid.dimension != 2 || p.dimension() != 2) throw ValidationError("evolve_front needs a 2D problem and grid");
  grid.validate();
  for (std::size_t j = 0; j < times.size(); ++j)
    if (times[j] < 0.0 || (j > 0 && !(times[j] > times[j - 1])))
      throw ValidationError("front times must be nonnegative and increasing");
  std::vector<LevelSetContour> out;
  for (double t : times) out.push_back(extract_level_set(front_field(p, grid, t, opt), grid, opt.level, t));
  return out;
}

struct RadiusSample {
  double time = 0.0;
  double mean_radius = 0.0;
  double deviation = 0.0;  // max |distance to centroid - mean_radius|
  Point centroid;
};

inline RadiusSample contour_radius(const LevelSetContour& c) {
  std::vector<Point> pts;
  for (const auto& line : c.polylines) {
    // Closed curves repeat their first point; count it once.
    const bool closed = line.size() > 2 && distance(line.front(), line.back()) == 0.0;
    pts.insert(pts.end(), line.begin(), closed ? line.end() - 1 : line.end());
  }
  if (pts.empty()) throw ValidationError("radius of an empty contour");
  RadiusSample r;
  r.time = c.time;
  Point m = Point::of(0.0, 0.0);
  for (const auto& q : pts) m = m + q;
  r.centroid = (1.0 / static_cast<double>(pts.size())) * m;
  for (const auto& q : pts) r.mean_radius += distance(q, r.centroid);
  r.mean_radius /= static_cast<double>(pts.size());
  for (const auto& q : pts) r.deviation = std::max(r.deviation, std::abs(distance(q, r.centroid) - r.mean_radius));
  return r;
}

inline std::vector<RadiusSample> radius_series(const std::vector<LevelSetContour>& contours) {
  std::vector<RadiusSample> out;
  for (const auto& c : contours) out.push_back(contour_radius(c));
  return out;
}

/// CSV rows time,polyline,x,y.
inline void write_contours_csv(std::ostream& os, const std::vector<LevelSetContour>& contours) {
  const auto old = os.precision(17);
  os << "time,polyline,x,y\n";
  for (const auto& c : contours)
    for (std::size_t k = 0; k < c.polylines.size(); ++k)
      for (const auto& q : c.polylines[k]) os << c.time << ',' << k << ',' << q[0] << ',' << q[1] << '\n';
  os.precision(old);
}

/// A matplotlib script drawing every contour of `csv_name`, equal aspect.
inline void write_contour_plot_script(std::ostream& os, const std::string& csv_name, const std::string& png_name) {
  os << "import csv\n"
        "from collections import defaultdict\n"
        "import matplotlib\n"
        "matplotlib.use('Agg')\n"
        "import matplotlib.pyplot as plt\n\n"
        "lines = defaultdict(list)\n"
        "with open('" << csv_name << "') as f:\n"
        "    for row in csv.DictReader(f):\n"
        "        lines[(float(row['time']), int(row['polyline']))].append((float(row['x']), float(row['y'])))\n\n"
        "times = sorted({t for t, _ in lines})\n"
        "cmap = plt.get_cmap('viridis')\n"
        "fig, ax = plt.subplots(figsize=(6, 6))\n"
        "for (t, k), pts in sorted(lines.items()):\n"
        "    xs, ys = zip(*pts)\n"
        "    color = cmap(times.index(t) / max(1, len(times) - 1))\n"
        "    ax.plot(xs, ys, color=color, lw=1, label=f't={t:g}' if k == 0 else None)\n"
        "ax.set_aspect('equal')\n"
        "ax.legend(fontsize=7)\n"
        "fig.savefig('" << png_name << "', dpi=150)\n";
}

}  // namespace fhl

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "percnet/corridor.hpp"
#include "percnet/lattice.hpp"
#include "percnet/routing.hpp"

namespace percnet {

struct LoadMap {
  std::vector<std::uint32_t> load;           // per-cell path incidences L_i
  std::vector<std::uint32_t> corridor_hits;  // per-cell intersecting corridors
  std::uint32_t l_max = 0;
  std::uint32_t max_pair_cell_incidence = 0;  // per-(pair, cell) maximum
  bool nine_diamond_bound_ok = true;          // L_i <= 9 * corridor_hits[i]
};

// Exact rotated-rectangle vs axis-aligned-square overlap (separating axes).
inline bool corridor_intersects_cell(const Corridor& cor, double x0, double y0,
                                     double c) {
  const Vec2 corners_cell[4] = {{x0, y0}, {x0 + c, y0}, {x0 + c, y0 + c}, {x0, y0 + c}};
  const Vec2 corners_cor[4] = {cor.to_world({0, 0}), cor.to_world({cor.length, 0}),
                               cor.to_world({cor.length, cor.width}),
                               cor.to_world({0, cor.width})};
  const Vec2 axes[4] = {{1, 0}, {0, 1}, cor.axis, perp(cor.axis)};
  for (const Vec2& ax : axes) {
    double amin = 1e300, amax = -1e300, bmin = 1e300, bmax = -1e300;
    for (const Vec2& p : corners_cell) {
      const double v = dot(p, ax);
      amin = std::min(amin, v);
      amax = std::max(amax, v);
    }
    for (const Vec2& p : corners_cor) {
      const double v = dot(p, ax);
      bmin = std::min(bmin, v);
      bmax = std::max(bmax, v);
    }
    if (amax < bmin || bmax < amin) return false;
  }
  return true;
}

// Visits every grid cell intersecting the corridor rectangle, rasterizing by
// grid rows so the cost is proportional to the corridor area, not its
// bounding box.
template <typename Fn>
inline void for_each_corridor_cell(const Corridor& cor, const SquareGrid& grid,
                                   Fn&& fn) {
  const double c = grid.side_c;
  const Vec2 corners[4] = {cor.to_world({0, 0}), cor.to_world({cor.length, 0}),
                           cor.to_world({cor.length, cor.width}),
                           cor.to_world({0, cor.width})};
  double ymin = 1e300, ymax = -1e300;
  for (const auto& p : corners) {
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const int cy_lo = std::max(0, int(std::floor(ymin / c)) - grid.gmin - 1);
  const int cy_hi = std::min(grid.nside - 1, int(std::floor(ymax / c)) - grid.gmin + 1);
  for (int cy = cy_lo; cy <= cy_hi; ++cy) {
    const double band_lo = (cy + grid.gmin) * c;
    const double band_hi = band_lo + c;
    // x-extent of the rectangle within this horizontal band: scan the four
    // edges, collecting x of vertices inside the band and edge/band crossings.
    double xmin = 1e300, xmax = -1e300;
    for (int e = 0; e < 4; ++e) {
      const Vec2& a = corners[e];
      const Vec2& b = corners[(e + 1) % 4];
      if (a.y >= band_lo && a.y <= band_hi) {
        xmin = std::min(xmin, a.x);
        xmax = std::max(xmax, a.x);
      }
      for (double yb : {band_lo, band_hi}) {
        if ((a.y - yb) * (b.y - yb) < 0) {
          const double t = (yb - a.y) / (b.y - a.y);
          const double x = a.x + t * (b.x - a.x);
          xmin = std::min(xmin, x);
          xmax = std::max(xmax, x);
        }
      }
    }
    if (xmin > xmax) continue;
    const int cx_lo = std::max(0, int(std::floor(xmin / c)) - grid.gmin - 1);
    const int cx_hi = std::min(grid.nside - 1, int(std::floor(xmax / c)) - grid.gmin + 1);
    for (int cx = cx_lo; cx <= cx_hi; ++cx) {
      const double x0 = (cx + grid.gmin) * c;
      if (corridor_intersects_cell(cor, x0, band_lo, c))
        fn(grid.cell_index(cx, cy));
    }
  }
}

// Per-cell loading factors from remapped routes. When the per-pair corridors
// are supplied, also counts corridor-cell intersections and checks the
// 9-diamond cap: incidences from one pair <= 9 per cell and
// L_i <= 9 * (corridors intersecting cell i).
inline LoadMap compute_load(const std::vector<RouteSet>& route_sets,
                            const SquareGrid& grid,
                            const std::vector<Vec2>& nodes,
                            const std::vector<Corridor>* corridors = nullptr) {
  if (corridors && corridors->size() != route_sets.size())
    throw std::invalid_argument("compute_load: corridors must parallel route_sets");
  LoadMap lm;
  lm.load.assign(grid.cell_count(), 0);
  lm.corridor_hits.assign(grid.cell_count(), 0);

  std::vector<std::size_t> pair_cells;  // scratch
  for (std::size_t pi = 0; pi < route_sets.size(); ++pi) {
    const RouteSet& rs = route_sets[pi];
    if (!rs.remapped && !rs.paths.empty())
      throw std::invalid_argument("compute_load: routes must be remapped to relays");
    pair_cells.clear();
    for (const auto& p : rs.paths) {
      for (std::uint32_t idx : p.node_seq) {
        const std::size_t ci = grid.cell_of(nodes[idx]);
        if (grid.relay[ci] != std::int64_t(idx))
          throw std::logic_error("compute_load: route node is not its cell's relay");
        ++lm.load[ci];
        pair_cells.push_back(ci);
      }
    }
    std::sort(pair_cells.begin(), pair_cells.end());
    for (std::size_t i = 0; i < pair_cells.size();) {
      std::size_t j = i;
      while (j < pair_cells.size() && pair_cells[j] == pair_cells[i]) ++j;
      lm.max_pair_cell_incidence =
          std::max<std::uint32_t>(lm.max_pair_cell_incidence, std::uint32_t(j - i));
      i = j;
    }
    if (corridors)
      for_each_corridor_cell((*corridors)[pi], grid,
                             [&](std::size_t ci) { ++lm.corridor_hits[ci]; });
  }
  for (std::uint32_t l : lm.load) lm.l_max = std::max(lm.l_max, l);
  if (corridors) {
    for (std::size_t i = 0; i < lm.load.size(); ++i)
      if (lm.load[i] > 9 * lm.corridor_hits[i]) {
        lm.nine_diamond_bound_ok = false;
        break;
      }
  }
  return lm;
}

// Theorem 4 bound with delta = 27*pi.
inline double load_bound(double n) {
  if (!(n > 1)) throw std::invalid_argument("load_bound: n must be > 1");
  return 27.0 * M_PI * std::sqrt(n) * std::log(n);
}

// Lemma 3 uniform bound on the corridor-cell intersection probability:
// mu*ln(n)/sqrt(n), mu = c*(2 + 2*sqrt(2)*kappa/pi).
inline double corridor_intersect_prob_bound(double n, double c, double kappa) {
  if (!(c > 1.0 / std::sqrt(2.0)))
    throw std::invalid_argument("corridor_intersect_prob_bound: requires c > 1/sqrt(2)");
  const double mu = c * (2.0 + 2.0 * std::sqrt(2.0) * kappa / M_PI);
  return mu * std::log(n) / std::sqrt(n);
}

// Heat-map data: "x,y,load" per cell intersecting the disk.
inline void load_to_csv(const LoadMap& lm, const SquareGrid& grid,
                        std::ostream& os) {
  os << "cell_x,cell_y,load\n";
  for (int cy = 0; cy < grid.nside; ++cy)
    for (int cx = 0; cx < grid.nside; ++cx) {
      const std::size_t ci = grid.cell_index(cx, cy);
      os << (cx + grid.gmin) << ',' << (cy + grid.gmin) << ',' << lm.load[ci]
         << '\n';
    }
}

}  // namespace percnet

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "percnet/corridor.hpp"
#include "percnet/geometry.hpp"

namespace percnet {

// Diamond tessellation of a routing corridor. A diamond is a side-c square
// rotated 45 degrees; diamonds sit around the edges of an axis-aligned lattice
// of spacing sqrt(2)*c in the corridor frame. Diamonds whose long diagonal is
// a horizontal lattice edge are indexed (r, j) with r in [0, rows), j in
// [0, cols); the interlocking vertical-edge diamonds are indexed (r, j) with
// r in [0, rows-1), j in [0, cols-1). Together they tile the corridor interior.
struct DiamondLattice {
  Corridor frame;
  double side_c = 0.0;
  int rows = 0;
  int cols = 0;
  // occupant node index per diamond, -1 if empty; open(diamond) == occupied.
  std::vector<std::int64_t> h_occ;  // rows*cols, row-major
  std::vector<std::int64_t> v_occ;  // (rows-1)*(cols-1), row-major

  double spacing() const { return std::sqrt(2.0) * side_c; }

  std::int64_t h_occupant(int r, int j) const { return h_occ[std::size_t(r) * cols + j]; }
  std::int64_t v_occupant(int r, int j) const {
    return v_occ[std::size_t(r) * (cols - 1) + j];
  }
  bool h_open(int r, int j) const { return h_occupant(r, j) >= 0; }
  bool v_open(int r, int j) const { return v_occupant(r, j) >= 0; }

  std::size_t diamond_count() const { return h_occ.size() + v_occ.size(); }
  std::size_t open_count() const {
    std::size_t n = 0;
    for (auto o : h_occ) n += o >= 0;
    for (auto o : v_occ) n += o >= 0;
    return n;
  }

  // Center of a diamond in corridor-local coordinates.
  Vec2 h_center(int r, int j) const {
    const double s = spacing();
    return {(j + 0.5) * s, (r + 0.5) * s};
  }
  Vec2 v_center(int r, int j) const {
    const double s = spacing();
    return {(j + 1.0) * s, (r + 1.0) * s};
  }
};

struct DiamondRef {
  bool horizontal = true;
  int r = 0;
  int j = 0;
};

// Maps a corridor-local point to the diamond containing it, or returns false
// if the point falls in a clipped boundary region outside the indexed tiling.
inline bool locate_diamond(const DiamondLattice& lat, const Vec2& local,
                           DiamondRef& out) {
  const double c = lat.side_c;
  // Rotate 45 degrees: diamonds become axis-aligned side-c squares whose
  // centers lie on the integer lattice (a*c, b*c).
  const double u = (local.x + local.y) / std::sqrt(2.0);
  const double w = (local.y - local.x) / std::sqrt(2.0);
  const long a = long(std::floor(u / c + 0.5));
  const long b = long(std::floor(w / c + 0.5));
  if ((a + b) % 2 != 0) {  // a+b odd: horizontal-edge diamond
    const long r = (a + b - 1) / 2;
    const long j = (a - b - 1) / 2;
    if (r < 0 || r >= lat.rows || j < 0 || j >= lat.cols) return false;
    out = {true, int(r), int(j)};
  } else {
    const long r = (a + b - 2) / 2;
    const long j = (a - b - 2) / 2;
    if (r < 0 || r >= lat.rows - 1 || j < 0 || j >= lat.cols - 1) return false;
    out = {false, int(r), int(j)};
  }
  return true;
}

// Tessellates the corridor and marks each diamond open iff it contains a node.
// When several nodes fall in one diamond the lowest node index becomes the
// occupant. `candidates` restricts which node indices are considered (the full
// list is scanned when empty).
inline DiamondLattice tessellate_corridor(
    const Corridor& corridor, double c, const std::vector<Vec2>& nodes,
    const std::vector<std::size_t>& candidates = {}) {
  if (!(c > 0)) throw std::invalid_argument("tessellate_corridor: c must be > 0");
  DiamondLattice lat;
  lat.frame = corridor;
  lat.side_c = c;
  const double s = lat.spacing();
  lat.rows = int(std::floor(corridor.width / s + 1e-9));
  lat.cols = int(std::floor(corridor.length / s + 1e-9));
  if (lat.rows < 1)
    throw std::invalid_argument(
        "tessellate_corridor: corridor too narrow for one diamond row");
  if (lat.cols < 1)
    throw std::invalid_argument(
        "tessellate_corridor: corridor too short for one diamond column");
  lat.h_occ.assign(std::size_t(lat.rows) * lat.cols, -1);
  lat.v_occ.assign(std::size_t(std::max(lat.rows - 1, 0)) * std::max(lat.cols - 1, 0), -1);

  auto consider = [&](std::size_t idx) {
    const Vec2 local = corridor.to_local(nodes[idx]);
    DiamondRef ref;
    if (!locate_diamond(lat, local, ref)) return;
    std::int64_t& occ = ref.horizontal
                            ? lat.h_occ[std::size_t(ref.r) * lat.cols + ref.j]
                            : lat.v_occ[std::size_t(ref.r) * (lat.cols - 1) + ref.j];
    if (occ < 0 || std::int64_t(idx) < occ) occ = std::int64_t(idx);
  };
  if (candidates.empty()) {
    for (std::size_t i = 0; i < nodes.size(); ++i) consider(i);
  } else {
    for (std::size_t i : candidates) consider(i);
  }
  return lat;
}

// ---------------------------------------------------------------------------

// Percolation bond graph of a lattice: one edge per diamond, open iff the
// diamond is open. Vertices live on the tracks y = (r+1/2)*spacing at
// x = i*spacing; a lengthwise crossing is an open edge path from the left
// boundary (i = left_col) to the right boundary (i = right_col).
struct BondEdge {
  int u = 0;
  int v = 0;
  bool horizontal = true;
  DiamondRef diamond;
  bool open = false;
};

struct BondGraph {
  int rows = 0;
  int cols = 0;      // columns of the underlying lattice
  int left_col = 0;  // boundary column indices (vertex x = col * spacing)
  int right_col = 0;
  std::vector<BondEdge> edges;
  std::vector<int> left_boundary;   // vertex ids
  std::vector<int> right_boundary;

  int vertex_id(int r, int i) const { return r * (cols + 1) + i; }
  int vertex_count() const { return rows * (cols + 1); }
  std::size_t open_edge_count() const {
    std::size_t n = 0;
    for (const auto& e : edges) n += e.open;
    return n;
  }
};

// Builds the bond graph for columns [j_lo, j_hi] of the lattice (defaults to
// the full corridor). Horizontal edges come from the horizontal-edge diamonds
// in those columns; vertical edges from the interlocking diamonds at interior
// vertex columns.
inline BondGraph build_bond_graph(const DiamondLattice& lat, int j_lo = 0,
                                  int j_hi = -1) {
  if (j_hi < 0) j_hi = lat.cols - 1;
  if (j_lo < 0 || j_hi >= lat.cols || j_lo > j_hi)
    throw std::invalid_argument("build_bond_graph: bad column range");
  BondGraph g;
  g.rows = lat.rows;
  g.cols = lat.cols;
  g.left_col = j_lo;
  g.right_col = j_hi + 1;
  for (int r = 0; r < lat.rows; ++r) {
    g.left_boundary.push_back(g.vertex_id(r, g.left_col));
    g.right_boundary.push_back(g.vertex_id(r, g.right_col));
  }
  for (int r = 0; r < lat.rows; ++r)
    for (int j = j_lo; j <= j_hi; ++j)
      g.edges.push_back({g.vertex_id(r, j), g.vertex_id(r, j + 1), true,
                         {true, r, j}, lat.h_open(r, j)});
  for (int r = 0; r + 1 < lat.rows; ++r)
    for (int j = std::max(j_lo, 0); j <= std::min(j_hi - 1, lat.cols - 2); ++j)
      g.edges.push_back({g.vertex_id(r, j + 1), g.vertex_id(r + 1, j + 1), false,
                         {false, r, j}, lat.v_open(r, j)});
  return g;
}

// ---------------------------------------------------------------------------

// Global tessellation of the network region into side-c squares. Every
// nonempty cell designates its lowest-index node as the relay.
struct SquareGrid {
  double side_c = 0.0;
  double region_radius = 0.0;
  int gmin = 0;  // lowest cell coordinate on each axis
  int nside = 0; // cells per side
  std::vector<std::vector<std::uint32_t>> cell_nodes;
  std::vector<std::int64_t> relay;  // -1 for empty cells

  int coord_of(double x) const { return int(std::floor(x / side_c)) - gmin; }
  bool in_range(int cx, int cy) const {
    return cx >= 0 && cx < nside && cy >= 0 && cy < nside;
  }
  std::size_t cell_index(int cx, int cy) const {
    return std::size_t(cy) * nside + cx;
  }
  std::size_t cell_of(const Vec2& p) const {
    return cell_index(coord_of(p.x), coord_of(p.y));
  }
  std::pair<int, int> cell_coords(const Vec2& p) const {
    return {coord_of(p.x), coord_of(p.y)};
  }
  std::int64_t relay_of(const Vec2& p) const { return relay[cell_of(p)]; }
  std::size_t cell_count() const { return relay.size(); }

  int manhattan_cells(const Vec2& a, const Vec2& b) const {
    auto [ax, ay] = cell_coords(a);
    auto [bx, by] = cell_coords(b);
    return std::abs(ax - bx) + std::abs(ay - by);
  }

  // Number of grid cells that intersect the disk.
  std::size_t cells_in_disk() const {
    std::size_t count = 0;
    for (int cy = 0; cy < nside; ++cy)
      for (int cx = 0; cx < nside; ++cx) {
        const double x0 = (cx + gmin) * side_c, x1 = x0 + side_c;
        const double y0 = (cy + gmin) * side_c, y1 = y0 + side_c;
        const double nx = std::max(x0, std::min(0.0, x1));
        const double ny = std::max(y0, std::min(0.0, y1));
        if (nx * nx + ny * ny <= region_radius * region_radius) ++count;
      }
    return count;
  }
};

inline SquareGrid tessellate_squares(double region_radius, double c,
                                     const std::vector<Vec2>& nodes) {
  if (!(c > 0)) throw std::invalid_argument("tessellate_squares: c must be > 0");
  SquareGrid grid;
  grid.side_c = c;
  grid.region_radius = region_radius;
  grid.gmin = int(std::floor(-region_radius / c)) - 1;
  const int gmax = int(std::floor(region_radius / c)) + 1;
  grid.nside = gmax - grid.gmin + 1;
  grid.cell_nodes.assign(std::size_t(grid.nside) * grid.nside, {});
  grid.relay.assign(std::size_t(grid.nside) * grid.nside, -1);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::size_t ci = grid.cell_of(nodes[i]);
    grid.cell_nodes[ci].push_back(std::uint32_t(i));
    if (grid.relay[ci] < 0) grid.relay[ci] = std::int64_t(i);  // lowest index
  }
  return grid;
}

// Debug/test dump: dims plus open bitmaps (row-major) and occupant indices.
inline nlohmann::json lattice_to_json(const DiamondLattice& lat) {
  nlohmann::json j;
  j["c"] = lat.side_c;
  j["rows"] = lat.rows;
  j["cols"] = lat.cols;
  auto dump = [](const std::vector<std::int64_t>& occ) {
    nlohmann::json open = nlohmann::json::array();
    nlohmann::json occupant = nlohmann::json::array();
    for (auto o : occ) {
      open.push_back(o >= 0);
      occupant.push_back(o);
    }
    return std::pair{open, occupant};
  };
  auto [ho, hc] = dump(lat.h_occ);
  auto [vo, vc] = dump(lat.v_occ);
  j["h_open"] = ho;
  j["h_occupant"] = hc;
  j["v_open"] = vo;
  j["v_occupant"] = vc;
  return j;
}

}  // namespace percnet

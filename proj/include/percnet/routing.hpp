#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "percnet/corridor.hpp"
#include "percnet/lattice.hpp"
#include "percnet/percolation.hpp"

namespace percnet {

// One crossing converted to node level. node_seq holds node indices; after
// designate_endpoints the sequence runs draining node -> ... -> delivery node.
struct RoutePath {
  std::vector<std::uint32_t> node_seq;
  std::int64_t draining_node = -1;
  std::int64_t delivery_node = -1;
  std::vector<double> hop_lengths;       // Euclidean, intermediate hops
  double drain_hop = 0.0;                // source -> draining node
  double deliver_hop = 0.0;              // delivery node -> destination
  double drain_hop_manhattan = 0.0;      // in corridor-frame |dx|+|dy|
  double deliver_hop_manhattan = 0.0;
  int drain_cells = 0;                   // Manhattan distance in grid cells
  int deliver_cells = 0;

  double max_hop() const {
    double m = 0.0;
    for (double h : hop_lengths) m = std::max(m, h);
    return m;
  }
};

struct RouteSet {
  std::size_t source_idx = 0;
  std::size_t dest_idx = 0;
  std::vector<RoutePath> paths;
  bool disjoint_before_remap = true;
  bool remapped = false;
  std::size_t dropped_by_truncation = 0;
  double side_c = 0.0;
  double corridor_width = 0.0;  // certificate base for endpoint hops
};

inline void recompute_hops(RoutePath& p, const std::vector<Vec2>& nodes) {
  p.hop_lengths.clear();
  for (std::size_t i = 0; i + 1 < p.node_seq.size(); ++i)
    p.hop_lengths.push_back(dist(nodes[p.node_seq[i]], nodes[p.node_seq[i + 1]]));
}

// Converts edge-disjoint crossings into occupant-node paths. Every open
// diamond has an occupant by construction; its absence is a consistency error.
//
// Consecutive perpendicular edges have side-adjacent diamonds, so their
// occupants are strictly closer than sqrt(5)*c. Consecutive collinear edges
// only share a corner and can put occupants up to 2*sqrt(2)*c apart; when
// that happens the occupant of an open, unused perpendicular diamond at the
// shared vertex is spliced in, restoring side-adjacency for both hops.
inline RouteSet paths_from_crossings(const CrossingSet& cs, const BondGraph& g,
                                     const DiamondLattice& lat,
                                     const std::vector<Vec2>& nodes) {
  RouteSet rs;
  rs.side_c = lat.side_c;
  rs.corridor_width = lat.frame.width;
  rs.source_idx = lat.frame.source_idx;
  rs.dest_idx = lat.frame.dest_idx;

  const std::size_t h_count = lat.h_occ.size();
  auto key = [&](const DiamondRef& d) {
    return d.horizontal ? std::size_t(d.r) * lat.cols + d.j
                        : h_count + std::size_t(d.r) * (lat.cols - 1) + d.j;
  };
  // Diamonds already contributing a node to some path; splices claim from the
  // same set so no diamond ends up on two paths of the pair.
  std::vector<char> taken(lat.diamond_count(), 0);
  for (const auto& edge_path : cs.paths)
    for (int e : edge_path) taken[key(g.edges[std::size_t(e)].diamond)] = 1;

  const double hop_limit = std::sqrt(5.0) * lat.side_c * (1.0 - 1e-12);
  auto occupant_of = [&](const DiamondRef& d) {
    const std::int64_t occ =
        d.horizontal ? lat.h_occupant(d.r, d.j) : lat.v_occupant(d.r, d.j);
    if (occ < 0)
      throw std::logic_error("paths_from_crossings: open diamond without occupant");
    return std::uint32_t(occ);
  };
  // Occupant of the best available perpendicular diamond at the shared vertex
  // of two collinear edges, or -1 when neither is usable.
  auto splice_node = [&](const BondEdge& prev, const BondEdge& cur,
                         const Vec2& a, const Vec2& b) -> std::int64_t {
    const int shared = (cur.u == prev.u || cur.u == prev.v) ? cur.u : cur.v;
    const int r = shared / (g.cols + 1);
    const int i = shared % (g.cols + 1);
    DiamondRef cand[2];
    int ncand = 0;
    if (cur.horizontal) {  // H-H: vertical diamonds below/above the vertex
      if (r - 1 >= 0 && i - 1 >= 0 && i - 1 <= lat.cols - 2)
        cand[ncand++] = {false, r - 1, i - 1};
      if (r <= lat.rows - 2 && i - 1 >= 0 && i - 1 <= lat.cols - 2)
        cand[ncand++] = {false, r, i - 1};
    } else {  // V-V: horizontal diamonds left/right of the vertex
      if (i - 1 >= 0) cand[ncand++] = {true, r, i - 1};
      if (i <= lat.cols - 1) cand[ncand++] = {true, r, i};
    }
    std::int64_t best = -1;
    std::size_t best_key = 0;
    double best_leg = std::numeric_limits<double>::infinity();
    for (int ci = 0; ci < ncand; ++ci) {
      const DiamondRef& d = cand[ci];
      const bool open = d.horizontal ? lat.h_open(d.r, d.j) : lat.v_open(d.r, d.j);
      if (!open || taken[key(d)]) continue;
      const Vec2 x = nodes[occupant_of(d)];
      const double leg = std::max(dist(a, x), dist(x, b));
      if (leg < best_leg) {
        best_leg = leg;
        best = occupant_of(d);
        best_key = key(d);
      }
    }
    if (best >= 0) taken[best_key] = 1;
    return best;
  };

  for (const auto& edge_path : cs.paths) {
    RoutePath p;
    int prev_edge = -1;
    for (int e : edge_path) {
      const BondEdge& edge = g.edges[std::size_t(e)];
      const std::uint32_t occ = occupant_of(edge.diamond);
      if (!p.node_seq.empty() && prev_edge >= 0) {
        const BondEdge& prev = g.edges[std::size_t(prev_edge)];
        if (prev.horizontal == edge.horizontal &&
            p.node_seq.back() != occ &&
            dist(nodes[p.node_seq.back()], nodes[occ]) >= hop_limit) {
          const std::int64_t mid =
              splice_node(prev, edge, nodes[p.node_seq.back()], nodes[occ]);
          if (mid >= 0) p.node_seq.push_back(std::uint32_t(mid));
        }
      }
      if (p.node_seq.empty() || p.node_seq.back() != occ)
        p.node_seq.push_back(occ);
      prev_edge = e;
    }
    if (p.node_seq.empty()) continue;
    recompute_hops(p, nodes);
    rs.paths.push_back(std::move(p));
  }
  return rs;
}

// Clips each path to its longest contiguous run of nodes inside the disk;
// paths emptied by clipping are dropped and counted.
inline RouteSet truncate_to_region(RouteSet rs, double region_radius,
                                   const std::vector<Vec2>& nodes) {
  std::vector<RoutePath> kept;
  for (auto& p : rs.paths) {
    std::size_t best_begin = 0, best_len = 0, run_begin = 0, run_len = 0;
    for (std::size_t i = 0; i <= p.node_seq.size(); ++i) {
      const bool inside =
          i < p.node_seq.size() && norm(nodes[p.node_seq[i]]) <= region_radius;
      if (inside) {
        if (run_len == 0) run_begin = i;
        ++run_len;
        if (run_len > best_len) {
          best_len = run_len;
          best_begin = run_begin;
        }
      } else {
        run_len = 0;
      }
    }
    if (best_len == 0) {
      ++rs.dropped_by_truncation;
      continue;
    }
    if (best_len != p.node_seq.size()) {
      p.node_seq = {p.node_seq.begin() + best_begin,
                    p.node_seq.begin() + best_begin + best_len};
      recompute_hops(p, nodes);
    }
    kept.push_back(std::move(p));
  }
  rs.paths = std::move(kept);
  return rs;
}

// Replaces every path node by its cell's designated relay, collapsing
// consecutive duplicates. Disjointness may break here; the flag records that
// the pre-remap paths were disjoint.
//
// The relay substitution can stretch a hop past (sqrt(5)+sqrt(2))*c when both
// endpoints move adversely inside their cells; such hops are repaired by
// splicing in the relay of an intermediate cell, preferring cells that touch
// the corridor so loading stays tied to corridor membership.
inline RouteSet remap_to_relays(RouteSet rs, const SquareGrid& grid,
                                const std::vector<Vec2>& nodes,
                                const Corridor* corridor = nullptr) {
  const double bound = (std::sqrt(5.0) + std::sqrt(2.0)) * rs.side_c;
  auto repair = [&](std::vector<std::uint32_t>& seq) {
    std::size_t inserted = 0;
    for (std::size_t i = 0; i + 1 < seq.size();) {
      const Vec2 a = nodes[seq[i]], b = nodes[seq[i + 1]];
      const double d = dist(a, b);
      if (d <= bound || inserted > seq.size() + 64) {
        ++i;
        continue;
      }
      auto [ax, ay] = grid.cell_coords(a);
      auto [bx, by] = grid.cell_coords(b);
      const int x0 = std::max(0, std::min(ax, bx) - 1);
      const int x1 = std::min(grid.nside - 1, std::max(ax, bx) + 1);
      const int y0 = std::max(0, std::min(ay, by) - 1);
      const int y1 = std::min(grid.nside - 1, std::max(ay, by) + 1);
      std::int64_t best = -1;
      bool best_in_cor = false;
      double best_leg = d - 1e-9;  // must strictly shorten the worst leg
      for (int cy = y0; cy <= y1; ++cy)
        for (int cx = x0; cx <= x1; ++cx) {
          const std::int64_t relay = grid.relay[grid.cell_index(cx, cy)];
          if (relay < 0 || std::uint32_t(relay) == seq[i] ||
              std::uint32_t(relay) == seq[i + 1])
            continue;
          const Vec2 x = nodes[std::size_t(relay)];
          const double leg = std::max(dist(a, x), dist(x, b));
          const bool in_cor =
              corridor == nullptr || corridor->contains(x, grid.side_c);
          if (leg < best_leg && (in_cor || !best_in_cor)) {
            best = relay;
            best_in_cor = in_cor;
            best_leg = leg;
          } else if (in_cor && !best_in_cor && leg < d - 1e-9) {
            best = relay;
            best_in_cor = true;
            best_leg = leg;
          }
        }
      if (best < 0) {
        ++i;  // no usable relay; the certificate check will surface this
        continue;
      }
      seq.insert(seq.begin() + std::ptrdiff_t(i) + 1, std::uint32_t(best));
      ++inserted;  // re-examine the left leg from the same i
    }
  };
  for (auto& p : rs.paths) {
    std::vector<std::uint32_t> remapped;
    for (std::uint32_t idx : p.node_seq) {
      const std::int64_t relay = grid.relay_of(nodes[idx]);
      if (relay < 0)
        throw std::logic_error("remap_to_relays: path node in cell without relay");
      if (remapped.empty() || remapped.back() != std::uint32_t(relay))
        remapped.push_back(std::uint32_t(relay));
    }
    repair(remapped);
    p.node_seq = std::move(remapped);
    recompute_hops(p, nodes);
  }
  rs.remapped = true;
  return rs;
}

// Designates the path node closest to the source (destination) as the
// draining (delivery) node, ties broken by lowest node index, and trims the
// path to the segment between them. Records Euclidean and corridor-frame
// Manhattan hop lengths; grid cell distances are filled when a grid is given.
inline RouteSet designate_endpoints(RouteSet rs, const Vec2& s, const Vec2& d,
                                    const std::vector<Vec2>& nodes,
                                    const SquareGrid* grid = nullptr) {
  for (auto& p : rs.paths) {
    if (p.node_seq.empty())
      throw std::invalid_argument("designate_endpoints: empty path");
    auto closest = [&](const Vec2& target) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < p.node_seq.size(); ++i) {
        const double dd = dist(nodes[p.node_seq[i]], target);
        if (dd < best_d ||
            (dd == best_d && p.node_seq[i] < p.node_seq[best])) {
          best_d = dd;
          best = i;
        }
      }
      return best;
    };
    std::size_t di = closest(s);
    std::size_t vi = closest(d);
    if (di > vi) {
      std::reverse(p.node_seq.begin(), p.node_seq.end());
      const std::size_t last = p.node_seq.size() - 1;
      di = last - di;
      vi = last - vi;
    }
    p.node_seq = {p.node_seq.begin() + di, p.node_seq.begin() + vi + 1};
    recompute_hops(p, nodes);
    p.draining_node = p.node_seq.front();
    p.delivery_node = p.node_seq.back();
    const Vec2 dn = nodes[p.node_seq.front()];
    const Vec2 vn = nodes[p.node_seq.back()];
    p.drain_hop = dist(s, dn);
    p.deliver_hop = dist(vn, d);
    p.drain_hop_manhattan = std::abs(s.x - dn.x) + std::abs(s.y - dn.y);
    p.deliver_hop_manhattan = std::abs(vn.x - d.x) + std::abs(vn.y - d.y);
    if (grid) {
      p.drain_cells = grid->manhattan_cells(s, dn);
      p.deliver_cells = grid->manhattan_cells(vn, d);
    }
  }
  return rs;
}

inline nlohmann::json routeset_to_json(const RouteSet& rs) {
  nlohmann::json j;
  j["source"] = rs.source_idx;
  j["dest"] = rs.dest_idx;
  j["disjoint_before_remap"] = rs.disjoint_before_remap;
  j["remapped"] = rs.remapped;
  j["dropped_by_truncation"] = rs.dropped_by_truncation;
  auto& paths = j["paths"] = nlohmann::json::array();
  for (const auto& p : rs.paths) {
    nlohmann::json pj;
    pj["nodes"] = p.node_seq;
    pj["hop_lengths"] = p.hop_lengths;
    pj["draining_node"] = p.draining_node;
    pj["delivery_node"] = p.delivery_node;
    pj["drain_hop"] = p.drain_hop;
    pj["deliver_hop"] = p.deliver_hop;
    paths.push_back(std::move(pj));
  }
  return j;
}

}  // namespace percnet

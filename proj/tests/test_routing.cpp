#include <catch2/catch_amalgamated.hpp>

#include "percnet/routing.hpp"
#include "percnet/rng.hpp"

using namespace percnet;

namespace {

Corridor rect_frame(double length, double width) {
  Corridor cor;
  cor.origin = {0, 0};
  cor.axis = {1, 0};
  cor.length = length;
  cor.width = width;
  return cor;
}

// Poisson-filled rectangle lattice plus the points that fill it.
DiamondLattice random_lattice(double length, double width, double c,
                              std::uint64_t seed, std::vector<Vec2>& pts) {
  Rng rng(seed);
  pts.clear();
  const auto count = rng.poisson(length * width);
  for (std::uint64_t i = 0; i < count; ++i)
    pts.push_back({rng.uniform(0.0, length), rng.uniform(0.0, width)});
  return tessellate_corridor(rect_frame(length, width), c, pts);
}

}  // namespace

TEST_CASE("crossing occupants become a node path") {
  const double c = 2.0;
  const double s = std::sqrt(2.0) * c;
  const Corridor cor = rect_frame(3 * s, 2 * s);
  // One node per horizontal diamond in row 0: a straight crossing.
  std::vector<Vec2> nodes;
  for (int j = 0; j < 3; ++j) nodes.push_back(Vec2{(j + 0.5) * s, 0.5 * s});
  const auto lat = tessellate_corridor(cor, c, nodes);
  const auto g = build_bond_graph(lat);
  const auto cs = max_disjoint_crossings(g);
  REQUIRE(cs.count == 1);
  const auto rs = paths_from_crossings(cs, g, lat, nodes);
  REQUIRE(rs.paths.size() == 1);
  CHECK(rs.paths[0].node_seq == std::vector<std::uint32_t>{0, 1, 2});
  REQUIRE(rs.paths[0].hop_lengths.size() == 2);
  CHECK_THAT(rs.paths[0].hop_lengths[0], Catch::Matchers::WithinRel(s, 1e-12));
  CHECK_FALSE(rs.remapped);
  CHECK(rs.side_c == c);
}

TEST_CASE("pre-remap hops never exceed two corner-touching diamonds") {
  // Consecutive path diamonds share at least a corner, so occupants are at
  // most 2*sqrt(2)*c apart; perpendicular (side-adjacent) steps stay under
  // sqrt(5)*c.
  const double c = 1.0;
  const double limit = 2.0 * std::sqrt(2.0) * c + 1e-9;
  std::vector<Vec2> pts;
  int paths_seen = 0;
  for (std::uint64_t t = 0; t < 40; ++t) {
    const double s = std::sqrt(2.0) * c;
    const auto lat = random_lattice(12 * s, 4 * s, c, 1000 + t, pts);
    const auto g = build_bond_graph(lat);
    const auto cs = max_disjoint_crossings(g);
    const auto rs = paths_from_crossings(cs, g, lat, pts);
    for (const auto& p : rs.paths) {
      ++paths_seen;
      REQUIRE(p.max_hop() <= limit);
    }
  }
  CHECK(paths_seen > 10);
}

TEST_CASE("collinear transitions splice a perpendicular occupant") {
  // 2x2 lattice, crossing along row 0 with occupants pushed to the far
  // corners: the direct hop exceeds sqrt(5)*c, so the open vertical diamond at
  // the shared vertex donates its occupant.
  const double c = 1.0;
  const double s = std::sqrt(2.0) * c;
  const Corridor cor = rect_frame(2 * s, 2 * s);
  std::vector<Vec2> nodes = {
      {0.05, 0.5 * s},  // H(0,0), near its left corner
      {2 * s - 0.05, 0.5 * s},  // H(0,1), near its right corner
      {s, s},  // V(0,0) center, at the shared vertex
  };
  REQUIRE(dist(nodes[0], nodes[1]) > std::sqrt(5.0) * c);
  const auto lat = tessellate_corridor(cor, c, nodes);
  REQUIRE(lat.h_open(0, 0));
  REQUIRE(lat.h_open(0, 1));
  REQUIRE(lat.v_open(0, 0));
  const auto g = build_bond_graph(lat);
  const auto cs = max_disjoint_crossings(g);
  REQUIRE(cs.count == 1);
  const auto rs = paths_from_crossings(cs, g, lat, nodes);
  REQUIRE(rs.paths.size() == 1);
  CHECK(rs.paths[0].node_seq == std::vector<std::uint32_t>{0, 2, 1});
  CHECK(rs.paths[0].max_hop() < std::sqrt(5.0) * c);
}

TEST_CASE("paths of one pair never reuse a diamond") {
  const double c = 1.0;
  std::vector<Vec2> pts;
  for (std::uint64_t t = 0; t < 30; ++t) {
    const double s = std::sqrt(2.0) * c;
    const auto lat = random_lattice(10 * s, 5 * s, c, 2000 + t, pts);
    const auto g = build_bond_graph(lat);
    const auto cs = max_disjoint_crossings(g);
    const auto rs = paths_from_crossings(cs, g, lat, pts);
    // Node indices across all the pair's paths are distinct: each diamond has
    // one occupant and each occupant joins at most one path.
    std::vector<std::uint32_t> all;
    for (const auto& p : rs.paths)
      all.insert(all.end(), p.node_seq.begin(), p.node_seq.end());
    std::sort(all.begin(), all.end());
    REQUIRE(std::adjacent_find(all.begin(), all.end()) == all.end());
  }
}

TEST_CASE("truncate_to_region keeps the longest inside run") {
  std::vector<Vec2> nodes = {{0, 0}, {1, 0}, {9, 0}, {2, 0}, {3, 0}, {4, 0}, {8.5, 0}};
  RouteSet rs;
  rs.side_c = 1.0;
  RoutePath p;
  p.node_seq = {0, 1, 2, 3, 4, 5, 6};  // nodes 2 and 6 lie outside radius 5
  recompute_hops(p, nodes);
  rs.paths.push_back(p);
  RoutePath gone;
  gone.node_seq = {2, 6};  // fully outside
  recompute_hops(gone, nodes);
  rs.paths.push_back(gone);
  const auto out = truncate_to_region(std::move(rs), 5.0, nodes);
  REQUIRE(out.paths.size() == 1);
  CHECK(out.paths[0].node_seq == std::vector<std::uint32_t>{3, 4, 5});
  CHECK(out.dropped_by_truncation == 1);
}

TEST_CASE("remap_to_relays substitutes cell relays and collapses duplicates") {
  std::vector<Vec2> nodes = {{0.2, 0.2}, {0.8, 0.8}, {1.5, 0.5}, {2.5, 0.5}};
  const auto grid = tessellate_squares(4.0, 1.0, nodes);
  RouteSet rs;
  rs.side_c = 1.0;
  RoutePath p;
  p.node_seq = {1, 2, 3};  // node 1 shares a cell with node 0 (the relay)
  recompute_hops(p, nodes);
  rs.paths.push_back(p);
  const auto out = remap_to_relays(std::move(rs), grid, nodes);
  CHECK(out.remapped);
  CHECK(out.paths[0].node_seq == std::vector<std::uint32_t>{0, 2, 3});

  RouteSet rs2;
  rs2.side_c = 1.0;
  RoutePath q;
  q.node_seq = {0, 1, 2};  // 0 and 1 collapse to the same relay
  recompute_hops(q, nodes);
  rs2.paths.push_back(q);
  const auto out2 = remap_to_relays(std::move(rs2), grid, nodes);
  CHECK(out2.paths[0].node_seq == std::vector<std::uint32_t>{0, 2});
}

TEST_CASE("remap repairs an over-long hop through an intermediate relay") {
  // Two path nodes 5.5 apart with a relay near the midpoint; side_c = 1 puts
  // the bound at sqrt(5)+sqrt(2) = 3.65, so the hop must be split.
  std::vector<Vec2> nodes = {{0.5, 0.5}, {6.0, 0.5}, {3.2, 0.6}};
  const auto grid = tessellate_squares(8.0, 1.0, nodes);
  RouteSet rs;
  rs.side_c = 1.0;
  RoutePath p;
  p.node_seq = {0, 1};
  recompute_hops(p, nodes);
  rs.paths.push_back(p);
  const auto out = remap_to_relays(std::move(rs), grid, nodes);
  REQUIRE(out.paths[0].node_seq.size() == 3);
  CHECK(out.paths[0].node_seq[1] == 2);
  CHECK(out.paths[0].max_hop() < (std::sqrt(5.0) + std::sqrt(2.0)) + 1e-9);
}

TEST_CASE("designate_endpoints trims to the drain-deliver segment") {
  std::vector<Vec2> nodes = {{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}};
  const Vec2 s{0.9, 1.0}, d{3.1, -1.0};
  RouteSet rs;
  rs.side_c = 1.0;
  RoutePath p;
  p.node_seq = {0, 1, 2, 3, 4};
  recompute_hops(p, nodes);
  rs.paths.push_back(p);
  const auto grid = tessellate_squares(6.0, 1.0, nodes);
  const auto out = designate_endpoints(std::move(rs), s, d, nodes, &grid);
  const auto& q = out.paths[0];
  CHECK(q.node_seq == std::vector<std::uint32_t>{1, 2, 3});
  CHECK(q.draining_node == 1);
  CHECK(q.delivery_node == 3);
  CHECK_THAT(q.drain_hop, Catch::Matchers::WithinRel(dist(s, nodes[1]), 1e-12));
  CHECK_THAT(q.deliver_hop, Catch::Matchers::WithinRel(dist(nodes[3], d), 1e-12));
  CHECK_THAT(q.drain_hop_manhattan,
             Catch::Matchers::WithinAbs(std::abs(s.x - 1) + std::abs(s.y), 1e-12));
  CHECK(q.drain_cells == grid.manhattan_cells(s, nodes[1]));
}

TEST_CASE("designate_endpoints reverses paths oriented dest-to-source") {
  std::vector<Vec2> nodes = {{3, 0}, {2, 0}, {1, 0}};
  RouteSet rs;
  rs.side_c = 1.0;
  RoutePath p;
  p.node_seq = {0, 1, 2};
  recompute_hops(p, nodes);
  rs.paths.push_back(p);
  const auto out = designate_endpoints(std::move(rs), {0.8, 0}, {3.2, 0}, nodes);
  CHECK(out.paths[0].node_seq == std::vector<std::uint32_t>{2, 1, 0});
  CHECK(out.paths[0].draining_node == 2);
  CHECK(out.paths[0].delivery_node == 0);
}

TEST_CASE("routeset json shape") {
  std::vector<Vec2> nodes = {{0, 0}, {1, 0}};
  RouteSet rs;
  rs.source_idx = 5;
  rs.dest_idx = 9;
  rs.side_c = 1.0;
  RoutePath p;
  p.node_seq = {0, 1};
  recompute_hops(p, nodes);
  rs.paths.push_back(p);
  const auto j = routeset_to_json(rs);
  CHECK(j["source"] == 5);
  CHECK(j["dest"] == 9);
  CHECK(j["paths"].size() == 1);
  CHECK(j["paths"][0]["nodes"].size() == 2);
}

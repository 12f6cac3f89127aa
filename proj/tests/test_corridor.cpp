#include <catch2/catch_amalgamated.hpp>

#include "percnet/corridor.hpp"
#include "percnet/rng.hpp"

using namespace percnet;

TEST_CASE("corridor_width closed form") {
  const double n = 1e6, c = 6, kappa = 1;
  const double expect = std::sqrt(2.0) * 6.0 * std::log(1000.0 / (std::sqrt(2.0) * 6.0));
  CHECK_THAT(corridor_width(n, c, kappa), Catch::Matchers::WithinRel(expect, 1e-12));
  CHECK_THAT(corridor_width(n, c, kappa), Catch::Matchers::WithinAbs(40.4699, 0.001));
  // Doubling kappa doubles the width.
  CHECK_THAT(corridor_width(n, c, 2.0),
             Catch::Matchers::WithinRel(2.0 * corridor_width(n, c, 1.0), 1e-12));
}

TEST_CASE("local frame round-trips points") {
  Corridor cor;
  cor.origin = {3, -2};
  cor.axis = normalized({1, 2});
  cor.length = 10;
  cor.width = 4;
  const Vec2 p{1.25, 0.75};
  const Vec2 back = cor.to_local(cor.to_world(p));
  CHECK_THAT(back.x, Catch::Matchers::WithinAbs(p.x, 1e-12));
  CHECK_THAT(back.y, Catch::Matchers::WithinAbs(p.y, 1e-12));
  CHECK(cor.contains(cor.to_world({5, 2})));
  CHECK_FALSE(cor.contains(cor.to_world({5, 5})));
  CHECK(cor.contains(cor.to_world({5, 4.5}), 1.0));
}

TEST_CASE("build_corridor geometry invariants over random pairs") {
  const double n = 5000, c = 3, kappa = 2;
  Rng rng(99);
  const double R = std::sqrt(n);
  for (int t = 0; t < 200; ++t) {
    const double r1 = R * std::sqrt(rng.uniform()), a1 = rng.uniform(0, 2 * M_PI);
    const double r2 = R * std::sqrt(rng.uniform()), a2 = rng.uniform(0, 2 * M_PI);
    const Vec2 s{r1 * std::cos(a1), r1 * std::sin(a1)};
    const Vec2 d{r2 * std::cos(a2), r2 * std::sin(a2)};
    if (dist(s, d) < 1e-6) continue;
    const Corridor cor = build_corridor(s, d, n, c, kappa);
    REQUIRE_THAT(norm(cor.axis), Catch::Matchers::WithinAbs(1.0, 1e-12));
    REQUIRE_THAT(cor.length, Catch::Matchers::WithinRel(2.0 * R, 1e-12));
    REQUIRE_THAT(cor.width,
                 Catch::Matchers::WithinRel(corridor_width(n, c, kappa), 1e-12));
    // Axis is parallel to the s-d segment.
    const Vec2 u = normalized(d - s);
    REQUIRE_THAT(std::abs(dot(cor.axis, u)), Catch::Matchers::WithinAbs(1.0, 1e-9));
    // Both endpoints are strictly interior, with the lateral margin.
    const double margin = std::min(c, cor.width / 4.0);
    const Vec2 ls = cor.to_local(s), ld = cor.to_local(d);
    REQUIRE_THAT(ls.y, Catch::Matchers::WithinAbs(margin, 1e-9));
    REQUIRE_THAT(ld.y, Catch::Matchers::WithinAbs(margin, 1e-9));
    REQUIRE(ls.x > 0);
    REQUIRE(ls.x < cor.length);
    REQUIRE(ld.x > 0);
    REQUIRE(ld.x < cor.length);
    // The wide side of the corridor faces the disk center.
    REQUIRE(cor.to_local({0, 0}).y >= ls.y - 1e-9);
  }
}

TEST_CASE("build_corridor rejects degenerate inputs") {
  CHECK_THROWS_AS(build_corridor({1, 1}, {1, 1}, 100, 1, 1), std::invalid_argument);
  // Width formula goes nonpositive when sqrt(n) <= sqrt(2)*c.
  CHECK_THROWS_AS(build_corridor({0, 0}, {1, 0}, 50, 6, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_corridor({0, 0}, {1, 0}, 100, -1, 1), std::invalid_argument);
}

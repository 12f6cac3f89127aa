#include <catch2/catch_amalgamated.hpp>

#include "percnet/radio.hpp"

using namespace percnet;

TEST_CASE("path loss closed form") {
  CHECK_THAT(path_loss(0, 3), Catch::Matchers::WithinAbs(1.0, 1e-15));
  CHECK_THAT(path_loss(1, 3), Catch::Matchers::WithinAbs(0.125, 1e-15));
  CHECK_THAT(path_loss(2, 3), Catch::Matchers::WithinRel(1.0 / 27.0, 1e-12));
  CHECK_THROWS_AS(path_loss(-1, 3), std::invalid_argument);
}

TEST_CASE("exact sinr with explicit interferers") {
  RadioConfig cfg;
  cfg.P = 8.0;
  cfg.alpha = 3.0;
  cfg.N0 = 1.0;
  const Vec2 rx{0, 0}, tx{1, 0};
  const std::vector<Vec2> interferers = {{3, 0}};
  // signal 8/(1+1)^3 = 1; interference 8/(1+3)^3 = 0.125
  CHECK_THAT(sinr_at(rx, tx, interferers, cfg),
             Catch::Matchers::WithinRel(1.0 / 1.125, 1e-12));
  CHECK_THAT(sinr_at(rx, tx, {}, cfg), Catch::Matchers::WithinRel(1.0, 1e-12));
}

TEST_CASE("rate models: Shannon half and inclusive threshold") {
  RadioConfig cfg;
  cfg.W = 2.0;
  cfg.T = 3.0;
  cfg.B = 5.0;
  cfg.tau = 1.5;
  CHECK_THAT(rate(RateModel::A, 1.0, cfg),
             Catch::Matchers::WithinRel(0.5 * 2.0 * 3.0 * std::log(2.0), 1e-12));
  CHECK(rate(RateModel::B, 1.5, cfg) == 5.0);  // threshold is inclusive
  CHECK(rate(RateModel::B, 1.4999, cfg) == 0.0);
  CHECK(rate(RateModel::B, 10.0, cfg) == 5.0);
}

TEST_CASE("gamma series equals pi^2/2 at alpha = 3") {
  CHECK_THAT(gamma_series(3.0), Catch::Matchers::WithinAbs(M_PI * M_PI / 2.0, 1e-6));
  // alpha = 4: sum (i-1/2)^-3 = 7*zeta(3)
  CHECK_THAT(gamma_series(4.0),
             Catch::Matchers::WithinAbs(7.0 * 1.2020569031595943, 1e-6));
  CHECK_THROWS_AS(gamma_series(2.0), std::invalid_argument);
}

TEST_CASE("tdma spacing frozen values") {
  const double gamma = gamma_series(3.0);
  // tau=1, c=1, alpha=3: (16*gamma)^(1/3) * 1.5 = 6.435... -> x = 7
  const auto sp = tdma_spacing(1, 1.0, 3.0, 1.0, gamma);
  CHECK(sp.x == 7);
  CHECK(sp.k == 14);
  CHECK(tdma_spacing(4, 1.0, 3.0, 1.0, gamma).k == 35);
  // Huge c drives the raw value to its floor of 2.
  CHECK(tdma_spacing(1, 1e9, 3.0, 1e-9, gamma).x == 2);
  CHECK_THROWS_AS(tdma_spacing(-1, 1.0, 3.0, 1.0, gamma), std::invalid_argument);
}

TEST_CASE("interference and signal bounds") {
  const double gamma = gamma_series(3.0);
  const int d = 1, x = 7;
  const double c = 1.0, P = 2.0;
  CHECK_THAT(interference_bound(d, c, 3.0, x, P, gamma),
             Catch::Matchers::WithinRel(16.0 * P * gamma / std::pow(14.0, 3.0), 1e-12));
  CHECK_THAT(signal_bound(d, c, P, 3.0),
             Catch::Matchers::WithinRel(P / 27.0, 1e-12));
}

TEST_CASE("minimum Model B power satisfies its own postcondition") {
  const double gamma = gamma_series(3.0);
  const int d = 1;
  const double c = 1.0, alpha = 3.0, tau = 1.0, N0 = 1.0;
  const double pmin = min_power_model_b(d, c, alpha, tau, N0, gamma);
  CHECK_THAT(pmin, Catch::Matchers::WithinAbs(121.03, 0.01));
  const auto sp = tdma_spacing(d, c, alpha, tau, gamma);
  auto sinr_floor = [&](double P) {
    return signal_bound(d, c, P, alpha) /
           (N0 + interference_bound(d, c, alpha, sp.x, P, gamma));
  };
  CHECK_THAT(sinr_floor(pmin), Catch::Matchers::WithinRel(tau, 1e-9));
  CHECK(sinr_floor(pmin * 0.999) < tau);
  CHECK(sinr_floor(pmin * 1.001) > tau);
  CHECK(min_power_model_b(d, c, alpha, tau, 0.0, gamma) == 0.0);
}

TEST_CASE("minimum Model B power increases with schedule distance") {
  const double gamma = gamma_series(3.0);
  double prev = 0.0;
  for (int d = 1; d <= 20; ++d) {
    const double p = min_power_model_b(d, 1.0, 3.0, 1.0, 1.0, gamma);
    REQUIRE(p > prev);
    prev = p;
  }
}

TEST_CASE("guaranteed link rate includes the slot share") {
  RadioConfig cfg;
  cfg.alpha = 3.0;
  cfg.tau = 1.0;
  const double gamma = gamma_series(3.0);
  const int d = 1;
  const auto sp = tdma_spacing(d, 1.0, cfg.alpha, cfg.tau, gamma);
  cfg.P = 10.0;
  const double ra = guaranteed_link_rate(RateModel::A, d, 1.0, cfg, gamma);
  const double expected =
      0.5 * std::log1p(sinr_bound(d, 1.0, cfg, gamma, sp.x)) / (sp.k * sp.k);
  CHECK_THAT(ra, Catch::Matchers::WithinRel(expected, 1e-12));
  // Model B: zero below the minimum power, B/k^2 above it.
  const double pmin = min_power_model_b(d, 1.0, cfg.alpha, cfg.tau, cfg.N0, gamma);
  cfg.P = pmin * 0.99;
  CHECK(guaranteed_link_rate(RateModel::B, d, 1.0, cfg, gamma) == 0.0);
  cfg.P = pmin * 1.01;
  CHECK_THAT(guaranteed_link_rate(RateModel::B, d, 1.0, cfg, gamma),
             Catch::Matchers::WithinRel(cfg.B / (sp.k * sp.k), 1e-12));
}

TEST_CASE("schedule slots repeat with period k on both axes") {
  std::vector<Vec2> nodes = {{0.5, 0.5}};
  const auto grid = tessellate_squares(20.0, 1.0, nodes);
  RadioConfig cfg;
  const auto sch = build_schedule(grid, 1, cfg);
  CHECK(sch.k == 14);
  CHECK(sch.slot_count() == 196);
  CHECK(sch.slot_of_cell(3, 5) == sch.slot_of_cell(3 + sch.k, 5));
  CHECK(sch.slot_of_cell(3, 5) == sch.slot_of_cell(3, 5 - sch.k));
  CHECK(sch.slot_of_cell(3, 5) != sch.slot_of_cell(4, 5));
  CHECK(sch.slot_of_cell(-1, -1) >= 0);
}

TEST_CASE("verify_schedule: exact interference within the closed-form bound") {
  // Relays on a unit grid; links from each cell to a neighbor relay position.
  std::vector<Vec2> nodes;
  for (int y = 0; y < 30; ++y)
    for (int x = 0; x < 30; ++x)
      nodes.push_back({x + 0.5 + 0.4 * std::sin(x * 7 + y), y + 0.5 + 0.4 * std::cos(x + 3 * y)});
  const auto grid = tessellate_squares(45.0, 1.0, nodes);
  RadioConfig cfg;
  cfg.alpha = 3.0;
  cfg.tau = 1.0;
  const double gamma = gamma_series(cfg.alpha);
  const int d = 1;
  cfg.P = min_power_model_b(d, 1.0, cfg.alpha, cfg.tau, cfg.N0, gamma);
  cfg.model = RateModel::B;
  const auto sch = build_schedule(grid, d, cfg);
  std::vector<ScheduledLink> links;
  for (const auto& p : nodes) {
    const std::size_t ci = grid.cell_of(p);
    links.push_back({ci, {p.x + 0.9, p.y}});  // receiver within d = 1 cells
  }
  const auto checks = verify_schedule(sch, grid, links, cfg, nodes);
  REQUIRE(checks.size() == links.size());
  for (const auto& ck : checks) {
    REQUIRE(ck.interference_ok);
    REQUIRE(ck.sinr >= ck.sinr_floor - 1e-12);
  }
  CHECK(schedule_violations(checks).empty());
  // A link stretched past d cells is rejected outright.
  std::vector<ScheduledLink> bad = {{grid.cell_of(nodes[0]), {nodes[0].x + 3.5, nodes[0].y}}};
  CHECK_THROWS_AS(verify_schedule(sch, grid, bad, cfg, nodes), std::invalid_argument);
}

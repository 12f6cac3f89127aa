#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "percnet/geometry.hpp"
#include "percnet/lattice.hpp"

namespace percnet {

enum class RateModel { A, B };

inline std::string to_string(RateModel m) { return m == RateModel::A ? "A" : "B"; }

struct RadioConfig {
  double P = 1.0;      // transmit power, linear units
  double alpha = 3.0;  // path-loss exponent, > 2
  double N0 = 1.0;     // noise power
  double tau = 1.0;    // Model B SINR threshold
  double W = 1.0;      // bandwidth
  double T = 1.0;      // slot duration
  double B = 1.0;      // Model B rate
  RateModel model = RateModel::A;

  void validate() const {
    if (!(alpha > 2)) throw std::invalid_argument("RadioConfig: alpha must be > 2");
    if (!(P > 0)) throw std::invalid_argument("RadioConfig: P must be > 0");
    if (N0 < 0) throw std::invalid_argument("RadioConfig: N0 must be >= 0");
    if (!(tau > 0)) throw std::invalid_argument("RadioConfig: tau must be > 0");
    if (!(W > 0) || !(T > 0) || !(B > 0))
      throw std::invalid_argument("RadioConfig: W, T, B must be > 0");
  }
};

// eta(d) = 1/(1+d)^alpha
inline double path_loss(double d, double alpha) {
  if (d < 0) throw std::invalid_argument("path_loss: negative distance");
  return std::pow(1.0 + d, -alpha);
}

// Exact SINR at rx for transmitter tx with the given set of simultaneously
// active interferers.
inline double sinr_at(const Vec2& rx, const Vec2& tx,
                      const std::vector<Vec2>& interferers,
                      const RadioConfig& cfg) {
  double interference = 0.0;
  for (const auto& q : interferers)
    interference += cfg.P * path_loss(dist(q, rx), cfg.alpha);
  return cfg.P * path_loss(dist(tx, rx), cfg.alpha) / (cfg.N0 + interference);
}

inline double rate(RateModel model, double sinr, const RadioConfig& cfg) {
  if (model == RateModel::A) return 0.5 * cfg.W * cfg.T * std::log1p(sinr);
  return sinr >= cfg.tau ? cfg.B : 0.0;  // threshold inclusive
}

// gamma = sum_{i>=1} (i-1/2)^(1-alpha), with an integral tail bound <= tol.
inline double gamma_series(double alpha, double tol = 1e-9) {
  if (!(alpha > 2)) throw std::invalid_argument("gamma_series: diverges for alpha <= 2");
  double sum = 0.0;
  for (std::uint64_t i = 1;; ++i) {
    sum += std::pow(i - 0.5, 1.0 - alpha);
    // Decreasing terms: tail <= integral_{i}^inf (x-1/2)^(1-alpha) dx
    const double tail = std::pow(i - 0.5, 2.0 - alpha) / (alpha - 2.0);
    if (tail <= tol) break;
    if (i > 100000000ULL) break;  // tol unreachably small; tail is already tiny
  }
  return sum;
}

struct TdmaSpacing {
  int x = 0;
  int k = 0;
};

// x = max(2, ceil((16*tau*gamma)^(1/alpha) * (1 + 1/(2c)))), k = x*(d+1).
inline TdmaSpacing tdma_spacing(int d, double c, double alpha, double tau,
                                double gamma) {
  if (d < 0 || !(c > 0)) throw std::invalid_argument("tdma_spacing: bad parameters");
  const double raw = std::pow(16.0 * tau * gamma, 1.0 / alpha) * (1.0 + 1.0 / (2.0 * c));
  TdmaSpacing sp;
  sp.x = std::max(2, int(std::ceil(raw - 1e-12)));
  sp.k = sp.x * (d + 1);
  return sp;
}

// Upper bound on total interference power at any scheduled receiver:
// 16*P*gamma / (c^alpha (d+1)^alpha x^alpha).
inline double interference_bound(int d, double c, double alpha, int x, double P,
                                 double gamma) {
  return 16.0 * P * gamma / std::pow(c * (d + 1) * x, alpha);
}

// Lower bound on received signal power for links with transmitter-receiver
// distance at most c*(d+1): P/(1+c(d+1))^alpha.
inline double signal_bound(int d, double c, double P, double alpha) {
  return P * path_loss(c * (d + 1), alpha);
}

// Smallest P with signal_bound/(N0 + interference_bound) >= tau:
//   P = N0*tau*(1+c(d+1))^alpha / (1 - tau*(1+1/(c(d+1)))^alpha * 16*gamma/x^alpha).
// The spacing construction keeps the interference term below 1/tau for d >= 1.
inline double min_power_model_b(int d, double c, double alpha, double tau,
                                double N0, double gamma) {
  const TdmaSpacing sp = tdma_spacing(d, c, alpha, tau, gamma);
  const double q = std::pow(1.0 + 1.0 / (c * (d + 1)), alpha);
  const double denom = 1.0 - tau * q * 16.0 * gamma / std::pow(double(sp.x), alpha);
  if (!(denom > 0))
    throw std::runtime_error("min_power_model_b: infeasible (interference term >= 1/tau)");
  if (N0 == 0.0) return 0.0;  // any positive power suffices
  return N0 * tau * std::pow(1.0 + c * (d + 1), alpha) / denom;
}

// Guaranteed SINR lower bound for a scheduled link at Manhattan distance d.
inline double sinr_bound(int d, double c, const RadioConfig& cfg, double gamma,
                         int x) {
  return signal_bound(d, c, cfg.P, cfg.alpha) /
         (cfg.N0 + interference_bound(d, c, cfg.alpha, x, cfg.P, gamma));
}

// Guaranteed per-link rate under the d-schedule, including the 1/k^2 slot
// share. Model B yields 0 when P is below the minimum feasible power.
inline double guaranteed_link_rate(RateModel model, int d, double c,
                                   const RadioConfig& cfg, double gamma) {
  const TdmaSpacing sp = tdma_spacing(d, c, cfg.alpha, cfg.tau, gamma);
  const double share = 1.0 / (double(sp.k) * sp.k);
  if (model == RateModel::A)
    return share * 0.5 * cfg.W * cfg.T *
           std::log1p(sinr_bound(d, c, cfg, gamma, sp.x));
  const double smin = sinr_bound(d, c, cfg, gamma, sp.x);
  return smin >= cfg.tau ? share * cfg.B : 0.0;
}

// ---------------------------------------------------------------------------

// k^2-slot spatial-reuse schedule: cells (cx, cy) and (cx', cy') share a slot
// iff they differ by multiples of k on both axes.
struct TdmaSchedule {
  int k = 0;
  int x = 0;
  int d = 0;
  double gamma = 0.0;

  int slot_of_cell(int cx, int cy) const {
    const int mx = ((cx % k) + k) % k;
    const int my = ((cy % k) + k) % k;
    return my * k + mx;
  }
  int slot_count() const { return k * k; }
};

inline TdmaSchedule build_schedule(const SquareGrid& grid, int d,
                                   const RadioConfig& cfg) {
  if (grid.cell_count() == 0)
    throw std::invalid_argument("build_schedule: empty grid");
  cfg.validate();
  TdmaSchedule sch;
  sch.gamma = gamma_series(cfg.alpha);
  const TdmaSpacing sp = tdma_spacing(d, grid.side_c, cfg.alpha, cfg.tau, sch.gamma);
  sch.x = sp.x;
  sch.k = sp.k;
  sch.d = d;
  return sch;
}

struct ScheduledLink {
  std::size_t tx_cell = 0;  // transmitter is the cell's relay
  Vec2 rx;
};

struct LinkCheck {
  std::size_t link = 0;
  int slot = 0;
  double signal = 0.0;
  double interference = 0.0;
  double sinr = 0.0;
  double sinr_floor = 0.0;          // guaranteed bound-derived SINR
  bool interference_ok = true;      // exact interference <= closed-form bound
  bool ok = true;                   // model-specific rate check
};

// Exact per-slot SINR verification: in each slot every nonempty cell assigned
// to it transmits (from its relay). A link fails under Model B when its SINR
// drops below tau, and under Model A when its exact rate falls below the
// bound-derived guarantee.
inline std::vector<LinkCheck> verify_schedule(const TdmaSchedule& sch,
                                              const SquareGrid& grid,
                                              const std::vector<ScheduledLink>& links,
                                              const RadioConfig& cfg,
                                              const std::vector<Vec2>& nodes) {
  cfg.validate();
  // Same-slot transmitter positions, indexed by slot.
  std::vector<std::vector<Vec2>> slot_tx(std::size_t(sch.slot_count()));
  std::vector<std::vector<std::size_t>> slot_cells(std::size_t(sch.slot_count()));
  for (int cy = 0; cy < grid.nside; ++cy)
    for (int cx = 0; cx < grid.nside; ++cx) {
      const std::size_t ci = grid.cell_index(cx, cy);
      if (grid.relay[ci] < 0) continue;
      const int slot = sch.slot_of_cell(cx, cy);
      slot_tx[slot].push_back(nodes[std::size_t(grid.relay[ci])]);
      slot_cells[slot].push_back(ci);
    }

  const double ib = interference_bound(sch.d, grid.side_c, cfg.alpha, sch.x,
                                       cfg.P, sch.gamma);
  const double sb = signal_bound(sch.d, grid.side_c, cfg.P, cfg.alpha);
  const double floor_sinr = sb / (cfg.N0 + ib);
  const double floor_rate_a = 0.5 * cfg.W * cfg.T * std::log1p(floor_sinr);

  std::vector<LinkCheck> checks;
  checks.reserve(links.size());
  for (std::size_t li = 0; li < links.size(); ++li) {
    const auto& link = links[li];
    if (grid.relay[link.tx_cell] < 0)
      throw std::invalid_argument("verify_schedule: link tx cell has no relay");
    const Vec2 tx = nodes[std::size_t(grid.relay[link.tx_cell])];
    const int cx = int(link.tx_cell % std::size_t(grid.nside));
    const int cy = int(link.tx_cell / std::size_t(grid.nside));
    {
      auto [rcx, rcy] = grid.cell_coords(link.rx);
      if (std::abs(rcx - cx) + std::abs(rcy - cy) > sch.d)
        throw std::invalid_argument("verify_schedule: link exceeds schedule distance d");
    }
    const int slot = sch.slot_of_cell(cx, cy);
    LinkCheck ck;
    ck.link = li;
    ck.slot = slot;
    ck.signal = cfg.P * path_loss(dist(tx, link.rx), cfg.alpha);
    for (std::size_t j = 0; j < slot_tx[slot].size(); ++j) {
      if (slot_cells[slot][j] == link.tx_cell) continue;
      ck.interference += cfg.P * path_loss(dist(slot_tx[slot][j], link.rx), cfg.alpha);
    }
    ck.sinr = ck.signal / (cfg.N0 + ck.interference);
    ck.sinr_floor = floor_sinr;
    ck.interference_ok = ck.interference <= ib + 1e-12;
    if (cfg.model == RateModel::B)
      ck.ok = ck.sinr >= cfg.tau;
    else
      ck.ok = rate(RateModel::A, ck.sinr, cfg) >= floor_rate_a - 1e-12;
    checks.push_back(ck);
  }
  return checks;
}

inline std::vector<LinkCheck> schedule_violations(const std::vector<LinkCheck>& checks) {
  std::vector<LinkCheck> v;
  for (const auto& c : checks)
    if (!c.ok || !c.interference_ok) v.push_back(c);
  return v;
}

}  // namespace percnet

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "percnet/corridor.hpp"
#include "percnet/lattice.hpp"
#include "percnet/load.hpp"
#include "percnet/netgen.hpp"
#include "percnet/percolation.hpp"
#include "percnet/radio.hpp"
#include "percnet/routing.hpp"

namespace percnet {

struct SimConfig {
  double c = 6.0;
  double kappa = 1.0;
  RadioConfig radio;
  int relay_d = 4;  // constant Manhattan distance for the relaying schedule
  std::uint64_t master_seed = 1;
  bool auto_power_model_b = true;
  bool keep_pair_records = true;
  // Rate accounting: false = guaranteed (bound-derived) per-link rates;
  // true = exact SINR per link with every nonempty same-slot cell transmitting
  // from its relay.
  bool exact_sinr = false;
};

struct PathRates {
  double drain = 0.0;
  double relay = 0.0;
  double deliver = 0.0;
  double bottleneck() const { return std::min({drain, relay, deliver}); }
};

struct PairRecord {
  std::uint32_t source = 0;
  std::uint32_t dest = 0;
  std::uint16_t path_count = 0;
  bool anomaly = false;
  double pair_rate = 0.0;
  std::vector<PathRates> path_rates;
};

struct ThroughputReport {
  double n = 0.0;
  std::uint64_t seed = 0;
  RateModel model = RateModel::A;
  double power = 0.0;  // transmit power actually used

  std::size_t node_count = 0;
  std::size_t pair_count = 0;
  std::size_t anomaly_count = 0;
  double throughput = 0.0;  // min pair rate over routed pairs
  double mean_paths = 0.0;
  int min_paths = 0;

  std::uint32_t l_max = 0;
  std::uint32_t max_pair_cell_incidence = 0;

  int relay_d = 0, drain_d = 0;
  int relay_k = 0, drain_k = 0;

  double max_intermediate_hop = 0.0;
  double max_drain_hop = 0.0;
  double max_deliver_hop = 0.0;
  double hop_bound_intermediate = 0.0;  // (sqrt5+sqrt2)*c
  double hop_bound_endpoint = 0.0;      // corridor width + sqrt2*c
  std::size_t hop_violations = 0;

  std::vector<PairRecord> pairs;
};

namespace detail {

struct PairWork {
  Corridor cor;
  RouteSet rs;
};

// Runs the per-pair routing pipeline. Returns false (anomaly) when the pair
// admits no crossing path; candidate nodes are gathered only from grid cells
// overlapping the corridor span between the endpoints' lattice columns.
inline bool build_pair(const SimConfig& cfg, double n,
                       const std::vector<Vec2>& nodes, const SquareGrid& grid,
                       std::size_t si, std::size_t di, PairWork& out,
                       std::vector<std::size_t>& cand) {
  const Vec2 s = nodes[si], d = nodes[di];
  if (dist(s, d) < 1e-9) return false;
  Corridor cor;
  try {
    cor = build_corridor(s, d, n, cfg.c, cfg.kappa);
  } catch (const std::invalid_argument&) {
    return false;
  }
  cor.source_idx = si;
  cor.dest_idx = di;
  const double sp = std::sqrt(2.0) * cfg.c;
  const int cols = int(std::floor(cor.length / sp + 1e-9));
  const int rows = int(std::floor(cor.width / sp + 1e-9));
  if (cols < 1 || rows < 1) return false;
  auto col_of = [&](const Vec2& p) {
    return std::clamp(int(std::floor(cor.to_local(p).x / sp)), 0, cols - 1);
  };
  const int j_lo = std::min(col_of(s), col_of(d));
  const int j_hi = std::max(col_of(s), col_of(d));

  Corridor sub = cor;  // gather rectangle: just the columns in play
  const double x_lo = std::max(0.0, j_lo * sp - cfg.c);
  const double x_hi = std::min(cor.length, (j_hi + 1) * sp + cfg.c);
  sub.origin = cor.to_world({x_lo, 0.0});
  sub.length = x_hi - x_lo;
  cand.clear();
  for_each_corridor_cell(sub, grid, [&](std::size_t ci) {
    const auto& cn = grid.cell_nodes[ci];
    cand.insert(cand.end(), cn.begin(), cn.end());
  });
  if (cand.empty()) return false;

  DiamondLattice lat;
  try {
    lat = tessellate_corridor(cor, cfg.c, nodes, cand);
  } catch (const std::invalid_argument&) {
    return false;
  }
  const BondGraph g = build_bond_graph(lat, j_lo, j_hi);
  const CrossingSet cs = max_disjoint_crossings(g);
  if (cs.count == 0) return false;
  RouteSet rs = paths_from_crossings(cs, g, lat, nodes);
  rs = truncate_to_region(std::move(rs), std::sqrt(n), nodes);
  if (rs.paths.empty()) return false;
  rs = remap_to_relays(std::move(rs), grid, nodes, &cor);
  rs = designate_endpoints(std::move(rs), s, d, nodes, &grid);
  out.cor = cor;
  out.rs = std::move(rs);
  return true;
}

struct TrialDiag {
  std::size_t node_count = 0, pair_count = 0, anomaly_count = 0;
  double mean_paths = 0.0;
  int min_paths = 0;
  std::uint32_t l_max = 0, max_pair_cell_incidence = 0;
  double max_intermediate_hop = 0.0, max_drain_hop = 0.0, max_deliver_hop = 0.0;
  std::size_t hop_violations = 0;
  int drain_d = 1;
  double worst_endpoint_dist = 0.0;
  double hop_bound_intermediate = 0.0, hop_bound_endpoint = 0.0;
};

}  // namespace detail

// Full trial: sample the network, route every source-destination pair through
// its corridor, account guaranteed rates under the TDMA schedules, and report
// T(n) = min pair rate. Reports for both rate models come from one pipeline
// run; pass nullptr to skip a model.
inline void run_trial_both(const SimConfig& cfg, double n, std::uint64_t seed,
                           ThroughputReport* rep_a, ThroughputReport* rep_b) {
  cfg.radio.validate();
  if (cfg.relay_d < 1) throw std::invalid_argument("run_trial: relay_d must be >= 1");
  NetworkInstance inst = sample_network(n, seed);
  const auto& nodes = inst.nodes;
  const std::size_t npts = nodes.size();

  auto init_report = [&](ThroughputReport& r, RateModel model) {
    r = ThroughputReport{};
    r.n = n;
    r.seed = seed;
    r.model = model;
    r.node_count = npts;
    r.relay_d = cfg.relay_d;
  };
  if (rep_a) init_report(*rep_a, RateModel::A);
  if (rep_b) init_report(*rep_b, RateModel::B);
  if (npts < 2) return;  // no traffic; empty report with zero pairs

  const TrafficPattern tp = assign_destinations(inst, seed);
  const SquareGrid grid = tessellate_squares(inst.region_radius, cfg.c, nodes);

  detail::TrialDiag diag;
  diag.node_count = npts;
  diag.pair_count = npts;
  diag.min_paths = std::numeric_limits<int>::max();
  diag.hop_bound_intermediate = (std::sqrt(5.0) + std::sqrt(2.0)) * cfg.c;
  diag.hop_bound_endpoint =
      corridor_width(n, cfg.c, cfg.kappa) + std::sqrt(2.0) * cfg.c;
  // Draining/delivery schedule distance from the endpoint hop certificate: a
  // hop of Euclidean length e spans at most sqrt(2)*e/c + 2 cells. Using the
  // certified bound keeps the schedule and the Model B power deterministic
  // functions of n.
  diag.drain_d = std::max(
      1, int(std::ceil(std::sqrt(2.0) * diag.hop_bound_endpoint / cfg.c)) + 2);

  std::vector<std::uint32_t> load(grid.cell_count(), 0);
  std::vector<std::uint32_t> drain_tx(grid.cell_count(), 0);
  std::vector<std::uint32_t> deliver_tx(grid.cell_count(), 0);
  std::vector<std::uint16_t> path_count(npts, 0);
  std::vector<char> anomaly(npts, 0);

  // Pass 1: route every pair, accumulating loads and certificates. Routes are
  // rebuilt in pass 2 once the load map is complete, so nothing per-pair needs
  // to stay in memory.
  detail::PairWork work;
  std::vector<std::size_t> cand;
  std::vector<std::size_t> pair_cells;
  std::size_t total_paths = 0;
  for (std::size_t si = 0; si < npts; ++si) {
    const std::size_t di = tp.dest_of[si];
    if (!detail::build_pair(cfg, n, nodes, grid, si, di, work, cand)) {
      anomaly[si] = 1;
      ++diag.anomaly_count;
      continue;
    }
    const RouteSet& rs = work.rs;
    path_count[si] = std::uint16_t(std::min<std::size_t>(rs.paths.size(), 65535));
    total_paths += rs.paths.size();
    diag.min_paths = std::min(diag.min_paths, int(rs.paths.size()));
    pair_cells.clear();
    for (const auto& p : rs.paths) {
      for (std::uint32_t idx : p.node_seq) {
        const std::size_t ci = grid.cell_of(nodes[idx]);
        ++load[ci];
        pair_cells.push_back(ci);
      }
      ++deliver_tx[grid.cell_of(nodes[p.node_seq.back()])];
      const double mih = p.max_hop();
      diag.max_intermediate_hop = std::max(diag.max_intermediate_hop, mih);
      diag.max_drain_hop = std::max(diag.max_drain_hop, p.drain_hop);
      diag.max_deliver_hop = std::max(diag.max_deliver_hop, p.deliver_hop);
      if (mih > diag.hop_bound_intermediate + 1e-9) ++diag.hop_violations;
      if (p.drain_hop > diag.hop_bound_endpoint + 1e-9) ++diag.hop_violations;
      if (p.deliver_hop > diag.hop_bound_endpoint + 1e-9) ++diag.hop_violations;
      if (std::max(p.drain_cells, p.deliver_cells) > diag.drain_d)
        ++diag.hop_violations;  // schedule coverage certificate
      diag.worst_endpoint_dist =
          std::max({diag.worst_endpoint_dist, p.drain_hop, p.deliver_hop});
    }
    drain_tx[grid.cell_of(nodes[si])] += std::uint32_t(rs.paths.size());
    std::sort(pair_cells.begin(), pair_cells.end());
    for (std::size_t i = 0; i < pair_cells.size();) {
      std::size_t j = i;
      while (j < pair_cells.size() && pair_cells[j] == pair_cells[i]) ++j;
      diag.max_pair_cell_incidence =
          std::max<std::uint32_t>(diag.max_pair_cell_incidence, std::uint32_t(j - i));
      i = j;
    }
  }
  for (std::uint32_t l : load) diag.l_max = std::max(diag.l_max, l);
  const std::size_t routed = npts - diag.anomaly_count;
  diag.mean_paths = routed ? double(total_paths) / double(routed) : 0.0;
  if (!routed) diag.min_paths = 0;

  // Schedules: constant-d for intermediate relaying, certificate-derived d for
  // the draining and delivery hops.
  const double gamma = gamma_series(cfg.radio.alpha);
  const TdmaSpacing sp_relay =
      tdma_spacing(cfg.relay_d, cfg.c, cfg.radio.alpha, cfg.radio.tau, gamma);
  const TdmaSpacing sp_drain =
      tdma_spacing(diag.drain_d, cfg.c, cfg.radio.alpha, cfg.radio.tau, gamma);

  // Minimum power for a guaranteed SINR >= tau at link distance `dv` under the
  // d-schedule's interference bound.
  auto min_power_for = [&](double dv, int d, int x) {
    const double eta = path_loss(dv, cfg.radio.alpha);
    const double iterm = cfg.radio.tau * 16.0 * gamma /
                         std::pow(cfg.c * (d + 1) * x, cfg.radio.alpha);
    const double denom = eta - iterm;
    if (!(denom > 0))
      throw std::runtime_error("run_trial: Model B infeasible at measured hop distance");
    return cfg.radio.tau * cfg.radio.N0 / denom;
  };

  // Relay links are certified no longer than the intermediate hop bound, so
  // that bound (not the schedule's looser c*(d+1)) is their worst distance.
  const double relay_dist = diag.hop_bound_intermediate;
  RadioConfig radio_a = cfg.radio;
  radio_a.model = RateModel::A;
  RadioConfig radio_b = cfg.radio;
  radio_b.model = RateModel::B;
  if (rep_b && cfg.auto_power_model_b && routed) {
    // Power sized for the certified hop bounds, not the measured hops: both
    // bounds are deterministic in n, so the recorded power is too, and grows
    // strictly with the corridor width.
    radio_b.P = std::max(min_power_for(relay_dist, cfg.relay_d, sp_relay.x),
                         min_power_for(diag.hop_bound_endpoint, diag.drain_d,
                                       sp_drain.x)) *
                (1.0 + 1e-9);
  }

  auto link_rate = [&](const RadioConfig& rc, double dv, int d,
                       const TdmaSpacing& sp) {
    const double ib = interference_bound(d, cfg.c, rc.alpha, sp.x, rc.P, gamma);
    const double s = rc.P * path_loss(dv, rc.alpha) / (rc.N0 + ib);
    return rate(rc.model, s, rc) / (double(sp.k) * sp.k);
  };
  const double relay_base_a = link_rate(radio_a, relay_dist, cfg.relay_d, sp_relay);
  const double relay_base_b = link_rate(radio_b, relay_dist, cfg.relay_d, sp_relay);

  // Exact-SINR mode: per schedule, the same-slot transmitter positions (cell
  // relays) so each link's interference can be summed outright.
  struct SlotMap {
    int k = 0;
    std::vector<std::vector<Vec2>> tx;
    std::vector<std::vector<std::size_t>> cells;
  };
  auto build_slots = [&](int k) {
    SlotMap sm;
    sm.k = k;
    sm.tx.resize(std::size_t(k) * k);
    sm.cells.resize(std::size_t(k) * k);
    for (int cy = 0; cy < grid.nside; ++cy)
      for (int cx = 0; cx < grid.nside; ++cx) {
        const std::size_t ci = grid.cell_index(cx, cy);
        if (grid.relay[ci] < 0) continue;
        const int slot = (((cy % k) + k) % k) * k + ((cx % k) + k) % k;
        sm.tx[std::size_t(slot)].push_back(nodes[std::size_t(grid.relay[ci])]);
        sm.cells[std::size_t(slot)].push_back(ci);
      }
    return sm;
  };
  SlotMap slots_relay, slots_drain;
  if (cfg.exact_sinr) {
    slots_relay = build_slots(sp_relay.k);
    slots_drain = build_slots(sp_drain.k);
  }
  // Exact rate of a link transmitting from tx_pos in tx_cell to rx.
  auto exact_rate = [&](const RadioConfig& rc, const SlotMap& sm,
                        std::size_t tx_cell, const Vec2& tx_pos, const Vec2& rx) {
    const int cx = int(tx_cell % std::size_t(grid.nside));
    const int cy = int(tx_cell / std::size_t(grid.nside));
    const int slot = (((cy % sm.k) + sm.k) % sm.k) * sm.k + ((cx % sm.k) + sm.k) % sm.k;
    double interference = 0.0;
    const auto& tx_list = sm.tx[std::size_t(slot)];
    const auto& cell_list = sm.cells[std::size_t(slot)];
    for (std::size_t j = 0; j < tx_list.size(); ++j)
      if (cell_list[j] != tx_cell)
        interference += rc.P * path_loss(dist(tx_list[j], rx), rc.alpha);
    const double s = rc.P * path_loss(dist(tx_pos, rx), rc.alpha) /
                     (rc.N0 + interference);
    return rate(rc.model, s, rc) / (double(sm.k) * sm.k);
  };

  auto fill_shared = [&](ThroughputReport& r) {
    r.pair_count = diag.pair_count;
    r.anomaly_count = diag.anomaly_count;
    r.mean_paths = diag.mean_paths;
    r.min_paths = diag.min_paths;
    r.l_max = diag.l_max;
    r.max_pair_cell_incidence = diag.max_pair_cell_incidence;
    r.drain_d = diag.drain_d;
    r.relay_k = sp_relay.k;
    r.drain_k = sp_drain.k;
    r.max_intermediate_hop = diag.max_intermediate_hop;
    r.max_drain_hop = diag.max_drain_hop;
    r.max_deliver_hop = diag.max_deliver_hop;
    r.hop_bound_intermediate = diag.hop_bound_intermediate;
    r.hop_bound_endpoint = diag.hop_bound_endpoint;
    r.hop_violations = diag.hop_violations;
    r.throughput = routed ? std::numeric_limits<double>::infinity() : 0.0;
    if (cfg.keep_pair_records) r.pairs.reserve(npts);
  };
  if (rep_a) {
    fill_shared(*rep_a);
    rep_a->power = radio_a.P;
  }
  if (rep_b) {
    fill_shared(*rep_b);
    rep_b->power = radio_b.P;
  }

  // Pass 2: rebuild each pair's routes (deterministic) and account rates
  // against the finished load map.
  for (std::size_t si = 0; si < npts; ++si) {
    const std::size_t di = tp.dest_of[si];
    auto record_anomaly = [&](ThroughputReport& r) {
      if (!cfg.keep_pair_records) return;
      PairRecord pr;
      pr.source = std::uint32_t(si);
      pr.dest = std::uint32_t(di);
      pr.anomaly = true;
      r.pairs.push_back(std::move(pr));
    };
    if (anomaly[si]) {
      if (rep_a) record_anomaly(*rep_a);
      if (rep_b) record_anomaly(*rep_b);
      continue;
    }
    if (!detail::build_pair(cfg, n, nodes, grid, si, di, work, cand))
      throw std::logic_error("run_trial: pipeline not deterministic across passes");
    const RouteSet& rs = work.rs;
    const std::size_t src_cell = grid.cell_of(nodes[si]);
    auto account = [&](ThroughputReport& r, const RadioConfig& rc,
                       double relay_base) {
      PairRecord pr;
      pr.source = std::uint32_t(si);
      pr.dest = std::uint32_t(di);
      pr.path_count = path_count[si];
      for (const auto& p : rs.paths) {
        PathRates pra;
        if (cfg.exact_sinr) {
          pra.drain = exact_rate(rc, slots_drain, src_cell, nodes[si],
                                 nodes[p.node_seq.front()]) /
                      double(drain_tx[src_cell]);
          pra.relay = std::numeric_limits<double>::infinity();
          for (std::size_t h = 0; h + 1 < p.node_seq.size(); ++h) {
            const std::size_t hc = grid.cell_of(nodes[p.node_seq[h]]);
            pra.relay = std::min(
                pra.relay, exact_rate(rc, slots_relay, hc, nodes[p.node_seq[h]],
                                      nodes[p.node_seq[h + 1]]) /
                               double(load[hc]));
          }
          const std::size_t dc = grid.cell_of(nodes[p.node_seq.back()]);
          pra.deliver =
              exact_rate(rc, slots_drain, dc, nodes[p.node_seq.back()], nodes[di]) /
              double(deliver_tx[dc]);
        } else {
          pra.drain = link_rate(rc, p.drain_hop, diag.drain_d, sp_drain) /
                      double(drain_tx[src_cell]);
          std::uint32_t max_l = 1;
          for (std::uint32_t idx : p.node_seq)
            max_l = std::max(max_l, load[grid.cell_of(nodes[idx])]);
          pra.relay = p.node_seq.size() >= 2
                          ? relay_base / double(max_l)
                          : std::numeric_limits<double>::infinity();
          pra.deliver =
              link_rate(rc, p.deliver_hop, diag.drain_d, sp_drain) /
              double(deliver_tx[grid.cell_of(nodes[p.node_seq.back()])]);
        }
        pr.pair_rate += pra.bottleneck();
        if (cfg.keep_pair_records) pr.path_rates.push_back(pra);
      }
      r.throughput = std::min(r.throughput, pr.pair_rate);
      if (cfg.keep_pair_records) r.pairs.push_back(std::move(pr));
    };
    if (rep_a) account(*rep_a, radio_a, relay_base_a);
    if (rep_b) account(*rep_b, radio_b, relay_base_b);
  }
  if (rep_a && !std::isfinite(rep_a->throughput)) rep_a->throughput = 0.0;
  if (rep_b && !std::isfinite(rep_b->throughput)) rep_b->throughput = 0.0;
}

inline ThroughputReport run_trial(const SimConfig& cfg, double n,
                                  std::uint64_t seed) {
  ThroughputReport rep;
  if (cfg.radio.model == RateModel::A)
    run_trial_both(cfg, n, seed, &rep, nullptr);
  else
    run_trial_both(cfg, n, seed, nullptr, &rep);
  return rep;
}

// Loading-factor trial: routes every pair once and accumulates per-cell path
// incidences without rate accounting, so one pass suffices.
struct LoadReport {
  double n = 0.0;
  std::uint64_t seed = 0;
  std::size_t node_count = 0, pair_count = 0, anomaly_count = 0;
  double mean_paths = 0.0;
  int min_paths = 0;
  std::uint32_t l_max = 0, max_pair_cell_incidence = 0;
  double load_bound_value = 0.0;  // 27*pi*sqrt(n)*ln(n)
  double max_intermediate_hop = 0.0, max_drain_hop = 0.0, max_deliver_hop = 0.0;
  double hop_bound_intermediate = 0.0, hop_bound_endpoint = 0.0;
  std::size_t hop_violations = 0;
  std::vector<std::uint32_t> load;  // per-cell, indexed like grid
  SquareGrid grid;
};

inline LoadReport run_load_trial(const SimConfig& cfg, double n,
                                 std::uint64_t seed) {
  if (cfg.relay_d < 1)
    throw std::invalid_argument("run_load_trial: relay_d must be >= 1");
  NetworkInstance inst = sample_network(n, seed);
  const auto& nodes = inst.nodes;
  LoadReport lr;
  lr.n = n;
  lr.seed = seed;
  lr.node_count = nodes.size();
  lr.load_bound_value = load_bound(n);
  lr.hop_bound_intermediate = (std::sqrt(5.0) + std::sqrt(2.0)) * cfg.c;
  lr.hop_bound_endpoint = corridor_width(n, cfg.c, cfg.kappa) + std::sqrt(2.0) * cfg.c;
  const int drain_d = std::max(
      1, int(std::ceil(std::sqrt(2.0) * lr.hop_bound_endpoint / cfg.c)) + 2);
  lr.grid = tessellate_squares(inst.region_radius, cfg.c, nodes);
  lr.load.assign(lr.grid.cell_count(), 0);
  if (nodes.size() < 2) return lr;
  lr.pair_count = nodes.size();
  lr.min_paths = std::numeric_limits<int>::max();

  const TrafficPattern tp = assign_destinations(inst, seed);
  detail::PairWork work;
  std::vector<std::size_t> cand;
  std::vector<std::size_t> pair_cells;
  std::size_t total_paths = 0;
  for (std::size_t si = 0; si < nodes.size(); ++si) {
    if (!detail::build_pair(cfg, n, nodes, lr.grid, si, tp.dest_of[si], work, cand)) {
      ++lr.anomaly_count;
      continue;
    }
    const RouteSet& rs = work.rs;
    total_paths += rs.paths.size();
    lr.min_paths = std::min(lr.min_paths, int(rs.paths.size()));
    pair_cells.clear();
    for (const auto& p : rs.paths) {
      for (std::uint32_t idx : p.node_seq) {
        const std::size_t ci = lr.grid.cell_of(nodes[idx]);
        ++lr.load[ci];
        pair_cells.push_back(ci);
      }
      const double mih = p.max_hop();
      lr.max_intermediate_hop = std::max(lr.max_intermediate_hop, mih);
      lr.max_drain_hop = std::max(lr.max_drain_hop, p.drain_hop);
      lr.max_deliver_hop = std::max(lr.max_deliver_hop, p.deliver_hop);
      if (mih > lr.hop_bound_intermediate + 1e-9) ++lr.hop_violations;
      if (p.drain_hop > lr.hop_bound_endpoint + 1e-9) ++lr.hop_violations;
      if (p.deliver_hop > lr.hop_bound_endpoint + 1e-9) ++lr.hop_violations;
      if (std::max(p.drain_cells, p.deliver_cells) > drain_d)
        ++lr.hop_violations;  // schedule coverage certificate
    }
    std::sort(pair_cells.begin(), pair_cells.end());
    for (std::size_t i = 0; i < pair_cells.size();) {
      std::size_t j = i;
      while (j < pair_cells.size() && pair_cells[j] == pair_cells[i]) ++j;
      lr.max_pair_cell_incidence =
          std::max<std::uint32_t>(lr.max_pair_cell_incidence, std::uint32_t(j - i));
      i = j;
    }
  }
  for (std::uint32_t l : lr.load) lr.l_max = std::max(lr.l_max, l);
  const std::size_t routed = lr.pair_count - lr.anomaly_count;
  lr.mean_paths = routed ? double(total_paths) / double(routed) : 0.0;
  if (!routed) lr.min_paths = 0;
  return lr;
}

// ---------------------------------------------------------------------------

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  double r2 = 0.0;
  int points = 0;
};

// OLS fit of ln(y) against ln(x); nonpositive values are skipped.
inline FitResult fit_loglog(const std::vector<double>& xs,
                            const std::vector<double>& ys) {
  if (xs.size() != ys.size())
    throw std::invalid_argument("fit_loglog: size mismatch");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (xs[i] > 0 && ys[i] > 0) {
      lx.push_back(std::log(xs[i]));
      ly.push_back(std::log(ys[i]));
    }
  FitResult f;
  f.points = int(lx.size());
  if (lx.size() < 2) return f;
  const double nn = double(lx.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= nn;
  my /= nn;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 0)) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double e = ly[i] - (f.intercept + f.slope * lx[i]);
    sse += e * e;
  }
  f.r2 = syy > 0 ? 1.0 - sse / syy : 1.0;
  f.stderr_slope = lx.size() > 2 ? std::sqrt(sse / (nn - 2.0) / sxx) : 0.0;
  return f;
}

struct SweepRow {
  double n = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  std::size_t nodes = 0, pairs = 0, anomalies = 0, hop_violations = 0;
  double mean_paths = 0.0;
  int min_paths = 0;
  std::uint32_t l_max = 0;
  double throughput_a = 0.0;
  double throughput_b = 0.0;
  double power_b = 0.0;
};

struct ScalingReport {
  SimConfig config;
  std::vector<double> n_values;
  int trials = 0;
  std::vector<SweepRow> rows;  // ordered by (n index, trial)
  std::vector<double> mean_throughput_a;  // per n
  std::vector<double> mean_throughput_b;
  std::vector<double> mean_power_b;
  FitResult fit_a, fit_b;
};

// Sweeps n values x trials; every trial's seed derives from the master seed
// and the (n, trial) index alone, so rows are identical for any worker count.
inline ScalingReport sweep(const SimConfig& cfg,
                           const std::vector<double>& n_values, int trials,
                           int workers = 1) {
  if (trials < 1 || n_values.empty())
    throw std::invalid_argument("sweep: need at least one n value and one trial");
  ScalingReport rep;
  rep.config = cfg;
  rep.n_values = n_values;
  rep.trials = trials;
  rep.rows.resize(n_values.size() * std::size_t(trials));

  SimConfig trial_cfg = cfg;
  trial_cfg.keep_pair_records = false;
  auto run_one = [&](std::size_t flat) {
    const std::size_t ni = flat / std::size_t(trials);
    const int t = int(flat % std::size_t(trials));
    const std::uint64_t seed = derive_seed(
        cfg.master_seed, stream_tag::trial, (std::uint64_t(ni) << 32) | std::uint64_t(t));
    ThroughputReport a, b;
    run_trial_both(trial_cfg, n_values[ni], seed, &a, &b);
    SweepRow& row = rep.rows[flat];
    row.n = n_values[ni];
    row.trial = t;
    row.seed = seed;
    row.nodes = a.node_count;
    row.pairs = a.pair_count;
    row.anomalies = a.anomaly_count;
    row.hop_violations = a.hop_violations;
    row.mean_paths = a.mean_paths;
    row.min_paths = a.min_paths;
    row.l_max = a.l_max;
    row.throughput_a = a.throughput;
    row.throughput_b = b.throughput;
    row.power_b = b.power;
  };

  const std::size_t total = rep.rows.size();
  if (workers <= 1) {
    for (std::size_t i = 0; i < total; ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= total) return;
          run_one(i);
        }
      });
    for (auto& th : pool) th.join();
  }

  for (std::size_t ni = 0; ni < n_values.size(); ++ni) {
    double ta = 0, tb = 0, pb = 0;
    for (int t = 0; t < trials; ++t) {
      const SweepRow& r = rep.rows[ni * std::size_t(trials) + std::size_t(t)];
      ta += r.throughput_a;
      tb += r.throughput_b;
      pb += r.power_b;
    }
    rep.mean_throughput_a.push_back(ta / trials);
    rep.mean_throughput_b.push_back(tb / trials);
    rep.mean_power_b.push_back(pb / trials);
  }
  rep.fit_a = fit_loglog(n_values, rep.mean_throughput_a);
  rep.fit_b = fit_loglog(n_values, rep.mean_throughput_b);
  return rep;
}

namespace detail {
inline std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(15) << v;
  return os.str();
}
}  // namespace detail

inline void sweep_to_csv(const ScalingReport& rep, std::ostream& os) {
  os << "n,trial,seed,nodes,pairs,mean_paths,min_paths,l_max,"
        "throughput_model_a,throughput_model_b,power_model_b,anomalies,"
        "hop_violations\n";
  for (const auto& r : rep.rows)
    os << detail::fmt(r.n) << ',' << r.trial << ',' << r.seed << ',' << r.nodes
       << ',' << r.pairs << ',' << detail::fmt(r.mean_paths) << ','
       << r.min_paths << ',' << r.l_max << ',' << detail::fmt(r.throughput_a)
       << ',' << detail::fmt(r.throughput_b) << ',' << detail::fmt(r.power_b)
       << ',' << r.anomalies << ',' << r.hop_violations << '\n';
}

inline nlohmann::json radio_to_json(const RadioConfig& rc) {
  return {{"P", rc.P},     {"alpha", rc.alpha}, {"N0", rc.N0},
          {"tau", rc.tau}, {"W", rc.W},         {"T", rc.T},
          {"B", rc.B},     {"model", to_string(rc.model)}};
}

inline nlohmann::json sim_config_to_json(const SimConfig& cfg) {
  return {{"c", cfg.c},
          {"kappa", cfg.kappa},
          {"radio", radio_to_json(cfg.radio)},
          {"relay_d", cfg.relay_d},
          {"master_seed", cfg.master_seed},
          {"auto_power_model_b", cfg.auto_power_model_b},
          {"exact_sinr", cfg.exact_sinr}};
}

inline nlohmann::json report_to_json(const ThroughputReport& r,
                                     const SimConfig& cfg,
                                     bool include_pairs = true) {
  nlohmann::json j;
  j["config"] = sim_config_to_json(cfg);
  j["n"] = r.n;
  j["seed"] = r.seed;
  j["model"] = to_string(r.model);
  j["power"] = r.power;
  j["nodes"] = r.node_count;
  j["pairs"] = r.pair_count;
  j["anomalies"] = r.anomaly_count;
  j["throughput"] = r.throughput;
  j["mean_paths"] = r.mean_paths;
  j["min_paths"] = r.min_paths;
  j["l_max"] = r.l_max;
  j["max_pair_cell_incidence"] = r.max_pair_cell_incidence;
  j["relay_d"] = r.relay_d;
  j["drain_d"] = r.drain_d;
  j["relay_k"] = r.relay_k;
  j["drain_k"] = r.drain_k;
  j["max_intermediate_hop"] = r.max_intermediate_hop;
  j["max_drain_hop"] = r.max_drain_hop;
  j["max_deliver_hop"] = r.max_deliver_hop;
  j["hop_bound_intermediate"] = r.hop_bound_intermediate;
  j["hop_bound_endpoint"] = r.hop_bound_endpoint;
  j["hop_violations"] = r.hop_violations;
  if (include_pairs) {
    auto& pairs = j["pair_records"] = nlohmann::json::array();
    for (const auto& p : r.pairs) {
      nlohmann::json pj;
      pj["source"] = p.source;
      pj["dest"] = p.dest;
      pj["path_count"] = p.path_count;
      pj["anomaly"] = p.anomaly;
      pj["pair_rate"] = p.pair_rate;
      auto& rates = pj["path_rates"] = nlohmann::json::array();
      for (const auto& pr : p.path_rates)
        rates.push_back({{"drain", pr.drain},
                         {"relay", pr.relay},
                         {"deliver", pr.deliver}});
      pairs.push_back(std::move(pj));
    }
  }
  return j;
}

inline nlohmann::json fit_to_json(const FitResult& f) {
  return {{"exponent", f.slope},
          {"stderr", f.stderr_slope},
          {"intercept", f.intercept},
          {"r2", f.r2},
          {"points", f.points}};
}

inline nlohmann::json scaling_to_json(const ScalingReport& rep) {
  nlohmann::json j;
  j["config"] = sim_config_to_json(rep.config);
  j["trials"] = rep.trials;
  auto& results = j["results"] = nlohmann::json::array();
  for (std::size_t ni = 0; ni < rep.n_values.size(); ++ni) {
    nlohmann::json nj;
    nj["n"] = rep.n_values[ni];
    nj["mean_throughput_a"] = rep.mean_throughput_a[ni];
    nj["mean_throughput_b"] = rep.mean_throughput_b[ni];
    nj["mean_power_b"] = rep.mean_power_b[ni];
    auto& rows = nj["rows"] = nlohmann::json::array();
    for (int t = 0; t < rep.trials; ++t) {
      const SweepRow& r = rep.rows[ni * std::size_t(rep.trials) + std::size_t(t)];
      rows.push_back({{"trial", r.trial},
                      {"seed", r.seed},
                      {"nodes", r.nodes},
                      {"anomalies", r.anomalies},
                      {"hop_violations", r.hop_violations},
                      {"mean_paths", r.mean_paths},
                      {"min_paths", r.min_paths},
                      {"l_max", r.l_max},
                      {"throughput_a", r.throughput_a},
                      {"throughput_b", r.throughput_b},
                      {"power_b", r.power_b}});
    }
    results.push_back(std::move(nj));
  }
  j["fits"] = {{"modelA", fit_to_json(rep.fit_a)},
               {"modelB", fit_to_json(rep.fit_b)}};
  return j;
}

inline nlohmann::json load_report_to_json(const LoadReport& lr) {
  return {{"n", lr.n},
          {"seed", lr.seed},
          {"node_count", lr.node_count},
          {"pair_count", lr.pair_count},
          {"anomaly_count", lr.anomaly_count},
          {"mean_paths", lr.mean_paths},
          {"min_paths", lr.min_paths},
          {"l_max", lr.l_max},
          {"load_bound", lr.load_bound_value},
          {"max_pair_cell_incidence", lr.max_pair_cell_incidence},
          {"max_intermediate_hop", lr.max_intermediate_hop},
          {"max_drain_hop", lr.max_drain_hop},
          {"max_deliver_hop", lr.max_deliver_hop},
          {"hop_bound_intermediate", lr.hop_bound_intermediate},
          {"hop_bound_endpoint", lr.hop_bound_endpoint},
          {"hop_violations", lr.hop_violations}};
}

// ---------------------------------------------------------------------------

// Standalone corridor Monte Carlo: Poisson points in an axis-aligned
// length x width rectangle, tessellated at side c. Used for percolation
// statistics decoupled from the disk-restricted network.
inline DiamondLattice sample_rect_lattice(double length, double width, double c,
                                          std::uint64_t seed,
                                          std::vector<Vec2>* points = nullptr) {
  if (!(length > 0) || !(width > 0))
    throw std::invalid_argument("sample_rect_lattice: empty rectangle");
  Corridor cor;
  cor.origin = {0, 0};
  cor.axis = {1, 0};
  cor.length = length;
  cor.width = width;
  Rng rng(derive_seed(seed, stream_tag::lattice));
  const std::uint64_t count = rng.poisson(length * width);
  std::vector<Vec2> pts;
  pts.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i)
    pts.push_back({rng.uniform(0.0, length), rng.uniform(0.0, width)});
  DiamondLattice lat = tessellate_corridor(cor, c, pts);
  if (points) *points = std::move(pts);
  return lat;
}

struct PercStats {
  double n = 0.0, c = 0.0, kappa = 0.0;
  int trials = 0;
  int rows = 0, cols = 0;
  int m = 0;
  double prob_lower = 0.0;
  double mean_crossings = 0.0;
  int min_crossings = 0, max_crossings = 0;
  double frac_at_least_m = 0.0;
  double open_fraction = 0.0;
  double expected_open_fraction = 0.0;
};

// Empirical check of the crossing guarantee on freshly sampled corridors.
inline PercStats corridor_percolation_stats(double n, double c, double kappa,
                                            int trials,
                                            std::uint64_t master_seed) {
  if (trials < 1) throw std::invalid_argument("corridor_percolation_stats: trials < 1");
  PercStats st;
  st.n = n;
  st.c = c;
  st.kappa = kappa;
  st.trials = trials;
  const Lemma2Bound b = lemma2_bound(n, c, kappa);
  st.m = b.m;
  st.prob_lower = b.prob_lower;
  st.expected_open_fraction = 1.0 - std::exp(-c * c);
  const double length = 2.0 * std::sqrt(n);
  const double width = corridor_width(n, c, kappa);
  st.min_crossings = std::numeric_limits<int>::max();
  double open_sum = 0.0;
  std::size_t diamonds = 0;
  for (int t = 0; t < trials; ++t) {
    const DiamondLattice lat = sample_rect_lattice(
        length, width, c, derive_seed(master_seed, stream_tag::trial, std::uint64_t(t)));
    st.rows = lat.rows;
    st.cols = lat.cols;
    const int cross = max_disjoint_crossings(build_bond_graph(lat)).count;
    st.mean_crossings += cross;
    st.min_crossings = std::min(st.min_crossings, cross);
    st.max_crossings = std::max(st.max_crossings, cross);
    if (cross >= st.m) st.frac_at_least_m += 1.0;
    open_sum += double(lat.open_count());
    diamonds += lat.diamond_count();
  }
  st.mean_crossings /= trials;
  st.frac_at_least_m /= trials;
  st.open_fraction = diamonds ? open_sum / double(diamonds) : 0.0;
  return st;
}

inline nlohmann::json perc_stats_to_json(const PercStats& st) {
  return {{"n", st.n},
          {"c", st.c},
          {"kappa", st.kappa},
          {"trials", st.trials},
          {"rows", st.rows},
          {"cols", st.cols},
          {"m", st.m},
          {"prob_lower", st.prob_lower},
          {"mean_crossings", st.mean_crossings},
          {"min_crossings", st.min_crossings},
          {"max_crossings", st.max_crossings},
          {"frac_at_least_m", st.frac_at_least_m},
          {"open_fraction", st.open_fraction},
          {"expected_open_fraction", st.expected_open_fraction}};
}

}  // namespace percnet

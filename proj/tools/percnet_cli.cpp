// Command-line front end: subcommand dispatch, config resolution, report
// emission. All randomness flows from --seed; output is identical for any
// --workers value.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "percnet/percnet.hpp"

using nlohmann::json;
using namespace percnet;

namespace {

struct Options {
  SimConfig sim;
  std::string model = "A";
  double n = 1e4;
  std::vector<double> n_values = {500, 1000, 2000, 4000, 8000};
  int trials = 20;
  int workers = 1;
  int d = 1;
  double power = -1.0;  // <0: model A uses 1.0, model B uses min feasible
  int link_limit = 20;
  std::string config_path;
  std::string out_json;
  std::string out_csv;
  bool include_pairs = false;
};

void apply_config_json(Options& o, const json& j) {
  if (j.contains("c")) o.sim.c = j["c"].get<double>();
  if (j.contains("kappa")) o.sim.kappa = j["kappa"].get<double>();
  if (j.contains("alpha")) o.sim.radio.alpha = j["alpha"].get<double>();
  if (j.contains("tau")) o.sim.radio.tau = j["tau"].get<double>();
  if (j.contains("N0")) o.sim.radio.N0 = j["N0"].get<double>();
  if (j.contains("W")) o.sim.radio.W = j["W"].get<double>();
  if (j.contains("T")) o.sim.radio.T = j["T"].get<double>();
  if (j.contains("B")) o.sim.radio.B = j["B"].get<double>();
  if (j.contains("P")) o.sim.radio.P = j["P"].get<double>();
  if (j.contains("model")) o.model = j["model"].get<std::string>();
  if (j.contains("relay_d")) o.sim.relay_d = j["relay_d"].get<int>();
  if (j.contains("master_seed")) o.sim.master_seed = j["master_seed"].get<std::uint64_t>();
  if (j.contains("auto_power_model_b"))
    o.sim.auto_power_model_b = j["auto_power_model_b"].get<bool>();
  if (j.contains("exact_sinr")) o.sim.exact_sinr = j["exact_sinr"].get<bool>();
  if (j.contains("n")) o.n = j["n"].get<double>();
  if (j.contains("n_values")) o.n_values = j["n_values"].get<std::vector<double>>();
  if (j.contains("trials")) o.trials = j["trials"].get<int>();
  if (j.contains("workers")) o.workers = j["workers"].get<int>();
}

// Registers the shared flags on a subcommand; values land in `o` after the
// config file (if any) has been applied, so explicit flags win.
void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config_path,
                  "JSON config file; 'default' for built-in defaults");
  cmd->add_option("--c", o.sim.c, "square/diamond side length c");
  cmd->add_option("--kappa", o.sim.kappa, "corridor width coefficient kappa");
  cmd->add_option("--alpha", o.sim.radio.alpha, "path-loss exponent (> 2)");
  cmd->add_option("--tau", o.sim.radio.tau, "Model B SINR threshold");
  cmd->add_option("--N0", o.sim.radio.N0, "noise power");
  cmd->add_option("--W", o.sim.radio.W, "bandwidth");
  cmd->add_option("--T", o.sim.radio.T, "slot duration");
  cmd->add_option("--B", o.sim.radio.B, "Model B rate");
  cmd->add_option("--P", o.sim.radio.P, "transmit power");
  cmd->add_option("--model", o.model, "rate model: A or B");
  cmd->add_option("--relay-d", o.sim.relay_d, "relaying schedule cell distance");
  cmd->add_option("--seed", o.sim.master_seed, "master seed");
  cmd->add_flag("--exact-sinr", o.sim.exact_sinr,
                "account exact per-link SINR instead of guaranteed bounds");
  cmd->add_flag("!--no-auto-power", o.sim.auto_power_model_b,
                "disable per-trial Model B power selection");
  cmd->add_option("--json", o.out_json, "write the JSON report to this file");
}

// Re-parses so the precedence is: built-in defaults < config file < flags.
void resolve_config(CLI::App& app, CLI::App* cmd, Options& o, int argc,
                    char** argv) {
  if (o.config_path.empty() || o.config_path == "default") return;
  std::ifstream in(o.config_path);
  if (!in) throw CLI::ValidationError("--config", "unreadable file: " + o.config_path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw CLI::ValidationError("--config", std::string("invalid JSON: ") + e.what());
  }
  Options fresh;
  fresh.config_path = o.config_path;
  apply_config_json(fresh, j);
  o = fresh;
  (void)cmd;
  app.clear();
  app.parse(argc, argv);  // flags override the config values now in place
}

RateModel parse_model(const std::string& m) {
  if (m == "A" || m == "a") return RateModel::A;
  if (m == "B" || m == "b") return RateModel::B;
  throw CLI::ValidationError("--model", "must be A or B");
}

void emit(const json& j, const std::string& path) {
  if (path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
  }
}

void emit_csv(const std::string& body, const std::string& path) {
  if (path.empty()) {
    std::cout << body;
  } else {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << body;
  }
}

int run_simulate(Options& o) {
  o.sim.radio.model = parse_model(o.model);
  if (o.power >= 0) o.sim.radio.P = o.power;
  const std::uint64_t seed = derive_seed(o.sim.master_seed, stream_tag::trial, 0);
  const ThroughputReport rep = run_trial(o.sim, o.n, seed);
  emit(report_to_json(rep, o.sim, o.include_pairs), o.out_json);
  return 0;
}

int run_sweep(Options& o) {
  o.sim.radio.model = parse_model(o.model);
  const ScalingReport rep = sweep(o.sim, o.n_values, o.trials, o.workers);
  std::ostringstream csv;
  sweep_to_csv(rep, csv);
  emit_csv(csv.str(), o.out_csv);
  if (!o.out_json.empty() || !o.out_csv.empty())
    emit(scaling_to_json(rep), o.out_json);
  return 0;
}

int run_perc_stats(Options& o) {
  const PercStats st =
      corridor_percolation_stats(o.n, o.sim.c, o.sim.kappa, o.trials, o.sim.master_seed);
  std::printf("n=%g c=%g kappa=%g trials=%d\n", st.n, st.c, st.kappa, st.trials);
  std::printf("corridor lattice: %d rows x %d cols\n", st.rows, st.cols);
  std::printf("m=%d prob_lower=%.7f\n", st.m, st.prob_lower);
  std::printf("crossings: mean=%.3f min=%d max=%d frac_at_least_m=%.4f\n",
              st.mean_crossings, st.min_crossings, st.max_crossings,
              st.frac_at_least_m);
  std::printf("open fraction: %.6f (expected %.6f)\n", st.open_fraction,
              st.expected_open_fraction);
  if (!o.out_json.empty()) emit(perc_stats_to_json(st), o.out_json);
  return 0;
}

int run_verify_sinr(Options& o) {
  o.sim.radio.model = parse_model(o.model);
  RadioConfig rc = o.sim.radio;
  const double gamma = gamma_series(rc.alpha);
  const double pmin =
      min_power_model_b(o.d, o.sim.c, rc.alpha, rc.tau, rc.N0, gamma);
  std::printf("P_min(d=%d, c=%g, alpha=%g, tau=%g, N0=%g) = %.3f\n", o.d,
              o.sim.c, rc.alpha, rc.tau, rc.N0, pmin);
  if (o.power >= 0)
    rc.P = o.power;
  else if (rc.model == RateModel::B)
    rc.P = pmin;
  std::printf("verifying at P = %.3f, n = %g, seed = %llu\n", rc.P, o.n,
              static_cast<unsigned long long>(o.sim.master_seed));

  const NetworkInstance inst = sample_network(o.n, o.sim.master_seed);
  const SquareGrid grid = tessellate_squares(inst.region_radius, o.sim.c, inst.nodes);
  const TdmaSchedule sch = build_schedule(grid, o.d, rc);
  // One link per nonempty cell: receiver within Manhattan d cells and
  // Euclidean distance c*(d+1) of the transmitting relay.
  Rng rng(derive_seed(o.sim.master_seed, stream_tag::trial));
  std::vector<ScheduledLink> links;
  for (std::size_t ci = 0; ci < grid.cell_count(); ++ci) {
    if (grid.relay[ci] < 0) continue;
    const Vec2 tx = inst.nodes[std::size_t(grid.relay[ci])];
    for (int attempt = 0; attempt < 64; ++attempt) {
      const double ang = rng.uniform(0.0, 2.0 * M_PI);
      const double rad = rng.uniform(0.0, o.sim.c * (o.d + 1));
      const Vec2 rx{tx.x + rad * std::cos(ang), tx.y + rad * std::sin(ang)};
      const auto [rcx, rcy] = grid.cell_coords(rx);
      const int cx = int(ci % std::size_t(grid.nside));
      const int cy = int(ci / std::size_t(grid.nside));
      if (std::abs(rcx - cx) + std::abs(rcy - cy) > o.d) continue;
      links.push_back({ci, rx});
      break;
    }
  }
  const auto checks = verify_schedule(sch, grid, links, rc, inst.nodes);
  const auto bad = schedule_violations(checks);
  std::printf("schedule: x=%d k=%d slots=%d links=%zu\n", sch.x, sch.k,
              sch.slot_count(), links.size());
  std::printf("%6s %6s %14s %14s %6s\n", "slot", "link", "exact_sinr",
              "bound_sinr", "ok");
  int shown = 0;
  for (const auto& ck : checks) {
    if (shown >= o.link_limit && ck.ok && ck.interference_ok) continue;
    std::printf("%6d %6zu %14.6g %14.6g %6s\n", ck.slot, ck.link, ck.sinr,
                ck.sinr_floor, (ck.ok && ck.interference_ok) ? "pass" : "FAIL");
    ++shown;
  }
  if (int(checks.size()) > shown)
    std::printf("  ... %zu further links not shown\n", checks.size() - std::size_t(shown));
  std::printf("violations: %zu of %zu links\n", bad.size(), checks.size());
  if (!o.out_json.empty()) {
    json j;
    j["config"] = radio_to_json(rc);
    j["d"] = o.d;
    j["p_min"] = pmin;
    j["links"] = checks.size();
    j["violations"] = bad.size();
    emit(j, o.out_json);
  }
  return 0;
}

int run_load_stats(Options& o) {
  const std::uint64_t seed = derive_seed(o.sim.master_seed, stream_tag::trial, 0);
  const LoadReport lr = run_load_trial(o.sim, o.n, seed);
  json j = load_report_to_json(lr);
  j["config"] = sim_config_to_json(o.sim);
  emit(j, o.out_json);
  if (!o.out_csv.empty()) {
    LoadMap lm;
    lm.load = lr.load;
    std::ostringstream csv;
    load_to_csv(lm, lr.grid, csv);
    emit_csv(csv.str(), o.out_csv);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Percolation-routed network capacity experiments"};
  app.require_subcommand(1);
  Options o;

  auto* sim_cmd = app.add_subcommand("simulate", "run one trial, emit a JSON report");
  add_common(sim_cmd, o);
  sim_cmd->add_option("--n", o.n, "network scale n");
  sim_cmd->add_flag("--pairs", o.include_pairs, "include per-pair records");

  auto* sweep_cmd = app.add_subcommand("sweep", "multi-n scaling sweep, emit CSV + JSON");
  add_common(sweep_cmd, o);
  sweep_cmd->add_option("--n-values", o.n_values, "n values to sweep");
  sweep_cmd->add_option("--trials", o.trials, "trials per n");
  sweep_cmd->add_option("--workers", o.workers, "worker threads");
  sweep_cmd->add_option("--csv", o.out_csv, "write the CSV to this file");

  auto* perc_cmd =
      app.add_subcommand("percolation-stats", "corridor crossing Monte Carlo");
  add_common(perc_cmd, o);
  perc_cmd->add_option("--n", o.n, "network scale n");
  perc_cmd->add_option("--trials", o.trials, "corridors to sample");

  auto* sinr_cmd =
      app.add_subcommand("verify-sinr", "schedule SINR check against the bounds");
  add_common(sinr_cmd, o);
  sinr_cmd->add_option("--n", o.n, "network scale n");
  sinr_cmd->add_option("--d", o.d, "schedule cell distance");
  sinr_cmd->add_option("--power", o.power, "override transmit power (default: P_min for B)");
  sinr_cmd->add_option("--limit", o.link_limit, "max passing table rows to print");

  auto* load_cmd =
      app.add_subcommand("load-stats", "per-cell loading factors for one trial");
  add_common(load_cmd, o);
  load_cmd->add_option("--n", o.n, "network scale n");
  load_cmd->add_option("--csv", o.out_csv, "write the per-cell heat map CSV here");

  try {
    app.parse(argc, argv);
    CLI::App* cmd = app.get_subcommands().front();
    resolve_config(app, cmd, o, argc, argv);
    cmd = app.get_subcommands().front();
    if (cmd == sim_cmd) return run_simulate(o);
    if (cmd == sweep_cmd) return run_sweep(o);
    if (cmd == perc_cmd) return run_perc_stats(o);
    if (cmd == sinr_cmd) return run_verify_sinr(o);
    if (cmd == load_cmd) return run_load_stats(o);
    return 1;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cpde/blocks.hpp"
#include "cpde/closed_forms.hpp"
#include "cpde/config.hpp"
#include "cpde/couplings.hpp"
#include "cpde/csv.hpp"
#include "cpde/estimators.hpp"
#include "cpde/gillespie.hpp"
#include "cpde/oracle.hpp"
#include "cpde/zprocess.hpp"

namespace {

using namespace cpde;

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_violation = 3;
constexpr int exit_oracle = 4;

struct run_context {
  topology top;
  params pr;
  eta0_spec eta0;
  zeta0_spec zeta0;
  double horizon = 10.0;
  std::uint64_t replicas = 1000;
  std::uint64_t seed = 1;
  bool seed_given = false;
  engine_kind engine = engine_kind::fast;
  int threads = 1;
  std::string out;
};

run_context read_run(config_reader& r, std::uint64_t default_replicas,
                     engine_kind default_engine) {
  run_context ctx;
  std::string shape = r.get_string("run", "topology", "cycle");
  auto n = r.get_int("run", "n", 64, 2, 1 << 20);
  ctx.top = topology::make(shape, static_cast<int>(n));
  ctx.pr.lambda = r.get_double("run", "lambda", 1.0, 0.0, 1e9);
  ctx.pr.v = r.get_double("run", "v", 1.0, 0.0, 1e9);
  ctx.pr.p = r.get_double("run", "p", 0.5, 0.0, 1.0);
  ctx.horizon = r.get_double("run", "horizon", 10.0, 1e-9, 1e12);
  ctx.eta0 = eta0_spec::parse(r.get_string("run", "eta0", "all"));
  ctx.zeta0 = zeta0_spec::parse(r.get_string("run", "zeta0", "stationary"));
  ctx.replicas = r.get_u64("run", "replicas", default_replicas);
  if (ctx.replicas == 0)
    throw config_error("field run.replicas: value 0 outside legal range [1, inf)");
  ctx.seed_given = r.was_set("run", "seed");
  ctx.seed = r.get_u64("run", "seed", 1);
  ctx.engine = engine_from_string(
      r.get_string("run", "engine", engine_name(default_engine)));
  ctx.threads =
      static_cast<int>(r.get_int("run", "parallelism", 1, 1, 256));
  ctx.out = r.get_string("run", "out", "");
  return ctx;
}

void echo_run(config& c, const run_context& ctx) {
  c.set("run", "topology", ctx.top.shape_name());
  c.set("run", "n", std::to_string(ctx.top.n_sites));
  c.set("run", "lambda", format_double(ctx.pr.lambda));
  c.set("run", "v", format_double(ctx.pr.v));
  c.set("run", "p", format_double(ctx.pr.p));
  c.set("run", "horizon", format_double(ctx.horizon));
  c.set("run", "eta0", ctx.eta0.to_string());
  c.set("run", "zeta0", ctx.zeta0.to_string());
  c.set("run", "replicas", std::to_string(ctx.replicas));
  c.set("run", "seed", std::to_string(ctx.seed));
  c.set("run", "engine", engine_name(ctx.engine));
  c.set("run", "parallelism", std::to_string(ctx.threads));
}

csv_row base_row(const run_context& ctx, const std::string& kind) {
  csv_row row;
  row.topology = ctx.top.shape_name();
  row.kind = kind;
  row.n = ctx.top.n_sites;
  row.lambda = ctx.pr.lambda;
  row.v = ctx.pr.v;
  row.p = ctx.pr.p;
  row.horizon = ctx.horizon;
  row.eta0 = ctx.eta0.to_string();
  row.replicas = ctx.replicas;
  row.seed = ctx.seed;
  return row;
}

void emit(const run_context& ctx, const std::vector<csv_row>& rows,
          const config& resolved, double wall_seconds) {
  if (ctx.out.empty()) {
    std::cout << csv_header() << "\n";
    for (const auto& r : rows) std::cout << csv_line(r) << "\n";
    return;
  }
  write_csv(ctx.out, rows);
  write_manifest(ctx.out, resolved, ctx.seed, wall_seconds);
}

void require_seed(const run_context& ctx, const std::string& sub) {
  if (!ctx.seed_given)
    throw config_error("field run.seed: a seed is mandatory for " + sub +
                       " runs (pass --seed)");
}

/* ------------------------------------------------------------------ */

int cmd_simulate(config& cfg, double wall_start_unused) {
  (void)wall_start_unused;
  auto t0 = std::chrono::steady_clock::now();
  config_reader r(cfg);
  run_context ctx = read_run(r, 1000, engine_kind::fast);
  r.finish();
  echo_run(cfg, ctx);

  auto ext = estimate_extinction_time(ctx.top, ctx.pr, ctx.eta0, ctx.zeta0,
                                      ctx.horizon, ctx.replicas, ctx.seed,
                                      ctx.engine, ctx.threads);
  auto surv = wilson_interval(ext.cap_hits, ext.replicas);

  std::vector<csv_row> rows;
  auto srow = base_row(ctx, "survival");
  srow.survival = surv.estimate;
  srow.ci_low = surv.lo;
  srow.ci_high = surv.hi;
  rows.push_back(srow);
  auto erow = base_row(ctx, "extinction");
  erow.mean_tau = ext.mean_tau.mean;
  erow.se_tau = ext.mean_tau.se;
  erow.median_tau = ext.median_tau;
  erow.cap_hits = ext.cap_hits;
  rows.push_back(erow);

  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  emit(ctx, rows, cfg, wall);
  if (ext.unreliable)
    std::cerr << "note: more than half the replicas were still alive at the "
                 "horizon; extinction summaries are cap-dominated\n";
  return exit_ok;
}

int cmd_sweep(config& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  config_reader r(cfg);
  run_context ctx = read_run(r, 400, engine_kind::fast);
  require_seed(ctx, "sweep");
  auto lambdas = r.get_list("sweep", "lambda_list", 0.0, 1e9);
  auto vs = r.get_list("sweep", "v_list", 0.0, 1e9);
  auto ps = r.get_list("sweep", "p_list", 0.0, 1.0);
  double theta = r.get_double("sweep", "immunity_theta", 0.02, 0.0, 1.0);
  r.finish();
  if (lambdas.empty()) lambdas = {ctx.pr.lambda};
  if (vs.empty()) vs = {ctx.pr.v};
  if (ps.empty()) ps = {ctx.pr.p};
  echo_run(cfg, ctx);
  cfg.set("sweep", "immunity_theta", format_double(theta));

  auto cells = sweep_phase_diagram(ctx.top, lambdas, vs, ps, ctx.eta0,
                                   ctx.horizon, ctx.replicas, ctx.seed, theta,
                                   ctx.engine, ctx.threads);
  std::vector<csv_row> rows;
  for (const auto& c : cells) {
    auto row = base_row(ctx, "sweep");
    row.lambda = c.lambda;
    row.v = c.v;
    row.p = c.p;
    row.survival = c.surv.surv.estimate;
    row.ci_low = c.surv.surv.lo;
    row.ci_high = c.surv.surv.hi;
    row.seed = c.surv.seed;
    rows.push_back(row);
    if (c.immune_marker) {
      row.kind = "immunity";
      rows.push_back(row);
    }
  }
  std::cerr << "sweep: " << cells.size() << " cells\n";
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  emit(ctx, rows, cfg, wall);
  return exit_ok;
}

int cmd_lambda0(config& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  config_reader r(cfg);
  run_context ctx = read_run(r, 800, engine_kind::fast);
  require_seed(ctx, "lambda0");
  lambda0_config lc;
  lc.theta = r.get_double("lambda0", "theta", 0.02, 0.0, 1.0);
  lc.horizon = ctx.horizon;
  lc.replicas_per_eval = r.get_u64("lambda0", "replicas_per_eval", ctx.replicas);
  lc.tolerance = r.get_double("lambda0", "tolerance", 0.05, 1e-6, 10.0);
  lc.seed_lo = r.get_double("lambda0", "seed_lo", 0.0, 0.0, 1e9);
  lc.seed_hi = r.get_double("lambda0", "seed_hi", 0.0, 0.0, 1e9);
  lc.engine = ctx.engine;
  lc.threads = ctx.threads;
  r.finish();
  echo_run(cfg, ctx);
  cfg.set("lambda0", "theta", format_double(lc.theta));
  cfg.set("lambda0", "tolerance", format_double(lc.tolerance));

  auto br = estimate_lambda0(ctx.top, ctx.pr.v, ctx.pr.p, ctx.eta0, lc,
                             ctx.seed);
  std::vector<csv_row> rows;
  for (const auto& ev : br.history) {
    auto row = base_row(ctx, "lambda0_eval");
    row.lambda = ev.lambda;
    row.replicas = ev.replicas;
    row.survival = ev.surv.estimate;
    row.ci_low = ev.surv.lo;
    row.ci_high = ev.surv.hi;
    rows.push_back(row);
  }
  auto row = base_row(ctx, br.failed ? "lambda0_failed" : "lambda0_bracket");
  row.lambda = std::nullopt;
  row.replicas = lc.replicas_per_eval * br.history.size();
  row.ci_low = br.lo;
  row.ci_high = br.hi;
  rows.push_back(row);
  if (br.failed)
    std::cerr << "lambda0: bracket not established: " << br.note << "\n";
  else
    std::cerr << "lambda0: bracket [" << format_double(br.lo) << ", "
              << format_double(br.hi) << "]\n";
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  emit(ctx, rows, cfg, wall);
  return exit_ok;
}

int cmd_crossover(config& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  config_reader r(cfg);
  run_context ctx = read_run(r, 200, engine_kind::fast);
  require_seed(ctx, "crossover");
  auto sizes_d = r.get_list("crossover", "sizes", 1.0, 1e9);
  auto caps = r.get_list("crossover", "caps", 1e-9, 1e15);
  double v_small = r.get_double("crossover", "v_small", 0.01, 1e-12, 1e9);
  r.finish();
  if (sizes_d.empty())
    throw config_error("field crossover.sizes: at least one size is required");
  if (caps.empty()) caps = {ctx.horizon};
  std::vector<int> sizes;
  for (double s : sizes_d) sizes.push_back(static_cast<int>(s));
  echo_run(cfg, ctx);
  cfg.set("crossover", "v_small", format_double(v_small));

  auto res = crossover_experiment(ctx.top, ctx.pr.lambda, ctx.pr.p, v_small,
                                  sizes, caps, ctx.replicas, ctx.seed,
                                  ctx.threads);
  std::vector<csv_row> rows;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    for (int arm = 0; arm < 2; ++arm) {
      const auto& e = arm == 0 ? res.static_arm[i] : res.dynamic_arm[i];
      auto row = base_row(ctx, arm == 0 ? "crossover_static" : "crossover_dynamic");
      row.v = arm == 0 ? 0.0 : v_small;
      row.eta0 = "block:0:" + std::to_string(sizes[i]);
      row.horizon = e.cap;
      row.replicas = e.replicas;
      row.seed = e.seed;
      row.mean_tau = e.mean_tau.mean;
      row.se_tau = e.mean_tau.se;
      row.median_tau = e.median_tau;
      row.cap_hits = e.cap_hits;
      rows.push_back(row);
    }
  }
  std::cerr << "crossover: ratios";
  for (double x : res.ratios) std::cerr << " " << format_double(x);
  std::cerr << "\ncrossover: increasing-trend p = "
            << format_double(res.trend_pvalue)
            << ", dynamic log fit R^2 = "
            << format_double(res.dynamic_log_fit.r_squared) << "\n";
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  emit(ctx, rows, cfg, wall);
  return exit_ok;
}

int cmd_blocks(config& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  config_reader r(cfg);
  run_context ctx = read_run(r, 200, engine_kind::replay);
  std::string mode = r.get_string("blocks", "mode", "interval");

  if (mode == "zdies") {
    double eps = r.get_double("blocks", "eps", 0.05, 0.0, 1.0);
    auto z0_size = r.get_int("blocks", "z0_size", 10, 1, 1 << 24);
    auto budget_cfg = r.get_int("blocks", "budget", 0, 0, 1 << 24);
    r.finish();
    long long budget =
        budget_cfg > 0
            ? budget_cfg
            : 10 * static_cast<long long>(
                       std::ceil(2.0 * std::log(static_cast<double>(z0_size)) + 5.0));
    echo_run(cfg, ctx);
    cfg.set("blocks", "mode", mode);
    cfg.set("blocks", "eps", format_double(eps));
    cfg.set("blocks", "budget", std::to_string(budget));
    std::vector<long long> z0(z0_size);
    for (long long i = 0; i < z0_size; ++i) z0[i] = i;
    std::vector<double> n_ext;
    std::uint64_t budget_hits = 0;
    for (std::uint64_t rep = 0; rep < ctx.replicas; ++rep) {
      bernoulli_z_driver drv(stream_seed(ctx.seed, stream_kind::replica, rep, 0), eps);
      auto tr = run_Z(drv, z0, budget);
      if (tr.died)
        n_ext.push_back(static_cast<double>(tr.n_ext));
      else
        ++budget_hits;
    }
    auto m = mean_with_se(n_ext);
    std::vector<csv_row> rows;
    auto row = base_row(ctx, "zdies");
    row.n = static_cast<int>(z0_size);
    row.lambda = std::nullopt;
    row.v = std::nullopt;
    row.p = eps;
    row.horizon = static_cast<double>(budget);
    row.eta0 = "";
    row.mean_tau = m.mean;
    row.se_tau = m.se;
    row.cap_hits = budget_hits;
    rows.push_back(row);
    if (budget_hits)
      std::cerr << "zdies: " << budget_hits << " of " << ctx.replicas
                << " runs hit the level budget " << budget << "\n";
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    emit(ctx, rows, cfg, wall);
    return exit_ok;
  }

  if (mode != "interval" && mode != "vertex")
    throw config_error("field blocks.mode: value '" + mode +
                       "' is not one of interval|vertex|zdies");
  double T = r.get_double("blocks", "T", 4.0, 1e-9, 1e9);
  auto n_windows = static_cast<int>(r.get_int("blocks", "windows", 10, 1, 1 << 20));
  auto r0 = static_cast<int>(r.get_int("blocks", "r0", 8, 1, 1 << 20));
  bool dump = r.get_bool("blocks", "dump", true);
  r.finish();
  echo_run(cfg, ctx);
  cfg.set("blocks", "mode", mode);
  cfg.set("blocks", "T", format_double(T));
  cfg.set("blocks", "windows", std::to_string(n_windows));

  double horizon = n_windows * T;
  std::uint64_t violations = 0;
  auto eta0_mask = ctx.eta0.realize(ctx.top);

  for (std::uint64_t rep = 0; rep < ctx.replicas; ++rep) {
    std::uint64_t s = stream_seed(ctx.seed, stream_kind::replica, rep, 0);
    auto streams = materialize_streams(ctx.top, ctx.pr, s, horizon, false);
    auto zeta0 = ctx.zeta0.realize(ctx.top, ctx.pr.p, s);

    if (mode == "vertex") {
      auto grid = vertex_block_variables(ctx.top, streams, zeta0, T, n_windows);
      if (rep == 0 && dump && !ctx.out.empty()) {
        std::ofstream g(ctx.out + ".grid.csv", std::ios::binary);
        g << "k,n,V,U,block_left,block_right\n";
        for (int n = 0; n < n_windows; ++n)
          for (int k = 0; k < ctx.top.n_sites; ++k) {
            g << k << ',' << n << ',';
            if (k < ctx.top.n_edges()) g << int(grid.V[n][k]);
            g << ',' << int(grid.U[n][k]) << ",,\n";
          }
      }
      continue;
    }

    auto grid = interval_block_variables(ctx.top, ctx.pr, streams, zeta0, r0,
                                         T, n_windows);
    sim_config sc;
    sc.horizon = horizon;
    for (int n = 0; n < n_windows; ++n) sc.snapshot_times.push_back(n * T);
    auto res = simulate_cpde_replay(ctx.top, ctx.pr, eta0_mask, zeta0, streams, sc);

    /* Z_0 = indices of blocks holding initially infected vertices */
    std::vector<long long> z0;
    for (int k = 0; k < grid.n_blocks; ++k)
      for (int x : grid.block_vertices(0, k, ctx.top.n_sites))
        if (eta0_mask[x]) {
          z0.push_back(k);
          break;
        }
    interval_grid_z_driver drv(grid);
    auto zt = run_Z(drv, z0, n_windows, z_rule::interval,
                    grid.wraps ? grid.n_blocks : 0, true);
    violations += z_containment_check(res.eta_snapshots, grid, zt);

    if (rep == 0 && dump && !ctx.out.empty()) {
      std::ofstream g(ctx.out + ".grid.csv", std::ios::binary);
      g << "k,n,V,U,block_left,block_right\n";
      for (int n = 0; n < n_windows; ++n)
        for (int k = 0; k < grid.n_blocks; ++k) {
          g << k << ',' << n << ',';
          if (k < grid.n_pairs) g << int(grid.V[n][k]);
          g << ',' << int(grid.U[n][k]) << ',' << grid.block_lo[n][k] << ','
            << grid.block_hi[n][k] << "\n";
        }
      std::ofstream zf(ctx.out + ".z.csv", std::ios::binary);
      zf << "n,z_size\n";
      for (std::size_t n = 0; n < zt.level_sizes.size(); ++n)
        zf << n << ',' << zt.level_sizes[n] << "\n";
    }
  }

  std::vector<csv_row> rows;
  auto row = base_row(ctx, mode == "vertex" ? "blocks_vertex" : "blocks_containment");
  row.horizon = horizon;
  if (mode == "interval") row.cap_hits = violations;
  rows.push_back(row);
  std::cerr << "blocks: " << violations << " containment violations over "
            << ctx.replicas << " replicas\n";
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  emit(ctx, rows, cfg, wall);
  return violations == 0 ? exit_ok : exit_violation;
}

int cmd_couplings(config& cfg, const std::string& inject_fault) {
  auto t0 = std::chrono::steady_clock::now();
  config_reader r(cfg);
  run_context ctx = read_run(r, 200, engine_kind::replay);
  std::string harness = r.get_string("couplings", "harness", "sandwich");
  auto box_n = static_cast<int>(r.get_int("couplings", "box_n", 2, 0, 1 << 20));
  auto box_center = static_cast<int>(
      r.get_int("couplings", "box_center", 0, 0, 1 << 20));
  double v_prime = r.get_double("couplings", "v_prime", 2.0 * ctx.pr.v,
                                1e-12, 1e12);
  r.finish();
  echo_run(cfg, ctx);
  cfg.set("couplings", "harness", harness);

  sandwich_fault fault = sandwich_fault::none;
  if (inject_fault == "containment")
    fault = sandwich_fault::lower_ignores_env;
  else if (!inject_fault.empty())
    throw config_error("field --inject-fault: value '" + inject_fault +
                       "' is not one of: containment");

  bool do_sandwich = harness == "sandwich" || harness == "all";
  bool do_weak = harness == "weak" || harness == "all";
  bool do_rescale = harness == "rescale" || harness == "all";
  if (!do_sandwich && !do_weak && !do_rescale)
    throw config_error("field couplings.harness: value '" + harness +
                       "' is not one of sandwich|weak|rescale|all");

  std::ofstream detail;
  if (!ctx.out.empty()) {
    detail.open(ctx.out + ".couplings.csv", std::ios::binary);
    detail << "harness,replica,seed,violations,n_p,n_bar_p,m_n,"
              "infection_events,valid_events,accepted_or_pweak_events\n";
  }

  std::uint64_t violations = 0;
  std::vector<csv_row> rows;

  if (do_sandwich) {
    std::uint64_t vio = 0;
    for (std::uint64_t rep = 0; rep < ctx.replicas; ++rep) {
      std::uint64_t s = stream_seed(ctx.seed, stream_kind::replica, rep, 0);
      auto res = simulate_sandwich(ctx.top, ctx.pr, ctx.eta0, ctx.zeta0, s,
                                   ctx.horizon, false, fault);
      vio += res.containment_violations;
      if (detail.is_open())
        detail << "sandwich," << rep << ',' << s << ','
               << res.containment_violations << ",,,,"
               << res.infection_events << ',' << res.valid_events << ','
               << res.accepted_events << "\n";
    }
    auto row = base_row(ctx, "couplings_sandwich");
    row.cap_hits = vio;
    rows.push_back(row);
    std::cerr << "sandwich: " << vio << " containment violations\n";
    violations += vio;
  }
  if (do_weak) {
    std::uint64_t vio = 0;
    weak_config wc;
    wc.horizon = ctx.horizon;
    wc.box_n = box_n;
    wc.box_center = box_center;
    for (std::uint64_t rep = 0; rep < ctx.replicas; ++rep) {
      std::uint64_t s = stream_seed(ctx.seed, stream_kind::replica, rep, 0);
      auto res = simulate_weak_processes(ctx.top, ctx.pr, ctx.eta0, ctx.zeta0,
                                         s, wc);
      std::uint64_t bad = res.containment_violations + res.freshness_violations;
      vio += bad;
      if (detail.is_open())
        detail << "weak," << rep << ',' << s << ',' << bad << ',' << res.n_p
               << ',' << res.n_bar_p << ',' << res.m_n << ','
               << res.infection_events << ',' << res.valid_events << ','
               << res.p_weakly_valid_events << "\n";
    }
    auto row = base_row(ctx, "couplings_weak");
    row.cap_hits = vio;
    rows.push_back(row);
    std::cerr << "weak: " << vio << " violations\n";
    violations += vio;
  }
  if (do_rescale) {
    std::uint64_t vio = 0;
    for (std::uint64_t rep = 0; rep < ctx.replicas; ++rep) {
      std::uint64_t s = stream_seed(ctx.seed, stream_kind::replica, rep, 0);
      auto res = rescale_coupling_check(ctx.top, ctx.pr.lambda, ctx.pr.v,
                                        v_prime, ctx.pr.p, ctx.eta0, ctx.zeta0,
                                        s, ctx.horizon);
      vio += res.containment_violations;
      if (detail.is_open())
        detail << "rescale," << rep << ',' << s << ','
               << res.containment_violations << ",,,,,,\n";
    }
    auto row = base_row(ctx, "couplings_rescale");
    row.cap_hits = vio;
    rows.push_back(row);
    std::cerr << "rescale (v' = " << format_double(v_prime) << "): " << vio
              << " containment violations\n";
    violations += vio;
  }

  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  emit(ctx, rows, cfg, wall);
  return violations == 0 ? exit_ok : exit_violation;
}

int cmd_oracle_check(config& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  config_reader r(cfg);
  run_context ctx = read_run(r, 20000, engine_kind::replay);
  r.finish();
  echo_run(cfg, ctx);

  bool ok = true;
  std::vector<csv_row> rows;
  auto report = [&](const std::string& id, double value, double tol,
                    double err, bool pass) {
    std::cout << (pass ? "[ok]   " : "[FAIL] ") << id << ": value "
              << format_double(value) << ", tolerance " << format_double(tol)
              << ", error " << format_double(err) << "\n";
    csv_row row;
    row.topology = "path";
    row.kind = "oracle_" + id;
    row.survival = value;
    row.ci_low = err;
    row.ci_high = tol;
    row.seed = ctx.seed;
    rows.push_back(row);
    ok = ok && pass;
  };

  {
    topology p3 = topology::path(3);
    params pr{1.5, 1.0, 0.5};
    ctmc_model m(p3, pr);
    std::vector<std::uint8_t> all(3, 1);
    double s_exact = m.survival_to(5.0, m.initial_stationary_env(all));
    auto mc = estimate_survival(p3, pr, eta0_spec::parse("all"), zeta0_spec{},
                                5.0, ctx.replicas, ctx.seed,
                                engine_kind::replay, ctx.threads);
    double sigma = std::sqrt(std::max(s_exact * (1 - s_exact), 1e-12) /
                             static_cast<double>(ctx.replicas));
    double err = std::abs(mc.surv.estimate - s_exact);
    report("survival_path3", s_exact, 3 * sigma, err, err <= 3 * sigma);
  }
  {
    topology p2 = topology::path(2);
    params pr{1.0, 1.0, 0.5};
    ctmc_model m(p2, pr);
    std::vector<std::uint8_t> all(2, 1);
    double t_exact = m.mean_extinction(m.initial_stationary_env(all));
    double t_quad = m.mean_extinction_by_quadrature(m.initial_stationary_env(all));
    report("quadrature_vs_solver", t_quad, 1e-4, std::abs(t_quad - t_exact),
           std::abs(t_quad - t_exact) <= 1e-4);
    auto mc = estimate_extinction_time(p2, pr, eta0_spec::parse("all"),
                                       zeta0_spec{}, 200.0, ctx.replicas,
                                       ctx.seed, engine_kind::fast,
                                       ctx.threads);
    double err = std::abs(mc.mean_tau.mean - t_exact);
    report("mean_extinction_path2", t_exact, 3 * mc.mean_tau.se, err,
           err <= 3 * mc.mean_tau.se);
  }
  {
    /* independent recount of every state's exit rate */
    topology p3 = topology::path(3);
    params pr{1.5, 1.0, 0.5};
    ctmc_model m(p3, pr);
    double worst = 0.0;
    for (std::uint32_t s = 0; s < m.n_states(); ++s) {
      double rate = 0.0;
      int infected = 0;
      for (int x = 0; x < 3; ++x)
        if (s & (1u << x)) ++infected;
      rate += infected; /* unit recoveries */
      for (int e = 0; e < 2; ++e) {
        bool open = s & (1u << (3 + e));
        if (!open) {
          rate += pr.v * pr.p;
        } else {
          rate += pr.v * (1 - pr.p);
          bool ia = s & (1u << e), ib = s & (1u << (e + 1));
          if (ia != ib) rate += pr.lambda;
        }
      }
      worst = std::max(worst, std::abs(rate - m.exit_rate(s)));
    }
    report("generator_recount", worst, 0.0, worst, worst == 0.0);
  }
  {
    auto law = exact_z_one_step(0.05, 6, false);
    double predicted = 0.05 * 0.95 * 0.95;
    double err = std::abs(law.tv_to_interval_count - predicted);
    report("z_one_step_tv", law.tv_to_interval_count, 1e-6, err, err <= 1e-6);
  }

  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  emit(ctx, rows, cfg, wall);
  return ok ? exit_ok : exit_oracle;
}

int cmd_calibrate(config& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  config_reader r(cfg);
  run_context ctx = read_run(r, 2000, engine_kind::fast);
  std::string kind = r.get_string("calibrate", "kind", "immunity");
  double eps = r.get_double("calibrate", "eps", 0.05, 1e-9, 0.5);
  auto t_list = r.get_list("calibrate", "T_list", 1e-9, 1e9);
  r.finish();
  echo_run(cfg, ctx);
  cfg.set("calibrate", "kind", kind);
  cfg.set("calibrate", "eps", format_double(eps));

  std::vector<csv_row> rows;
  if (kind == "immunity") {
    auto cal = calibrate_immunity(ctx.pr.v, eps);
    std::cout << "immunity calibration at v = " << format_double(ctx.pr.v)
              << ", eps = " << format_double(eps) << ": M = "
              << format_double(cal.M) << ", T = " << format_double(cal.T)
              << ", p_max = " << format_double(cal.p_max) << "\n";
    auto row = base_row(ctx, "calibrate_immunity");
    row.p = cal.p_max;
    row.horizon = cal.T;
    row.mean_tau = cal.M;
    rows.push_back(row);
  } else if (kind == "blocks") {
    if (t_list.empty()) t_list = {1, 2, 4, 8, 16};
    for (double T : t_list) {
      double d0 = window_closed_floor(ctx.pr.v, ctx.pr.p, T);
      if (!(d0 > 0)) {
        std::cout << "T = " << format_double(T)
                  << ": window-closure floor is 0; no r0 works\n";
        continue;
      }
      int r0 = static_cast<int>(std::ceil(std::log(eps) / std::log1p(-d0)));
      r0 = std::max(r0, 1);
      /* death-by-T of the static all-open process on a widest block */
      int len = std::max(2, 2 * r0 - 1);
      topology seg = topology::path(len);
      params st{ctx.pr.lambda, 0.0, 1.0};
      auto surv = estimate_survival(seg, st, eta0_spec::parse("all"),
                                    zeta0_spec::parse("open"), T, ctx.replicas,
                                    ctx.seed, engine_kind::fast, ctx.threads);
      double death = 1.0 - surv.surv.estimate;
      bool feasible = (1.0 - surv.surv.hi) >= 1.0 - eps;
      std::cout << "T = " << format_double(T) << ": floor = "
                << format_double(d0) << ", r0 = " << r0
                << ", block death-by-T = " << format_double(death)
                << (feasible ? "  <- meets the target" : "") << "\n";
      auto row = base_row(ctx, "calibrate_blocks");
      row.n = r0;
      row.horizon = T;
      row.survival = death;
      row.ci_low = 1.0 - surv.surv.hi;
      row.ci_high = 1.0 - surv.surv.lo;
      rows.push_back(row);
    }
  } else {
    throw config_error("field calibrate.kind: value '" + kind +
                       "' is not one of immunity|blocks");
  }
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  emit(ctx, rows, cfg, wall);
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"event-driven simulator and verification toolkit for the "
               "contact process with a dynamic edge environment"};
  app.require_subcommand(1);

  std::string config_path, out_path, inject_fault;
  std::optional<std::uint64_t> seed, replicas;
  std::optional<int> parallelism;
  std::vector<std::string> sets;
  app.add_option("--config", config_path, "key=value config file");
  app.add_option("--seed", seed, "master seed (decimal)");
  app.add_option("--replicas", replicas, "replica count");
  app.add_option("--out", out_path, "CSV output path");
  app.add_option("--parallelism", parallelism, "worker thread count");
  app.add_option("--set", sets,
                 "override one config key: [section.]key=value (repeatable)");

  auto* sub_simulate = app.add_subcommand("simulate", "survival and extinction on one cell");
  auto* sub_sweep = app.add_subcommand("sweep", "survival over a (lambda, v, p) grid");
  auto* sub_lambda0 = app.add_subcommand("lambda0", "bracket the critical infection rate");
  auto* sub_crossover = app.add_subcommand("crossover", "static vs slow-environment size scan");
  auto* sub_blocks = app.add_subcommand("blocks", "block variables, Z recursion, containment");
  auto* sub_couplings = app.add_subcommand("couplings", "pathwise coupling harnesses");
  auto* sub_oracle = app.add_subcommand("oracle-check", "Monte Carlo vs exact small-system answers");
  auto* sub_calibrate = app.add_subcommand("calibrate", "immunity and block-scale parameter tuning");
  sub_couplings->add_option("--inject-fault", inject_fault,
                            "deliberately corrupt a checked invariant (containment)");
  for (auto* s : {sub_simulate, sub_sweep, sub_lambda0, sub_crossover,
                  sub_blocks, sub_couplings, sub_oracle, sub_calibrate})
    s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : exit_config;
  }

  try {
    config cfg;
    if (!config_path.empty()) cfg = config::parse_file(config_path);
    for (const auto& s : sets) {
      auto eq = s.find('=');
      if (eq == std::string::npos)
        throw config_error("--set needs key=value, got '" + s + "'");
      std::string key = s.substr(0, eq), value = s.substr(eq + 1);
      auto dot = key.find('.');
      if (dot == std::string::npos)
        cfg.set("run", key, value);
      else
        cfg.set(key.substr(0, dot), key.substr(dot + 1), value);
    }
    if (seed) cfg.set("run", "seed", std::to_string(*seed));
    if (replicas) cfg.set("run", "replicas", std::to_string(*replicas));
    if (parallelism) cfg.set("run", "parallelism", std::to_string(*parallelism));
    if (!out_path.empty()) cfg.set("run", "out", out_path);

    if (sub_simulate->parsed()) return cmd_simulate(cfg, 0);
    if (sub_sweep->parsed()) return cmd_sweep(cfg);
    if (sub_lambda0->parsed()) return cmd_lambda0(cfg);
    if (sub_crossover->parsed()) return cmd_crossover(cfg);
    if (sub_blocks->parsed()) return cmd_blocks(cfg);
    if (sub_couplings->parsed()) return cmd_couplings(cfg, inject_fault);
    if (sub_oracle->parsed()) return cmd_oracle_check(cfg);
    if (sub_calibrate->parsed()) return cmd_calibrate(cfg);
    return exit_config;
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

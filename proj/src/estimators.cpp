#include "cpde/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "cpde/closed_forms.hpp"
#include "cpde/gillespie.hpp"

namespace cpde {

namespace {

/* Static index chunks filled in place: the merged result is a pure
   function of the seed, whatever the thread count. */
template <typename F>
void for_replicas(std::uint64_t replicas, int threads, F&& body) {
  if (threads <= 1) {
    for (std::uint64_t r = 0; r < replicas; ++r) body(r);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int j = 0; j < threads; ++j) {
    std::uint64_t lo = replicas * j / threads;
    std::uint64_t hi = replicas * (j + 1) / threads;
    pool.emplace_back([&body, lo, hi] {
      for (std::uint64_t r = lo; r < hi; ++r) body(r);
    });
  }
  for (auto& th : pool) th.join();
}

sim_outcome run_replica(const topology& top, const params& pr,
                        const eta0_spec& eta0,
                        const std::vector<std::uint8_t>& eta0_mask,
                        const zeta0_spec& zeta0, std::uint64_t replica_seed,
                        const sim_config& cfg, engine_kind engine) {
  if (engine == engine_kind::fast)
    return simulate_cpde_fast(top, pr, eta0_mask, zeta0, replica_seed, cfg);
  return simulate_cpde_replay(top, pr, eta0, zeta0, replica_seed, cfg);
}

}  // namespace

engine_kind engine_from_string(const std::string& name) {
  if (name == "replay") return engine_kind::replay;
  if (name == "fast") return engine_kind::fast;
  throw std::invalid_argument("engine must be 'replay' or 'fast', got '" +
                              name + "'");
}

std::string engine_name(engine_kind e) {
  return e == engine_kind::replay ? "replay" : "fast";
}

survival_estimate estimate_survival(const topology& top, const params& pr,
                                    const eta0_spec& eta0,
                                    const zeta0_spec& zeta0, double horizon,
                                    std::uint64_t replicas, std::uint64_t seed,
                                    engine_kind engine, int threads) {
  if (replicas == 0)
    throw std::invalid_argument("estimate_survival: need replicas >= 1");
  sim_config cfg;
  cfg.horizon = horizon;
  auto mask = eta0.realize(top);
  std::vector<std::uint8_t> alive(replicas, 0);
  for_replicas(replicas, threads, [&](std::uint64_t r) {
    std::uint64_t s = stream_seed(seed, stream_kind::replica, r, 0);
    auto res = run_replica(top, pr, eta0, mask, zeta0, s, cfg, engine);
    alive[r] = res.survived ? 1 : 0;
  });
  survival_estimate out;
  out.replicas = replicas;
  out.seed = seed;
  out.horizon = horizon;
  for (auto a : alive) out.survivors += a;
  out.surv = wilson_interval(out.survivors, replicas);
  return out;
}

extinction_estimate estimate_extinction_time(
    const topology& top, const params& pr, const eta0_spec& eta0,
    const zeta0_spec& zeta0, double cap, std::uint64_t replicas,
    std::uint64_t seed, engine_kind engine, int threads) {
  if (replicas == 0)
    throw std::invalid_argument("estimate_extinction_time: need replicas >= 1");
  if (!(cap > 0))
    throw std::invalid_argument("estimate_extinction_time: cap must be > 0");
  sim_config cfg;
  cfg.horizon = cap;
  auto mask = eta0.realize(top);
  std::vector<double> tau(replicas, 0.0);
  std::vector<std::uint8_t> hit(replicas, 0);
  for_replicas(replicas, threads, [&](std::uint64_t r) {
    std::uint64_t s = stream_seed(seed, stream_kind::replica, r, 0);
    auto res = run_replica(top, pr, eta0, mask, zeta0, s, cfg, engine);
    if (res.extinction_time) {
      tau[r] = *res.extinction_time;
    } else {
      tau[r] = cap;
      hit[r] = 1;
    }
  });
  extinction_estimate out;
  out.replicas = replicas;
  out.cap = cap;
  out.seed = seed;
  for (auto h : hit) out.cap_hits += h;
  out.mean_tau = mean_with_se(tau);
  out.median_tau = median(tau);
  rng boot(seed, stream_kind::aux, 0xb001, 0);
  out.median_ci = bootstrap_median_ci(tau, 2000, boot);
  out.unreliable = 2 * out.cap_hits > out.replicas;
  return out;
}

lambda0_bracket estimate_lambda0(const topology& top, double v, double p,
                                 const eta0_spec& eta0,
                                 const lambda0_config& cfg,
                                 std::uint64_t seed) {
  lambda0_bracket out;
  out.theta = cfg.theta;
  out.horizon = cfg.horizon;
  zeta0_spec zeta0; /* stationary */

  std::uint64_t eval_idx = 0;
  auto eval = [&](double lam) {
    params pr{lam, v, p};
    auto se = estimate_survival(
        top, pr, eta0, zeta0, cfg.horizon, cfg.replicas_per_eval,
        stream_seed(seed, stream_kind::aux, eval_idx++, 1), cfg.engine,
        cfg.threads);
    lambda0_eval ev;
    ev.lambda = lam;
    ev.surv = se.surv;
    ev.replicas = se.replicas;
    out.history.push_back(ev);
    return se.surv.estimate;
  };

  double lo = cfg.seed_lo > 0 ? cfg.seed_lo : lambda_bar_bracket_lo;
  double hi = cfg.seed_hi > 0
                  ? cfg.seed_hi
                  : invasion_threshold_upper(lambda_bar_bracket_hi, v, p);
  if (!std::isfinite(hi)) hi = std::max(8.0, 4.0 * lambda_bar_bracket_hi);

  int tries = 0;
  while (eval(lo) >= cfg.theta) {
    if (++tries > cfg.max_widenings) {
      out.failed = true;
      out.note = "no subcritical edge found down to lambda = " +
                 std::to_string(lo);
      out.lo = 0;
      out.hi = lo;
      return out;
    }
    lo *= 0.7;
  }
  tries = 0;
  while (eval(hi) < cfg.theta) {
    if (++tries > cfg.max_widenings) {
      out.failed = true;
      out.note = "no supercritical edge found up to lambda = " +
                 std::to_string(hi);
      out.lo = lo;
      out.hi = infinity();
      return out;
    }
    hi *= 1.5;
  }
  int guard = 0;
  while (hi - lo > cfg.tolerance && ++guard < 48) {
    double mid = 0.5 * (lo + hi);
    if (eval(mid) >= cfg.theta)
      hi = mid;
    else
      lo = mid;
  }
  out.lo = lo;
  out.hi = hi;
  return out;
}

std::vector<sweep_cell> sweep_phase_diagram(
    const topology& top, const std::vector<double>& lambdas,
    const std::vector<double>& vs, const std::vector<double>& ps,
    const eta0_spec& eta0, double horizon, std::uint64_t replicas,
    std::uint64_t seed, double immunity_theta, engine_kind engine,
    int threads) {
  if (lambdas.empty() || vs.empty() || ps.empty())
    throw std::invalid_argument("sweep: every axis needs at least one value");
  zeta0_spec zeta0;
  std::vector<sweep_cell> cells;
  std::uint64_t idx = 0;
  for (double v : vs)
    for (double p : ps) {
      std::size_t group_start = cells.size();
      double max_lambda = *std::max_element(lambdas.begin(), lambdas.end());
      for (double lam : lambdas) {
        sweep_cell c;
        c.lambda = lam;
        c.v = v;
        c.p = p;
        c.surv = estimate_survival(top, params{lam, v, p}, eta0, zeta0,
                                   horizon, replicas,
                                   stream_seed(seed, stream_kind::aux, idx++, 2),
                                   engine, threads);
        cells.push_back(c);
      }
      for (std::size_t i = group_start; i < cells.size(); ++i) {
        if (cells[i].lambda == max_lambda &&
            cells[i].surv.surv.hi < immunity_theta)
          cells[i].immune_marker = true;
      }
    }
  return cells;
}

crossover_result crossover_experiment(const topology& top, double lambda,
                                      double p, double v_small,
                                      const std::vector<int>& sizes,
                                      const std::vector<double>& caps,
                                      std::uint64_t replicas,
                                      std::uint64_t seed, int threads) {
  if (sizes.empty())
    throw std::invalid_argument("crossover: need at least one size");
  if (caps.size() != sizes.size() && caps.size() != 1)
    throw std::invalid_argument("crossover: need one cap, or one per size");
  if (!(v_small > 0))
    throw std::invalid_argument("crossover: v_small must be > 0");
  crossover_result out;
  out.sizes = sizes;
  zeta0_spec zeta0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    int n0 = sizes[i];
    if (n0 < 1 || n0 > top.n_sites)
      throw std::invalid_argument("crossover: block size outside topology");
    double cap = caps[caps.size() == 1 ? 0 : i];
    eta0_spec eta0;
    eta0.k = eta0_spec::kind::block;
    eta0.start = 0;
    eta0.len = n0;
    out.static_arm.push_back(estimate_extinction_time(
        top, params{lambda, 0.0, p}, eta0, zeta0, cap, replicas,
        stream_seed(seed, stream_kind::aux, 2 * i, 3), engine_kind::fast,
        threads));
    out.dynamic_arm.push_back(estimate_extinction_time(
        top, params{lambda, v_small, p}, eta0, zeta0, cap, replicas,
        stream_seed(seed, stream_kind::aux, 2 * i + 1, 3), engine_kind::fast,
        threads));
    const auto& st = out.static_arm.back();
    const auto& dy = out.dynamic_arm.back();
    double ratio = st.median_tau / dy.median_tau;
    double se_st = (st.median_ci.hi - st.median_ci.lo) / 3.92;
    double se_dy = (dy.median_ci.hi - dy.median_ci.lo) / 3.92;
    double rel = std::sqrt(se_st * se_st / (st.median_tau * st.median_tau) +
                           se_dy * se_dy / (dy.median_tau * dy.median_tau));
    out.ratios.push_back(ratio);
    out.ratio_ses.push_back(ratio * rel);
  }
  std::vector<double> logn, dyn_med;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    logn.push_back(std::log(static_cast<double>(sizes[i])));
    dyn_med.push_back(out.dynamic_arm[i].median_tau);
  }
  out.dynamic_log_fit = linear_fit(logn, dyn_med);
  rng trend_gen(seed, stream_kind::aux, 0x7e5d, 4);
  out.trend_pvalue = isotonic_trend_pvalue(out.ratios, out.ratio_ses, trend_gen);
  return out;
}

}  // namespace cpde

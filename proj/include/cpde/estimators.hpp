#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cpde/engine.hpp"
#include "cpde/stats.hpp"

namespace cpde {

enum class engine_kind { replay, fast };

engine_kind engine_from_string(const std::string& name);
std::string engine_name(engine_kind e);

/* Replica r of a cell keyed by `seed` runs on the derived seed
   (seed, replica, r, 0); results are merged in replica order, so the
   numbers are identical for any thread count. */

struct survival_estimate {
  proportion surv;
  std::uint64_t survivors = 0;
  std::uint64_t replicas = 0;
  std::uint64_t seed = 0;
  double horizon = 0;
};

survival_estimate estimate_survival(const topology& top, const params& pr,
                                    const eta0_spec& eta0,
                                    const zeta0_spec& zeta0, double horizon,
                                    std::uint64_t replicas, std::uint64_t seed,
                                    engine_kind engine, int threads = 1);

struct extinction_estimate {
  mean_result mean_tau;   /* over min(tau, cap) */
  double median_tau = 0;  /* ditto */
  interval median_ci;     /* percentile bootstrap */
  std::uint64_t cap_hits = 0;
  std::uint64_t replicas = 0;
  double cap = 0;
  std::uint64_t seed = 0;
  bool unreliable = false; /* more than half the replicas hit the cap */
};

extinction_estimate estimate_extinction_time(const topology& top,
                                             const params& pr,
                                             const eta0_spec& eta0,
                                             const zeta0_spec& zeta0,
                                             double cap, std::uint64_t replicas,
                                             std::uint64_t seed,
                                             engine_kind engine,
                                             int threads = 1);

/* Critical-rate bracketing: survival-to-horizon above threshold theta marks
   the supercritical side. Seeds the bracket from the long-run critical-rate
   estimate of the static chain (lower edge) and from the invasion-threshold
   transform of its upper edge (when finite), widens on a bad seed, then
   bisects. */
struct lambda0_config {
  double theta = 0.02;
  double horizon = 500.0;
  std::uint64_t replicas_per_eval = 800;
  double tolerance = 0.05; /* stop when hi - lo <= tolerance */
  int max_widenings = 4;
  double seed_lo = 0.0; /* <= 0: derive from the static-chain bracket */
  double seed_hi = 0.0;
  engine_kind engine = engine_kind::fast;
  int threads = 1;
};

struct lambda0_eval {
  double lambda = 0;
  proportion surv;
  std::uint64_t replicas = 0;
};

struct lambda0_bracket {
  double lo = 0, hi = 0;
  double theta = 0, horizon = 0;
  std::vector<lambda0_eval> history;
  bool failed = false;
  std::string note;
};

lambda0_bracket estimate_lambda0(const topology& top, double v, double p,
                                 const eta0_spec& eta0,
                                 const lambda0_config& cfg, std::uint64_t seed);

struct sweep_cell {
  double lambda = 0, v = 0, p = 0;
  survival_estimate surv;
  bool immune_marker = false; /* largest lambda of its (v,p) group and
                                 CI upper edge still below theta */
};

std::vector<sweep_cell> sweep_phase_diagram(
    const topology& top, const std::vector<double>& lambdas,
    const std::vector<double>& vs, const std::vector<double>& ps,
    const eta0_spec& eta0, double horizon, std::uint64_t replicas,
    std::uint64_t seed, double immunity_theta = 0.02,
    engine_kind engine = engine_kind::fast, int threads = 1);

/* Two-arm size scan: a static environment drawn once per replica (v = 0)
   against a slowly updating one (v = v_small), seeded with a block of n
   infected sites. Reports per-size extinction summaries, the ratio of
   medians, an increasing-trend p-value for the ratios, and the fit of the
   dynamic-arm medians against log n. */
struct crossover_result {
  std::vector<int> sizes;
  std::vector<extinction_estimate> static_arm, dynamic_arm;
  std::vector<double> ratios;
  std::vector<double> ratio_ses;
  double trend_pvalue = 1.0;
  fit_result dynamic_log_fit;
};

crossover_result crossover_experiment(const topology& top, double lambda,
                                      double p, double v_small,
                                      const std::vector<int>& sizes,
                                      const std::vector<double>& caps,
                                      std::uint64_t replicas,
                                      std::uint64_t seed, int threads = 1);

}  // namespace cpde

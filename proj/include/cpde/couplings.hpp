#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cpde/engine.hpp"
#include "cpde/params.hpp"
#include "cpde/topology.hpp"

namespace cpde {

/* Three infection processes driven by one stream realization: an upper
   contact process at rate lambda that fires on every arrow, the CPDE whose
   arrows are gated by the environment, and a lower contact process fed the
   valid arrows that survive an independent beta/lambda coin. Containment
   lower <= middle <= upper is checked after every event. */
struct sandwich_outcome {
  std::uint64_t containment_violations = 0; /* contract: 0 */
  std::uint64_t infection_events = 0;
  std::uint64_t valid_events = 0;    /* arrows at open edges */
  std::uint64_t accepted_events = 0; /* valid and coin-accepted */
  std::vector<std::uint64_t> valid_per_edge;
  /* Accepted arrow times per edge, only when requested. */
  std::vector<std::vector<double>> accepted_times;
  bool lower_survived = false;
  bool middle_survived = false;
  bool upper_survived = false;
};

/* Checker-validation fixture: lower_ignores_env corrupts the lower process
   on purpose (its coin-accepted arrows skip the environment gate), which
   must surface as containment violations. */
enum class sandwich_fault { none, lower_ignores_env };

sandwich_outcome simulate_sandwich(const topology& top, const params& pr,
                                   const eta0_spec& eta0,
                                   const zeta0_spec& zeta0, std::uint64_t seed,
                                   double horizon,
                                   bool record_accepted_times = false,
                                   sandwich_fault fault = sandwich_fault::none);

/* Joint replay of the true process eta, the worst-case process eta_w
   (arrows at stale edges always count), and the coin process eta_p (arrows
   at stale edges count when they belong to the rate-lambda*p substream).
   Needs split infection streams. Per-edge staleness: an edge starts stale,
   every arrow makes it stale, every environment update refreshes it. */
struct weak_config {
  double horizon = 12.0;
  /* Stale-arrow counting box: edges inside ball(box_center, box_n), times
     in [0, box_n]. */
  int box_n = 2;
  int box_center = 0;
};

struct weak_coupling_stats {
  /* Times at which eta_w can propagate but eta_p cannot: arrows of the
     reject substream at stale edges with exactly one eta_p-infected
     endpoint (state read just before the arrow). */
  std::vector<double> tau_times;
  std::vector<int> tau_vertices; /* the healthy endpoint */
  std::uint64_t n_p = 0;         /* = tau_times.size() */
  /* Non-coin-valid arrows at edges with an eta_p-infected endpoint. */
  std::uint64_t n_bar_p = 0;
  /* Arrows at stale edges inside the counting box. */
  std::uint64_t m_n = 0;
  std::uint64_t infection_events = 0;
  std::uint64_t valid_events = 0;
  std::uint64_t weakly_valid_events = 0;
  std::uint64_t p_weakly_valid_events = 0;
  std::uint64_t containment_violations = 0; /* eta<=eta_w, eta_p<=eta_w */
  /* Arrows at refreshed edges whose preceding on-edge event was not an
     environment update (bookkeeping audit; contract: 0). */
  std::uint64_t freshness_violations = 0;
  bool eta_survived = false;
  bool eta_w_survived = false;
  bool eta_p_survived = false;
};

weak_coupling_stats simulate_weak_processes(const topology& top,
                                            const params& pr,
                                            const eta0_spec& eta0,
                                            const zeta0_spec& zeta0,
                                            std::uint64_t seed,
                                            const weak_config& cfg);

/* Speed-change coupling: both processes run at rates
   (lambda*v_prime/v, v_prime, p); A consumes recovery streams of rate
   v_prime/v (the time-rescaled original), B consumes the thinned unit-rate
   subset (keep-probability v/v_prime). More recoveries never help the
   infection, so A stays inside B pathwise. */
struct rescale_outcome {
  std::uint64_t containment_violations = 0; /* contract: 0 */
  std::optional<double> a_extinction;
  std::optional<double> b_extinction;
  bool a_survived = false;
  bool b_survived = false;
};

rescale_outcome rescale_coupling_check(const topology& top, double lambda,
                                       double v, double v_prime, double p,
                                       const eta0_spec& eta0,
                                       const zeta0_spec& zeta0,
                                       std::uint64_t seed, double horizon);

}  // namespace cpde

#pragma once

#include <limits>

namespace cpde {

/* Critical infection rate of the static (v=0, all-open) 1d contact process
   with recovery rate 1, and the bracket it was estimated within. Produced
   by this repository's own threshold estimator: single-seed survival
   crossings at theta = 0.02 on a cycle of 1024 sites measured at horizons
   10^3 (1.580) and 4*10^3 (1.620), extrapolated to infinite horizon with
   the directed-percolation temporal exponent (bias ~ T^{-1/1.734}); the
   bracket widens the extrapolation by 0.02 to absorb both fits (see
   README). Checks that consume lambda_bar propagate the bracket rather
   than trusting the point value. */
constexpr double lambda_bar_estimate = 1.653;
constexpr double lambda_bar_bracket_lo = 1.633;
constexpr double lambda_bar_bracket_hi = 1.673;

/* Rate of the homogeneous Poisson process that can be embedded in an
   edge's valid-infection stream: the smaller root of
   x^2 - (lambda + v) x + lambda v p = 0, evaluated in the
   cancellation-free form 2 lambda v p / (s + sqrt(s^2 - 4 lambda v p)). */
double embedded_poisson_rate(double lambda, double v, double p);

/* Infection rate above which the embedded rate exceeds lambda_bar, hence
   an upper bound for the survival threshold:
   lambda_bar (v - lambda_bar) / (v p - lambda_bar) when v p > lambda_bar,
   +infinity otherwise (the process is immune to lambda in that regime). */
double invasion_threshold_upper(double lambda_bar, double v, double p);

/* Lower bound, uniform over the past, for the probability that an edge
   stays closed through a whole length-T window given it was closed at the
   window start:
     delta = e^{-pvT} (e^{-vT} + (1-p)(1-e^{-vT}) - e^{-pvT}) / (1-e^{-pvT}),
   computed via expm1. p=0 returns the limit 1 - (1-e^{-vT})/(vT); vT=0
   returns 0. */
double window_closed_floor(double v, double p, double T);

/* Exact chain conditionals for (edge state at window ends, w = "edge open
   at some point in the window"):
     open_to_closed        = P(zeta_T=0 | zeta_0=1) = (1-p)(1-e^{-vT})
     closed_after_open_win = P(zeta_T=0 | zeta_0=0, w=1) = e^{pvT} * delta
     closed_after_shut_win = P(zeta_T=0 | zeta_0=0, w=0) = 1. */
struct edge_window_conditionals {
  double open_to_closed;
  double closed_after_open_window;
  double closed_after_shut_window;
  double floor; /* delta */
};
edge_window_conditionals edge_chain_conditionals(double v, double p, double T);

/* Expected infections at stale (not freshly updated) edges in the
   space-time box B(0,n) x [0,n]:
     ball_size * (lambda sqrt(v) / (lambda + v) + 4 (e/4)^{sqrt(v)}).
   Requires v > 16 lambda^2 n^2. */
double stale_infection_bound(double lambda, double v, int n, double ball_size);

/* Probabilities of the good-block environment conditions for a 4-vertex
   block with three interior edges over a window with v*T = M:
   all three edges open at least once / no edge ever closes. */
double prob_block_edges_all_open(double M, double p);
double prob_block_edges_never_close(double M, double p);

/* Window length and update-density threshold below which the infection is
   immune for every lambda: M = 2 max(1/eps, v log(1/eps)), T = M/v, and
   p_max = the largest p with delta(vT=M, p) >= 1 - eps. */
struct immunity_calibration {
  double M;
  double T;
  double p_max;
};
immunity_calibration calibrate_immunity(double v, double eps);

inline double infinity() { return std::numeric_limits<double>::infinity(); }

}  // namespace cpde

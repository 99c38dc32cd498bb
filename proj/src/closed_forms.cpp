#include "cpde/closed_forms.hpp"

#include <cmath>
#include <stdexcept>

namespace cpde {

double embedded_poisson_rate(double lambda, double v, double p) {
  if (lambda < 0 || v < 0 || p < 0 || p > 1)
    throw std::invalid_argument("embedded_poisson_rate: bad arguments");
  double s = lambda + v;
  if (s == 0.0) return 0.0;
  double disc = s * s - 4.0 * lambda * v * p;
  double root = std::sqrt(std::max(0.0, disc));
  return 2.0 * lambda * v * p / (s + root);
}

double invasion_threshold_upper(double lambda_bar, double v, double p) {
  if (lambda_bar <= 0 || v < 0 || p < 0 || p > 1)
    throw std::invalid_argument("invasion_threshold_upper: bad arguments");
  if (v * p <= lambda_bar) return infinity();
  return lambda_bar * (v - lambda_bar) / (v * p - lambda_bar);
}

double window_closed_floor(double v, double p, double T) {
  if (v < 0 || T < 0 || p < 0 || p > 1)
    throw std::invalid_argument("window_closed_floor: bad arguments");
  double vt = v * T;
  if (vt == 0.0) return 0.0;
  if (p == 0.0) return 1.0 - (-std::expm1(-vt)) / vt;
  if (p == 1.0) return 0.0;
  double den = -std::expm1(-p * vt);            /* 1 - e^{-pvT} */
  double num = den - p * (-std::expm1(-vt));    /* den - p(1 - e^{-vT}) */
  return std::exp(-p * vt) * (num / den);
}

edge_window_conditionals edge_chain_conditionals(double v, double p, double T) {
  edge_window_conditionals c{};
  c.open_to_closed = (1.0 - p) * (-std::expm1(-v * T));
  c.floor = window_closed_floor(v, p, T);
  double vt = v * T;
  if (vt == 0.0 || p == 0.0) {
    /* never opens: conditioning event w=1 has probability 0 */
    c.closed_after_open_window = 0.0;
  } else {
    double den = -std::expm1(-p * vt);
    double num = den - p * (-std::expm1(-vt));
    c.closed_after_open_window = num / den;
  }
  c.closed_after_shut_window = 1.0;
  return c;
}

double stale_infection_bound(double lambda, double v, int n,
                             double ball_size) {
  if (lambda <= 0 || n < 1 || ball_size <= 0)
    throw std::invalid_argument("stale_infection_bound: bad arguments");
  if (!(v > 16.0 * lambda * lambda * n * n))
    throw std::invalid_argument(
        "stale_infection_bound: requires v > 16 lambda^2 n^2");
  double sq = std::sqrt(v);
  double tail = 4.0 * std::pow(std::exp(1.0) / 4.0, sq);
  return ball_size * (lambda * sq / (lambda + v) + tail);
}

double prob_block_edges_all_open(double M, double p) {
  double one = -std::expm1(-M * p);
  return one * one * one;
}

double prob_block_edges_never_close(double M, double p) {
  return std::exp(-3.0 * (1.0 - p) * M);
}

immunity_calibration calibrate_immunity(double v, double eps) {
  if (v <= 0 || eps <= 0 || eps >= 1)
    throw std::invalid_argument("calibrate_immunity: need v > 0, eps in (0,1)");
  immunity_calibration out{};
  out.M = 2.0 * std::max(1.0 / eps, v * std::log(1.0 / eps));
  out.T = out.M / v;
  /* delta with vT = M, as a function of p. Decreasing from the p->0 limit
     1 - (1-e^{-M})/M >= 1 - eps/2 down to 0 at p=1; bisect the crossing. */
  auto delta_at = [&](double p) { return window_closed_floor(1.0, p, out.M); };
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (delta_at(mid) >= 1.0 - eps)
      lo = mid;
    else
      hi = mid;
  }
  out.p_max = lo;
  return out;
}

}  // namespace cpde

#pragma once

#include <cmath>
#include <stdexcept>

namespace cpde {

/* Model rates: infection lambda across open edges, environment update
   speed v, stationary open density p. Recovery rate is fixed at 1. */
struct params {
  double lambda = 1.0;
  double v = 1.0;
  double p = 0.5;

  void validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
      throw std::invalid_argument("params: lambda must be finite and >= 0");
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("params: v must be finite and >= 0");
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("params: p must lie in [0, 1]");
  }
};

/* P(edge open at time t | state z0 at time 0) for the autonomous two-state
   edge chain (0->1 at v*p, 1->0 at v*(1-p)):
     z0*exp(-v t) + p*(1 - exp(-v t)). */
inline double edge_open_probability(int z0, double v, double p, double t) {
  double decay = std::exp(-v * t);
  return static_cast<double>(z0) * decay + p * (1.0 - decay);
}

}  // namespace cpde

#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "cpde/params.hpp"
#include "cpde/topology.hpp"

namespace cpde {

/* Exact finite-state treatment of the joint chain (eta, zeta). A state
   packs vertex bits 0..n_sites-1 then edge bits; capped at 20 bits total.
   The states with eta == 0 form the absorbing class (the environment keeps
   moving but the infection cannot return). */
class ctmc_model {
public:
  ctmc_model(const topology& top, const params& pr);

  std::uint32_t n_states() const { return n_states_; }
  int n_sites() const { return n_sites_; }
  int n_edges() const { return n_edges_; }

  std::uint32_t pack(const std::vector<std::uint8_t>& eta,
                     const std::vector<std::uint8_t>& zeta) const;
  bool eta_empty(std::uint32_t s) const { return (s & eta_mask_) == 0; }

  /* Point mass at one packed state. */
  std::vector<double> initial_point(std::uint32_t s) const;
  /* eta fixed, environment from its stationary product law. */
  std::vector<double> initial_stationary_env(
      const std::vector<std::uint8_t>& eta0) const;

  /* P(eta_T != 0 | init), by uniformization; the truncation error is below
     tail_tol. */
  double survival_to(double T, const std::vector<double>& init,
                     double tail_tol = 1e-12) const;

  /* E(time to hit {eta == 0} | state), via a sparse direct solve of the
     absorption system; zero on the absorbing class. */
  const std::vector<double>& absorption_times() const;
  double mean_extinction(const std::vector<double>& init) const;

  /* Composite-Simpson integral of the survival curve, the cross-check
     route for mean_extinction. Integrates until survival < 1e-9. */
  double mean_extinction_by_quadrature(const std::vector<double>& init,
                                       double step = 0.005) const;

  /* Total outgoing rate of a state (audit hook for tests). */
  double exit_rate(std::uint32_t s) const;

private:
  void build();

  topology top_;
  params pr_;
  int n_sites_ = 0;
  int n_edges_ = 0;
  std::uint32_t n_states_ = 0;
  std::uint32_t eta_mask_ = 0;
  /* CSR transition structure */
  std::vector<std::uint64_t> row_ptr_;
  std::vector<std::uint32_t> col_;
  std::vector<double> rate_;
  std::vector<double> exit_rate_;
  double uniform_rate_ = 0.0;
  mutable std::vector<double> absorption_times_;
};

/* Exact one-step law of the driven renormalization set Z started from {0}
   on the integer line under i.i.d. Bernoulli(eps) drivers, interval
   H-rules (same-level saturation, then up-steps to k-1, k, k+1).

   size_prob: law of |Z_1|. tv_to_interval_count: total-variation distance
   to the interval-count law ((k-2) eps^{k-3} (1-eps)^2 for k >= 4, padded
   at k=0 with its missing mass). truncated_mass: probability that the
   saturation escaped the enumeration window (enumerated route only). */
struct z_one_step_law {
  std::map<int, double> size_prob;
  double truncated_mass = 0.0;
  double tv_to_interval_count = 0.0;
};

/* enumerate = true: brute force over all driver assignments in the window
   [-radius, radius] (radius <= 4). enumerate = false: exact summation over
   the independent coordinates, same window. */
z_one_step_law exact_z_one_step(double eps, int radius, bool enumerate);

}  // namespace cpde

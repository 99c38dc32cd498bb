#pragma once

#include "cpde/engine.hpp"

namespace cpde {

/* Direct-method engine, equal in law to the stream-replay engine but not
   pathwise comparable to it (randomness is drawn in a different order).

   The environment is never simulated as events. Transmission attempts
   arrive at rate lambda per edge with exactly one infected endpoint, and
   the edge state at an attempt is drawn from the exact two-state-chain
   conditional given the edge's last observed value (stationary if never
   observed); the attempt applies only if the draw is open. The environment
   is autonomous, so observing it solely at attempt times is exact, and the
   per-event cost is independent of v.

   Config support: horizon, snapshot_times (eta only), stop_on_extinction.
   record_log and record_env_snapshots are rejected. counters.env_updates
   counts observed state changes (the replay engine counts arrivals). */
sim_outcome simulate_cpde_fast(const topology& top, const params& pr,
                               const std::vector<std::uint8_t>& eta0,
                               const zeta0_spec& zeta0, std::uint64_t seed,
                               const sim_config& cfg);

}  // namespace cpde

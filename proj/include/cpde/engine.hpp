#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cpde/streams.hpp"

namespace cpde {

/* Initial infected set. String forms: "all", "none", "single:K",
   "block:START:LEN". */
struct eta0_spec {
  enum class kind { all, none, single, block, explicit_set };
  kind k = kind::all;
  int site = 0;
  int start = 0;
  int len = 0;
  std::vector<std::uint8_t> mask;

  static eta0_spec parse(const std::string& text);
  std::vector<std::uint8_t> realize(const topology& top) const;
  std::string to_string() const;
};

/* Initial environment. String forms: "stationary", "open", "closed". */
struct zeta0_spec {
  enum class kind { stationary, all_open, all_closed, explicit_set };
  kind k = kind::stationary;
  std::vector<std::uint8_t> mask;

  static zeta0_spec parse(const std::string& text);
  std::vector<std::uint8_t> realize(const topology& top, double p,
                                    std::uint64_t seed) const;
  std::string to_string() const;
};

struct sim_config {
  double horizon = 10.0;
  /* Record eta (and zeta) as of each listed time (state with all events
     strictly before t applied). Must be ascending. */
  std::vector<double> snapshot_times;
  bool record_env_snapshots = false;
  bool record_log = false;
  /* Stop processing events once eta is empty. Disable when environment
     snapshots past extinction are needed. */
  bool stop_on_extinction = true;
};

struct event_counters {
  std::uint64_t infections_applied = 0;
  std::uint64_t infections_blocked_env = 0; /* arrow at a closed edge */
  std::uint64_t infections_noop = 0;        /* open edge, no state change */
  std::uint64_t recoveries_applied = 0;
  std::uint64_t recoveries_noop = 0;
  std::uint64_t env_updates = 0;
};

struct log_entry {
  double t;
  stream_kind kind;
  std::uint32_t entity;
  bool applied;
};

struct sim_outcome {
  bool survived = false;
  std::optional<double> extinction_time;
  std::vector<std::uint8_t> eta_final;
  std::vector<std::uint8_t> zeta_final;
  event_counters counters;
  std::vector<std::vector<std::uint8_t>> eta_snapshots;
  std::vector<std::vector<std::uint8_t>> zeta_snapshots;
  std::vector<log_entry> log;
};

/* Replays the merged event streams in global order: open/close toggle the
   edge, a recovery clears the site, an infection arrow at an open edge with
   exactly one infected endpoint infects the other. The outcome is a
   deterministic function of (eta0, zeta0, streams). */
sim_outcome simulate_cpde_replay(const topology& top, const params& pr,
                                 const std::vector<std::uint8_t>& eta0,
                                 const std::vector<std::uint8_t>& zeta0,
                                 const event_streams& streams,
                                 const sim_config& cfg);

/* Samples streams and initial data from the seed, then replays. */
sim_outcome simulate_cpde_replay(const topology& top, const params& pr,
                                 const eta0_spec& eta0, const zeta0_spec& zeta0,
                                 std::uint64_t seed, const sim_config& cfg);

}  // namespace cpde

#include "cpde/engine.hpp"

#include <algorithm>
#include <stdexcept>

namespace cpde {

namespace {

int parse_int(const std::string& s) {
  std::size_t used = 0;
  int v = std::stoi(s, &used);
  if (used != s.size()) throw std::invalid_argument("trailing characters");
  return v;
}

std::vector<std::string> split_colon(const std::string& s) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    std::size_t c = s.find(':', pos);
    if (c == std::string::npos) {
      parts.push_back(s.substr(pos));
      break;
    }
    parts.push_back(s.substr(pos, c - pos));
    pos = c + 1;
  }
  return parts;
}

}  // namespace

eta0_spec eta0_spec::parse(const std::string& text) {
  eta0_spec s;
  auto parts = split_colon(text);
  try {
    if (parts[0] == "all" && parts.size() == 1) {
      s.k = kind::all;
    } else if (parts[0] == "none" && parts.size() == 1) {
      s.k = kind::none;
    } else if (parts[0] == "single" && parts.size() == 2) {
      s.k = kind::single;
      s.site = parse_int(parts[1]);
    } else if (parts[0] == "block" && parts.size() == 3) {
      s.k = kind::block;
      s.start = parse_int(parts[1]);
      s.len = parse_int(parts[2]);
    } else {
      throw std::invalid_argument("bad form");
    }
  } catch (const std::exception&) {
    throw std::invalid_argument(
        "eta0: expected all|none|single:K|block:START:LEN, got '" + text + "'");
  }
  return s;
}

std::vector<std::uint8_t> eta0_spec::realize(const topology& top) const {
  std::vector<std::uint8_t> eta(top.n_sites, 0);
  switch (k) {
    case kind::all:
      std::fill(eta.begin(), eta.end(), 1);
      break;
    case kind::none:
      break;
    case kind::single:
      if (site < 0 || site >= top.n_sites)
        throw std::invalid_argument("eta0: site out of range");
      eta[site] = 1;
      break;
    case kind::block:
      if (len < 0 || start < 0 || start >= top.n_sites)
        throw std::invalid_argument("eta0: block out of range");
      for (int i = 0; i < len; ++i) eta[(start + i) % top.n_sites] = 1;
      break;
    case kind::explicit_set:
      if (static_cast<int>(mask.size()) != top.n_sites)
        throw std::invalid_argument("eta0: mask size mismatch");
      eta = mask;
      break;
  }
  return eta;
}

std::string eta0_spec::to_string() const {
  switch (k) {
    case kind::all: return "all";
    case kind::none: return "none";
    case kind::single: return "single:" + std::to_string(site);
    case kind::block:
      return "block:" + std::to_string(start) + ":" + std::to_string(len);
    case kind::explicit_set: return "explicit";
  }
  return "?";
}

zeta0_spec zeta0_spec::parse(const std::string& text) {
  zeta0_spec s;
  if (text == "stationary") {
    s.k = kind::stationary;
  } else if (text == "open") {
    s.k = kind::all_open;
  } else if (text == "closed") {
    s.k = kind::all_closed;
  } else {
    throw std::invalid_argument(
        "zeta0: expected stationary|open|closed, got '" + text + "'");
  }
  return s;
}

std::vector<std::uint8_t> zeta0_spec::realize(const topology& top, double p,
                                              std::uint64_t seed) const {
  switch (k) {
    case kind::stationary: return stationary_environment(top, p, seed);
    case kind::all_open: return std::vector<std::uint8_t>(top.n_edges(), 1);
    case kind::all_closed: return std::vector<std::uint8_t>(top.n_edges(), 0);
    case kind::explicit_set:
      if (static_cast<int>(mask.size()) != top.n_edges())
        throw std::invalid_argument("zeta0: mask size mismatch");
      return mask;
  }
  return {};
}

std::string zeta0_spec::to_string() const {
  switch (k) {
    case kind::stationary: return "stationary";
    case kind::all_open: return "open";
    case kind::all_closed: return "closed";
    case kind::explicit_set: return "explicit";
  }
  return "?";
}

sim_outcome simulate_cpde_replay(const topology& top, const params& pr,
                                 const std::vector<std::uint8_t>& eta0,
                                 const std::vector<std::uint8_t>& zeta0,
                                 const event_streams& streams,
                                 const sim_config& cfg) {
  pr.validate();
  if (static_cast<int>(eta0.size()) != top.n_sites)
    throw std::invalid_argument("simulate_cpde_replay: eta0 size mismatch");
  if (static_cast<int>(zeta0.size()) != top.n_edges())
    throw std::invalid_argument("simulate_cpde_replay: zeta0 size mismatch");
  if (streams.horizon < cfg.horizon)
    throw std::invalid_argument("simulate_cpde_replay: streams end early");

  sim_outcome out;
  std::vector<std::uint8_t> eta = eta0;
  std::vector<std::uint8_t> zeta = zeta0;
  int n_infected = 0;
  for (std::uint8_t b : eta) n_infected += b;

  auto events = merge_events(streams);
  std::size_t next_snap = 0;
  auto flush_snapshots = [&](double up_to) {
    while (next_snap < cfg.snapshot_times.size() &&
           cfg.snapshot_times[next_snap] <= up_to) {
      out.eta_snapshots.push_back(eta);
      if (cfg.record_env_snapshots) out.zeta_snapshots.push_back(zeta);
      ++next_snap;
    }
  };

  bool extinct = (n_infected == 0);
  if (extinct) out.extinction_time = 0.0;

  for (const event& ev : events) {
    if (ev.t >= cfg.horizon) break;
    flush_snapshots(ev.t);
    if (extinct && cfg.stop_on_extinction) break;
    bool applied = false;
    switch (event_class(ev.kind)) {
      case 0: {
        std::uint8_t want = (ev.kind == stream_kind::edge_open) ? 1 : 0;
        applied = (zeta[ev.entity] != want);
        zeta[ev.entity] = want;
        ++out.counters.env_updates;
        break;
      }
      case 1: {
        if (eta[ev.entity]) {
          eta[ev.entity] = 0;
          --n_infected;
          ++out.counters.recoveries_applied;
          applied = true;
          if (n_infected == 0 && !extinct) {
            extinct = true;
            out.extinction_time = ev.t;
          }
        } else {
          ++out.counters.recoveries_noop;
        }
        break;
      }
      default: {
        if (!zeta[ev.entity]) {
          ++out.counters.infections_blocked_env;
        } else {
          auto [u, w] = top.edges[ev.entity];
          if (eta[u] != eta[w]) {
            int target = eta[u] ? w : u;
            eta[target] = 1;
            ++n_infected;
            ++out.counters.infections_applied;
            applied = true;
          } else {
            ++out.counters.infections_noop;
          }
        }
        break;
      }
    }
    if (cfg.record_log) out.log.push_back({ev.t, ev.kind, ev.entity, applied});
  }
  flush_snapshots(cfg.horizon);

  out.survived = (n_infected > 0);
  out.eta_final = std::move(eta);
  out.zeta_final = std::move(zeta);
  return out;
}

sim_outcome simulate_cpde_replay(const topology& top, const params& pr,
                                 const eta0_spec& eta0, const zeta0_spec& zeta0,
                                 std::uint64_t seed, const sim_config& cfg) {
  auto streams = materialize_streams(top, pr, seed, cfg.horizon, false);
  return simulate_cpde_replay(top, pr, eta0.realize(top),
                              zeta0.realize(top, pr.p, seed), streams, cfg);
}

}  // namespace cpde

#include "cpde/gillespie.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace cpde {

namespace {

/* Dense set with O(1) insert/erase/uniform-pick. */
class indexed_set {
public:
  void init(std::size_t n) {
    pos_.assign(n, -1);
    items_.clear();
  }
  std::size_t size() const { return items_.size(); }
  void insert(std::uint32_t e) {
    if (pos_[e] >= 0) return;
    pos_[e] = static_cast<std::int32_t>(items_.size());
    items_.push_back(e);
  }
  void erase(std::uint32_t e) {
    std::int32_t i = pos_[e];
    if (i < 0) return;
    std::uint32_t last = items_.back();
    items_[i] = last;
    pos_[last] = i;
    items_.pop_back();
    pos_[e] = -1;
  }
  std::uint32_t pick(rng& gen) const {
    return items_[gen.next_below(static_cast<std::uint32_t>(items_.size()))];
  }

private:
  std::vector<std::uint32_t> items_;
  std::vector<std::int32_t> pos_;
};

}  // namespace

sim_outcome simulate_cpde_fast(const topology& top, const params& pr,
                               const std::vector<std::uint8_t>& eta0,
                               const zeta0_spec& zeta0, std::uint64_t seed,
                               const sim_config& cfg) {
  pr.validate();
  if (static_cast<int>(eta0.size()) != top.n_sites)
    throw std::invalid_argument("simulate_cpde_fast: eta0 size mismatch");
  if (cfg.record_log || cfg.record_env_snapshots)
    throw std::invalid_argument(
        "simulate_cpde_fast: log/env snapshots unsupported");

  rng gen(seed, stream_kind::aux, 0, 0);

  const int nv = top.n_sites;
  const int ne = top.n_edges();

  sim_outcome out;
  std::vector<std::uint8_t> eta = eta0;
  /* -1: stationary, never observed; 0/1: state observed at obs_at[e]. */
  std::vector<std::int8_t> zstate(ne, -1);
  std::vector<double> obs_at(ne, 0.0);
  if (zeta0.k != zeta0_spec::kind::stationary) {
    auto z0 = zeta0.realize(top, pr.p, seed);
    for (int e = 0; e < ne; ++e) zstate[e] = static_cast<std::int8_t>(z0[e]);
  }

  std::vector<std::uint8_t> inf_ends(ne, 0); /* infected endpoint count */
  for (int e = 0; e < ne; ++e)
    inf_ends[e] = static_cast<std::uint8_t>(eta[top.edges[e][0]] +
                                            eta[top.edges[e][1]]);

  indexed_set infected, boundary;
  infected.init(nv);
  boundary.init(ne);
  int n_infected = 0;
  for (int x = 0; x < nv; ++x)
    if (eta[x]) {
      infected.insert(static_cast<std::uint32_t>(x));
      ++n_infected;
    }
  for (int e = 0; e < ne; ++e)
    if (inf_ends[e] == 1) boundary.insert(static_cast<std::uint32_t>(e));

  double t = 0.0;

  /* Observe the edge now: draw from the two-state-chain conditional given
     the last observation (or the stationary law if never observed). */
  auto observe = [&](int e) {
    int prev = zstate[e];
    if (prev < 0) {
      zstate[e] = gen.next_bernoulli(pr.p) ? 1 : 0;
    } else {
      double q = edge_open_probability(prev, pr.v, pr.p, t - obs_at[e]);
      zstate[e] = gen.next_bernoulli(q) ? 1 : 0;
      if (zstate[e] != prev) ++out.counters.env_updates;
    }
    obs_at[e] = t;
  };

  std::size_t next_snap = 0;
  auto flush_snapshots = [&](double up_to) {
    while (next_snap < cfg.snapshot_times.size() &&
           cfg.snapshot_times[next_snap] <= up_to) {
      out.eta_snapshots.push_back(eta);
      ++next_snap;
    }
  };

  bool extinct = (n_infected == 0);
  if (extinct) out.extinction_time = 0.0;

  while (!extinct) {
    double r_rec = static_cast<double>(infected.size());
    double r_att = static_cast<double>(boundary.size()) * pr.lambda;
    double r_total = r_rec + r_att;
    double t_next = t + gen.next_exp(r_total);
    if (t_next >= cfg.horizon) {
      t = cfg.horizon;
      break;
    }
    flush_snapshots(t_next);
    t = t_next;

    if (gen.next_unit() * r_total < r_rec) {
      /* recovery */
      std::uint32_t x = infected.pick(gen);
      eta[x] = 0;
      infected.erase(x);
      --n_infected;
      ++out.counters.recoveries_applied;
      for (auto [e, y] : top.incident[x]) {
        (void)y;
        auto ue = static_cast<std::uint32_t>(e);
        if (--inf_ends[e] == 1)
          boundary.insert(ue);
        else
          boundary.erase(ue);
      }
      if (n_infected == 0) {
        extinct = true;
        out.extinction_time = t;
      }
    } else {
      /* transmission attempt across an edge with one infected endpoint */
      std::uint32_t e = boundary.pick(gen);
      observe(e);
      if (!zstate[e]) {
        ++out.counters.infections_blocked_env;
        continue;
      }
      auto [a, b] = top.edges[e];
      int x = eta[a] ? b : a;
      eta[x] = 1;
      infected.insert(static_cast<std::uint32_t>(x));
      ++n_infected;
      ++out.counters.infections_applied;
      for (auto [f, y] : top.incident[x]) {
        (void)y;
        auto uf = static_cast<std::uint32_t>(f);
        if (++inf_ends[f] == 1)
          boundary.insert(uf);
        else
          boundary.erase(uf);
      }
    }
  }

  flush_snapshots(cfg.horizon);
  out.survived = (n_infected > 0);
  out.eta_final = std::move(eta);
  out.zeta_final.resize(ne);
  for (int e = 0; e < ne; ++e) {
    /* realize the unobserved marginal at the end time */
    if (zstate[e] < 0) {
      zstate[e] = gen.next_bernoulli(pr.p) ? 1 : 0;
    } else {
      double q =
          edge_open_probability(zstate[e], pr.v, pr.p, cfg.horizon - obs_at[e]);
      zstate[e] = gen.next_bernoulli(q) ? 1 : 0;
    }
    out.zeta_final[e] = static_cast<std::uint8_t>(zstate[e]);
  }
  return out;
}

}  // namespace cpde

#include "cpde/couplings.hpp"

#include <algorithm>
#include <stdexcept>

#include "cpde/closed_forms.hpp"
#include "cpde/rng.hpp"
#include "cpde/streams.hpp"

namespace cpde {

namespace {

int count_infected(const std::vector<std::uint8_t>& eta) {
  int c = 0;
  for (auto b : eta) c += b;
  return c;
}

/* Applies a contact-process arrow across {x, y}: infects the healthy
   endpoint when exactly one is infected. Returns the infected vertex. */
int apply_arrow(std::vector<std::uint8_t>& eta, int& count, int x, int y) {
  if (eta[x] == eta[y]) return -1;
  int u = eta[x] ? y : x;
  eta[u] = 1;
  ++count;
  return u;
}

}  // namespace

sandwich_outcome simulate_sandwich(const topology& top, const params& pr,
                                   const eta0_spec& eta0,
                                   const zeta0_spec& zeta0, std::uint64_t seed,
                                   double horizon, bool record_accepted_times,
                                   sandwich_fault fault) {
  pr.validate();
  const int n_edges = top.n_edges();
  auto streams = materialize_streams(top, pr, seed, horizon, false);
  auto merged = merge_events(streams);
  auto zeta = zeta0.realize(top, pr.p, seed);
  auto mid = eta0.realize(top);
  auto low = mid, up = mid;
  int c_low = count_infected(low), c_mid = c_low, c_up = c_low;

  const double beta = embedded_poisson_rate(pr.lambda, pr.v, pr.p);
  const double accept_prob = pr.lambda > 0 ? beta / pr.lambda : 0.0;
  if (accept_prob < 0.0 || accept_prob > 1.0)
    throw std::runtime_error("simulate_sandwich: thinning probability " +
                             std::to_string(accept_prob) + " outside [0,1]");
  std::vector<rng> coins;
  coins.reserve(n_edges);
  for (int e = 0; e < n_edges; ++e)
    coins.emplace_back(seed, stream_kind::thin_coin, e, 0);

  sandwich_outcome out;
  out.valid_per_edge.assign(n_edges, 0);
  if (record_accepted_times) out.accepted_times.resize(n_edges);

  for (const auto& ev : merged) {
    if (ev.t >= horizon) break;
    switch (ev.kind) {
      case stream_kind::edge_open:
        zeta[ev.entity] = 1;
        break;
      case stream_kind::edge_close:
        zeta[ev.entity] = 0;
        break;
      case stream_kind::site_recover: {
        int x = ev.entity;
        if (low[x]) { low[x] = 0; --c_low; }
        if (mid[x]) { mid[x] = 0; --c_mid; }
        if (up[x]) { up[x] = 0; --c_up; }
        break;
      }
      case stream_kind::edge_infect: {
        ++out.infection_events;
        auto [x, y] = top.edges[ev.entity];
        apply_arrow(up, c_up, x, y);
        bool valid = zeta[ev.entity] != 0;
        if (valid) {
          ++out.valid_events;
          ++out.valid_per_edge[ev.entity];
          apply_arrow(mid, c_mid, x, y);
        }
        bool lower_gate =
            fault == sandwich_fault::lower_ignores_env ? true : valid;
        if (lower_gate && coins[ev.entity].next_bernoulli(accept_prob)) {
          ++out.accepted_events;
          if (record_accepted_times)
            out.accepted_times[ev.entity].push_back(ev.t);
          apply_arrow(low, c_low, x, y);
        }
        /* containment can only break at the arrow's endpoints */
        for (int u : {x, y})
          if ((low[u] && !mid[u]) || (mid[u] && !up[u]))
            ++out.containment_violations;
        break;
      }
      default:
        throw std::logic_error("simulate_sandwich: unexpected event kind");
    }
  }
  for (int x = 0; x < top.n_sites; ++x)
    if ((low[x] && !mid[x]) || (mid[x] && !up[x]))
      ++out.containment_violations;
  out.lower_survived = c_low > 0;
  out.middle_survived = c_mid > 0;
  out.upper_survived = c_up > 0;
  return out;
}

weak_coupling_stats simulate_weak_processes(const topology& top,
                                            const params& pr,
                                            const eta0_spec& eta0,
                                            const zeta0_spec& zeta0,
                                            std::uint64_t seed,
                                            const weak_config& cfg) {
  pr.validate();
  if (cfg.horizon <= 0) throw std::invalid_argument("weak_config: horizon");
  if (cfg.box_n < 0) throw std::invalid_argument("weak_config: box_n");
  auto streams = materialize_streams(top, pr, seed, cfg.horizon, true);
  auto merged = merge_events(streams);
  auto zeta = zeta0.realize(top, pr.p, seed);
  auto eta = eta0.realize(top);
  auto eta_w = eta, eta_p = eta;
  int c_eta = count_infected(eta), c_w = c_eta, c_p = c_eta;

  const int n_edges = top.n_edges();
  std::vector<std::uint8_t> refreshed(n_edges, 0); /* starts stale */
  enum : std::uint8_t { ev_none = 0, ev_update = 1, ev_arrow = 2 };
  std::vector<std::uint8_t> last_on_edge(n_edges, ev_none);
  std::vector<std::uint8_t> in_box(n_edges, 0);
  for (int e : top.ball_edges(cfg.box_center, cfg.box_n)) in_box[e] = 1;

  weak_coupling_stats st;
  for (const auto& ev : merged) {
    if (ev.t >= cfg.horizon) break;
    switch (ev.kind) {
      case stream_kind::edge_open:
      case stream_kind::edge_close:
        zeta[ev.entity] = ev.kind == stream_kind::edge_open;
        refreshed[ev.entity] = 1;
        last_on_edge[ev.entity] = ev_update;
        break;
      case stream_kind::site_recover: {
        int x = ev.entity;
        if (eta[x]) { eta[x] = 0; --c_eta; }
        if (eta_w[x]) { eta_w[x] = 0; --c_w; }
        if (eta_p[x]) { eta_p[x] = 0; --c_p; }
        break;
      }
      case stream_kind::edge_infect_accept:
      case stream_kind::edge_infect_reject: {
        int e = ev.entity;
        auto [x, y] = top.edges[e];
        bool fresh = refreshed[e];
        bool valid = zeta[e];
        bool accept = ev.kind == stream_kind::edge_infect_accept;
        bool weak = !fresh || valid;
        bool p_weak = fresh ? valid : accept;

        if (fresh && last_on_edge[e] != ev_update) ++st.freshness_violations;
        ++st.infection_events;
        st.valid_events += valid;
        st.weakly_valid_events += weak;
        st.p_weakly_valid_events += p_weak;

        if (!fresh && !accept && eta_p[x] != eta_p[y]) {
          st.tau_times.push_back(ev.t);
          st.tau_vertices.push_back(eta_p[x] ? y : x);
        }
        if (!p_weak && (eta_p[x] || eta_p[y])) ++st.n_bar_p;
        if (!fresh && in_box[e] && ev.t <= cfg.box_n) ++st.m_n;

        if (valid) apply_arrow(eta, c_eta, x, y);
        if (weak) apply_arrow(eta_w, c_w, x, y);
        if (p_weak) apply_arrow(eta_p, c_p, x, y);
        refreshed[e] = 0;
        last_on_edge[e] = ev_arrow;

        for (int u : {x, y})
          if ((eta[u] && !eta_w[u]) || (eta_p[u] && !eta_w[u]))
            ++st.containment_violations;
        break;
      }
      default:
        throw std::logic_error("simulate_weak_processes: unexpected event");
    }
  }
  for (int x = 0; x < top.n_sites; ++x)
    if ((eta[x] && !eta_w[x]) || (eta_p[x] && !eta_w[x]))
      ++st.containment_violations;
  st.n_p = st.tau_times.size();
  st.eta_survived = c_eta > 0;
  st.eta_w_survived = c_w > 0;
  st.eta_p_survived = c_p > 0;
  return st;
}

rescale_outcome rescale_coupling_check(const topology& top, double lambda,
                                       double v, double v_prime, double p,
                                       const eta0_spec& eta0,
                                       const zeta0_spec& zeta0,
                                       std::uint64_t seed, double horizon) {
  if (!(v_prime > v) || v <= 0)
    throw std::invalid_argument("rescale_coupling_check: need v_prime > v > 0");
  const double speedup = v_prime / v;
  params fast{lambda * speedup, v_prime, p};
  fast.validate();

  /* Shared arrows and environment at the sped-up rates; recovery marks at
     rate v'/v, each with a keep coin for the thinned (unit-rate) subset. */
  auto streams = materialize_streams(top, fast, seed, horizon, false);
  const int n_sites = top.n_sites;
  std::vector<std::vector<std::uint8_t>> kept(n_sites);
  for (int x = 0; x < n_sites; ++x) {
    streams.recover_t[x] =
        stream_points(seed, stream_kind::site_recover, x, horizon, speedup);
    rng coin(seed, stream_kind::thin_coin, x, 0);
    kept[x].reserve(streams.recover_t[x].size());
    for (std::size_t i = 0; i < streams.recover_t[x].size(); ++i)
      kept[x].push_back(coin.next_bernoulli(1.0 / speedup));
  }
  auto merged = merge_events(streams);

  auto zeta = zeta0.realize(top, p, seed);
  auto a = eta0.realize(top);
  auto b = a;
  int c_a = count_infected(a), c_b = c_a;
  std::vector<std::size_t> mark_idx(n_sites, 0);

  rescale_outcome out;
  for (const auto& ev : merged) {
    if (ev.t >= horizon) break;
    switch (ev.kind) {
      case stream_kind::edge_open:
        zeta[ev.entity] = 1;
        break;
      case stream_kind::edge_close:
        zeta[ev.entity] = 0;
        break;
      case stream_kind::site_recover: {
        int x = ev.entity;
        bool keep = kept[x][mark_idx[x]++];
        if (a[x]) {
          a[x] = 0;
          if (--c_a == 0 && !out.a_extinction) out.a_extinction = ev.t;
        }
        if (keep && b[x]) {
          b[x] = 0;
          if (--c_b == 0 && !out.b_extinction) out.b_extinction = ev.t;
        }
        break;
      }
      case stream_kind::edge_infect: {
        if (!zeta[ev.entity]) break;
        auto [x, y] = top.edges[ev.entity];
        apply_arrow(a, c_a, x, y);
        apply_arrow(b, c_b, x, y);
        for (int u : {x, y})
          if (a[u] && !b[u]) ++out.containment_violations;
        break;
      }
      default:
        throw std::logic_error("rescale_coupling_check: unexpected event");
    }
  }
  for (int x = 0; x < n_sites; ++x)
    if (a[x] && !b[x]) ++out.containment_violations;
  out.a_survived = c_a > 0;
  out.b_survived = c_b > 0;
  return out;
}

}  // namespace cpde

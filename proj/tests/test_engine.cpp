#include <doctest.h>

#include <cmath>
#include <vector>

#include "cpde/engine.hpp"
#include "cpde/oracle.hpp"
#include "cpde/streams.hpp"

using namespace cpde;

namespace {

/* Hand-built stream set on a fixed topology: all vectors sized, empty. */
event_streams blank_streams(const topology& top, double horizon) {
  event_streams s;
  s.horizon = horizon;
  s.open_t.resize(top.n_edges());
  s.close_t.resize(top.n_edges());
  s.infect_t.resize(top.n_edges());
  s.infect_accept_t.resize(top.n_edges());
  s.infect_reject_t.resize(top.n_edges());
  s.recover_t.resize(top.n_sites);
  return s;
}

}  // namespace

TEST_CASE("replay is a pure function of its seed") {
  topology top = topology::cycle(16);
  params pr{1.7, 1.3, 0.6};
  sim_config cfg;
  cfg.horizon = 12.0;
  auto a = simulate_cpde_replay(top, pr, eta0_spec::parse("all"),
                                zeta0_spec::parse("stationary"), 99, cfg);
  auto b = simulate_cpde_replay(top, pr, eta0_spec::parse("all"),
                                zeta0_spec::parse("stationary"), 99, cfg);
  CHECK(a.eta_final == b.eta_final);
  CHECK(a.zeta_final == b.zeta_final);
  CHECK(a.counters.infections_applied == b.counters.infections_applied);
  CHECK(a.survived == b.survived);
  /* a different seed draws different randomness */
  auto sa = materialize_streams(top, pr, 99, 12.0, false);
  auto sc = materialize_streams(top, pr, 100, 12.0, false);
  CHECK(sa.infect_t != sc.infect_t);
}

TEST_CASE("a snapshot reflects only events strictly before its time") {
  topology top = topology::path(2);
  params pr{1.0, 1.0, 0.5};
  auto s = blank_streams(top, 3.0);
  s.recover_t[0] = {1.0};
  sim_config cfg;
  cfg.horizon = 3.0;
  cfg.snapshot_times = {0.0, 1.0, 2.0};
  cfg.stop_on_extinction = false;
  auto out = simulate_cpde_replay(top, pr, {1, 0}, {1}, s, cfg);
  REQUIRE(out.eta_snapshots.size() == 3);
  CHECK(out.eta_snapshots[0] == std::vector<std::uint8_t>{1, 0});
  /* the recovery AT t=1 has not yet applied in the t=1 snapshot */
  CHECK(out.eta_snapshots[1] == std::vector<std::uint8_t>{1, 0});
  CHECK(out.eta_snapshots[2] == std::vector<std::uint8_t>{0, 0});
  REQUIRE(out.extinction_time.has_value());
  CHECK(*out.extinction_time == doctest::Approx(1.0));
}

TEST_CASE("simultaneous close and arrow: the environment moves first") {
  topology top = topology::path(2);
  params pr{1.0, 1.0, 0.5};
  auto s = blank_streams(top, 2.0);
  s.close_t[0] = {1.0};
  s.infect_t[0] = {1.0};
  sim_config cfg;
  cfg.horizon = 2.0;
  auto out = simulate_cpde_replay(top, pr, {1, 0}, {1}, s, cfg);
  CHECK(out.counters.infections_blocked_env == 1);
  CHECK(out.counters.infections_applied == 0);
  CHECK(out.eta_final == std::vector<std::uint8_t>{1, 0});

  /* open instead of close: the arrow now lands on a fresh edge */
  auto s2 = blank_streams(top, 2.0);
  s2.open_t[0] = {1.0};
  s2.infect_t[0] = {1.0};
  auto out2 = simulate_cpde_replay(top, pr, {1, 0}, {0}, s2, cfg);
  CHECK(out2.counters.infections_applied == 1);
  CHECK(out2.eta_final == std::vector<std::uint8_t>{1, 1});
}

TEST_CASE("an arrow needs an open edge and exactly one infected endpoint") {
  topology top = topology::path(3);
  params pr{1.0, 1.0, 0.5};
  auto s = blank_streams(top, 2.0);
  s.infect_t[0] = {0.5}; /* both endpoints infected: no-op */
  s.infect_t[1] = {0.7}; /* one endpoint infected: spreads */
  sim_config cfg;
  cfg.horizon = 2.0;
  auto out = simulate_cpde_replay(top, pr, {1, 1, 0}, {1, 1}, s, cfg);
  CHECK(out.counters.infections_noop == 1);
  CHECK(out.counters.infections_applied == 1);
  CHECK(out.eta_final == std::vector<std::uint8_t>{1, 1, 1});

  /* healthy-healthy edges are also no-ops */
  auto s2 = blank_streams(top, 2.0);
  s2.infect_t[1] = {0.5};
  auto out2 = simulate_cpde_replay(top, pr, {1, 0, 0}, {1, 1}, s2, cfg);
  CHECK(out2.counters.infections_noop == 1);
  CHECK(out2.eta_final == std::vector<std::uint8_t>{1, 0, 0});
}

TEST_CASE("extinction stops the replay unless told otherwise") {
  topology top = topology::path(2);
  params pr{1.0, 1.0, 0.5};
  auto s = blank_streams(top, 10.0);
  s.recover_t[0] = {1.0};
  s.recover_t[1] = {2.0, 3.0};
  sim_config cfg;
  cfg.horizon = 10.0;
  auto out = simulate_cpde_replay(top, pr, {1, 1}, {0}, s, cfg);
  REQUIRE(out.extinction_time.has_value());
  CHECK(*out.extinction_time == doctest::Approx(2.0));
  CHECK(!out.survived);
  CHECK(out.counters.recoveries_applied == 2);
  CHECK(out.counters.recoveries_noop == 0); /* the t=3 event never ran */

  cfg.stop_on_extinction = false;
  auto out2 = simulate_cpde_replay(top, pr, {1, 1}, {0}, s, cfg);
  CHECK(out2.counters.recoveries_noop == 1);
}

TEST_CASE("the replayed environment follows the two-state chain law") {
  /* lambda = 0: only the environment moves. Empirical open fraction at a
     fixed time vs the conditional transition probability. */
  topology top = topology::cycle(64);
  params pr{0.0, 0.8, 0.3};
  sim_config cfg;
  cfg.horizon = 1.5;
  cfg.record_env_snapshots = true;
  cfg.snapshot_times = {1.5};
  cfg.stop_on_extinction = false;
  std::size_t open_from_open = 0, open_from_closed = 0, n_rep = 400;
  std::size_t from_open = 0, from_closed = 0;
  for (std::size_t r = 0; r < n_rep; ++r) {
    auto streams = materialize_streams(top, pr, 1000 + r, cfg.horizon, false);
    std::vector<std::uint8_t> zeta0(top.n_edges());
    for (int e = 0; e < top.n_edges(); ++e) zeta0[e] = e % 2;
    auto out = simulate_cpde_replay(top, pr, std::vector<std::uint8_t>(64, 1),
                                    zeta0, streams, cfg);
    REQUIRE(out.zeta_snapshots.size() == 1);
    for (int e = 0; e < top.n_edges(); ++e) {
      if (zeta0[e]) {
        ++from_open;
        open_from_open += out.zeta_snapshots[0][e];
      } else {
        ++from_closed;
        open_from_closed += out.zeta_snapshots[0][e];
      }
    }
  }
  double q1 = edge_open_probability(1, pr.v, pr.p, 1.5);
  double q0 = edge_open_probability(0, pr.v, pr.p, 1.5);
  double got1 = static_cast<double>(open_from_open) / from_open;
  double got0 = static_cast<double>(open_from_closed) / from_closed;
  CHECK(std::abs(got1 - q1) < 4 * std::sqrt(q1 * (1 - q1) / from_open));
  CHECK(std::abs(got0 - q0) < 4 * std::sqrt(q0 * (1 - q0) / from_closed));
}

TEST_CASE("replay survival matches the exact answer on a small instance") {
  topology top = topology::path(3);
  params pr{1.5, 1.0, 0.5};
  ctmc_model m(top, pr);
  double want = m.survival_to(5.0, m.initial_stationary_env({1, 1, 1}));
  sim_config cfg;
  cfg.horizon = 5.0;
  std::size_t survivors = 0, n_rep = 20000;
  for (std::size_t r = 0; r < n_rep; ++r) {
    auto out = simulate_cpde_replay(top, pr, eta0_spec::parse("all"),
                                    zeta0_spec::parse("stationary"),
                                    stream_seed(424242, stream_kind::replica, r, 0),
                                    cfg);
    survivors += out.survived;
  }
  double got = static_cast<double>(survivors) / n_rep;
  double sigma = std::sqrt(want * (1 - want) / n_rep);
  CHECK(std::abs(got - want) < 3 * sigma);
}

TEST_CASE("arrow counters add up to the number of arrows replayed") {
  topology top = topology::cycle(20);
  params pr{2.0, 1.0, 0.5};
  auto streams = materialize_streams(top, pr, 7, 6.0, false);
  std::size_t arrows = 0;
  for (const auto& t : streams.infect_t) arrows += t.size();
  sim_config cfg;
  cfg.horizon = 6.0;
  cfg.stop_on_extinction = false;
  auto out = simulate_cpde_replay(top, pr, std::vector<std::uint8_t>(20, 1),
                                  stationary_environment(top, pr.p, 7),
                                  streams, cfg);
  CHECK(out.counters.infections_applied + out.counters.infections_blocked_env +
            out.counters.infections_noop ==
        arrows);
}

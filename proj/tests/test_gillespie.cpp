#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cpde/gillespie.hpp"
#include "cpde/oracle.hpp"

using namespace cpde;

TEST_CASE("direct-method results are a pure function of the seed") {
  topology top = topology::cycle(24);
  params pr{2.0, 1.5, 0.4};
  sim_config cfg;
  cfg.horizon = 8.0;
  std::vector<std::uint8_t> eta0(24, 1);
  auto a = simulate_cpde_fast(top, pr, eta0, zeta0_spec::parse("stationary"), 5, cfg);
  auto b = simulate_cpde_fast(top, pr, eta0, zeta0_spec::parse("stationary"), 5, cfg);
  CHECK(a.eta_final == b.eta_final);
  CHECK(a.zeta_final == b.zeta_final);
  CHECK(a.counters.infections_applied == b.counters.infections_applied);
}

TEST_CASE("event logging is not offered by the direct engine") {
  topology top = topology::path(3);
  params pr{1.0, 1.0, 0.5};
  sim_config cfg;
  cfg.horizon = 1.0;
  cfg.record_log = true;
  std::vector<std::uint8_t> eta0{1, 1, 1};
  CHECK_THROWS_AS(
      simulate_cpde_fast(top, pr, eta0, zeta0_spec::parse("stationary"), 1, cfg),
      std::invalid_argument);
  sim_config cfg2;
  cfg2.horizon = 1.0;
  cfg2.record_env_snapshots = true;
  CHECK_THROWS_AS(
      simulate_cpde_fast(top, pr, eta0, zeta0_spec::parse("stationary"), 1, cfg2),
      std::invalid_argument);
}

TEST_CASE("both engines match the exact survival probability") {
  topology top = topology::path(3);
  params pr{1.5, 1.0, 0.5};
  ctmc_model m(top, pr);
  double want = m.survival_to(5.0, m.initial_stationary_env({1, 1, 1}));
  sim_config cfg;
  cfg.horizon = 5.0;
  std::vector<std::uint8_t> eta0{1, 1, 1};
  std::size_t survivors = 0, n_rep = 20000;
  for (std::size_t r = 0; r < n_rep; ++r)
    survivors += simulate_cpde_fast(top, pr, eta0, zeta0_spec::parse("stationary"),
                                    stream_seed(31337, stream_kind::replica, r, 0),
                                    cfg)
                     .survived;
  double got = static_cast<double>(survivors) / n_rep;
  double sigma = std::sqrt(want * (1 - want) / n_rep);
  CHECK(std::abs(got - want) < 3 * sigma);
}

TEST_CASE("the direct engine reproduces the exact mean extinction time") {
  /* the strongest check of attempt-time environment observation: the mean
     extinction on two sites at (1, 1, 1/2) is exactly 45/26 */
  topology top = topology::path(2);
  params pr{1.0, 1.0, 0.5};
  sim_config cfg;
  cfg.horizon = 300.0;
  std::vector<std::uint8_t> eta0{1, 1};
  double sum = 0, sumsq = 0;
  std::size_t n_rep = 40000;
  for (std::size_t r = 0; r < n_rep; ++r) {
    auto out = simulate_cpde_fast(top, pr, eta0, zeta0_spec::parse("stationary"),
                                  stream_seed(777, stream_kind::replica, r, 0),
                                  cfg);
    REQUIRE(out.extinction_time.has_value()); /* horizon 300 >> tau */
    sum += *out.extinction_time;
    sumsq += *out.extinction_time * *out.extinction_time;
  }
  double mean = sum / n_rep;
  double se = std::sqrt((sumsq / n_rep - mean * mean) / n_rep);
  CHECK(std::abs(mean - 45.0 / 26.0) < 3 * se);
}

TEST_CASE("a frozen open environment is the static contact process") {
  topology top = topology::path(3);
  params pr{2.0, 0.0, 0.5}; /* v = 0: zeta never moves */
  ctmc_model m(top, pr);
  double want =
      m.survival_to(4.0, m.initial_point(m.pack({1, 1, 1}, {1, 1})));
  sim_config cfg;
  cfg.horizon = 4.0;
  std::vector<std::uint8_t> eta0{1, 1, 1};
  std::size_t survivors = 0, n_rep = 20000;
  for (std::size_t r = 0; r < n_rep; ++r)
    survivors += simulate_cpde_fast(top, pr, eta0, zeta0_spec::parse("open"),
                                    stream_seed(55, stream_kind::replica, r, 0),
                                    cfg)
                     .survived;
  double got = static_cast<double>(survivors) / n_rep;
  double sigma = std::sqrt(want * (1 - want) / n_rep);
  CHECK(std::abs(got - want) < 3 * sigma);
}

TEST_CASE("v=0 with a stationary draw freezes a Bernoulli environment") {
  /* on one edge with lambda = 0 nothing ever changes the environment, so
     the final zeta must equal the initial draw; over many seeds the open
     fraction is p */
  topology top = topology::path(2);
  params pr{0.0, 0.0, 0.35};
  sim_config cfg;
  cfg.horizon = 5.0;
  cfg.stop_on_extinction = false;
  std::vector<std::uint8_t> eta0{1, 1};
  std::size_t open_count = 0, n_rep = 4000;
  for (std::size_t r = 0; r < n_rep; ++r) {
    auto out = simulate_cpde_fast(top, pr, eta0, zeta0_spec::parse("stationary"),
                                  stream_seed(9, stream_kind::replica, r, 0),
                                  cfg);
    open_count += out.zeta_final[0];
  }
  double frac = static_cast<double>(open_count) / n_rep;
  CHECK(std::abs(frac - 0.35) < 4 * std::sqrt(0.35 * 0.65 / n_rep));
}

TEST_CASE("saturated density p=1 reproduces the all-open contact process") {
  topology top = topology::path(3);
  params pr{1.2, 3.0, 1.0};
  ctmc_model m(top, pr);
  double want = m.survival_to(3.0, m.initial_stationary_env({1, 1, 1}));
  sim_config cfg;
  cfg.horizon = 3.0;
  std::vector<std::uint8_t> eta0{1, 1, 1};
  std::size_t survivors = 0, n_rep = 20000;
  for (std::size_t r = 0; r < n_rep; ++r)
    survivors += simulate_cpde_fast(top, pr, eta0, zeta0_spec::parse("stationary"),
                                    stream_seed(606, stream_kind::replica, r, 0),
                                    cfg)
                     .survived;
  double got = static_cast<double>(survivors) / n_rep;
  double sigma = std::sqrt(want * (1 - want) / n_rep);
  CHECK(std::abs(got - want) < 3 * sigma);
}

TEST_CASE("snapshots from the direct engine watch the infection develop") {
  topology top = topology::cycle(32);
  params pr{3.0, 1.0, 0.8};
  sim_config cfg;
  cfg.horizon = 6.0;
  cfg.snapshot_times = {0.0, 2.0, 6.0};
  std::vector<std::uint8_t> eta0(32, 0);
  eta0[0] = 1;
  auto out = simulate_cpde_fast(top, pr, eta0, zeta0_spec::parse("stationary"),
                                123, cfg);
  REQUIRE(out.eta_snapshots.size() == 3);
  CHECK(out.eta_snapshots[0] == eta0);
  int at2 = 0, at6 = 0;
  for (int x = 0; x < 32; ++x) {
    at2 += out.eta_snapshots[1][x];
    at6 += out.eta_snapshots[2][x];
  }
  if (out.survived) CHECK(at6 >= 1);
  CHECK(at2 >= 0); /* well-formed either way */
}

TEST_CASE("the extinction time respects the horizon cap") {
  topology top = topology::path(2);
  params pr{0.0, 1.0, 0.5};
  sim_config cfg;
  cfg.horizon = 0.05; /* extinction before 0.05 is unlikely */
  std::vector<std::uint8_t> eta0{1, 1};
  std::size_t survived = 0, n_rep = 200;
  for (std::size_t r = 0; r < n_rep; ++r) {
    auto out = simulate_cpde_fast(top, pr, eta0, zeta0_spec::parse("stationary"),
                                  stream_seed(4, stream_kind::replica, r, 0),
                                  cfg);
    if (out.survived) {
      ++survived;
      CHECK(!out.extinction_time.has_value());
    } else {
      CHECK(*out.extinction_time <= cfg.horizon);
    }
  }
  CHECK(survived > 190);
}

#include <doctest.h>

#include <cmath>
#include <vector>

#include "cpde/oracle.hpp"

using namespace cpde;

TEST_CASE("state packing is a bijection with vertex bits first") {
  topology t = topology::path(3);
  params pr{1.0, 1.0, 0.5};
  ctmc_model m(t, pr);
  CHECK(m.n_states() == 32); /* 3 vertex bits + 2 edge bits */
  CHECK(m.pack({1, 0, 1}, {0, 1}) == (1u | 4u | 16u));
  CHECK(m.pack({0, 0, 0}, {1, 1}) == 24u);
  CHECK(m.eta_empty(24u));
  CHECK(!m.eta_empty(1u));
}

TEST_CASE("every state's exit rate equals an independent recount") {
  topology t = topology::path(3);
  params pr{2.0, 3.0, 0.25};
  ctmc_model m(t, pr);
  for (std::uint32_t s = 0; s < m.n_states(); ++s) {
    double rate = 0.0;
    for (int x = 0; x < 3; ++x)
      if (s & (1u << x)) rate += 1.0;
    for (int e = 0; e < 2; ++e) {
      bool open = s & (1u << (3 + e));
      rate += open ? pr.v * (1 - pr.p) : pr.v * pr.p;
      if (open) {
        bool ia = s & (1u << e), ib = s & (1u << (e + 1));
        if (ia != ib) rate += pr.lambda;
      }
    }
    CHECK(m.exit_rate(s) == doctest::Approx(rate).epsilon(1e-13));
  }
}

TEST_CASE("with no infection the sites die as independent unit clocks") {
  topology t = topology::path(2);
  params pr{0.0, 2.0, 0.3};
  ctmc_model m(t, pr);
  auto init = m.initial_stationary_env({1, 1});
  double T = 1.25;
  /* survival = P(max of two unit exponentials > T) */
  double want = 1.0 - (1 - std::exp(-T)) * (1 - std::exp(-T));
  CHECK(m.survival_to(T, init) == doctest::Approx(want).epsilon(1e-10));
  /* mean of the maximum of two unit exponentials */
  CHECK(m.mean_extinction(init) == doctest::Approx(1.5).epsilon(1e-10));
}

TEST_CASE("frozen environment with open edges reproduces the static chain") {
  /* v = 0, both edges open: plain contact process with lambda = 1 on two
     sites; mean extinction from full occupancy is 3/2 + lambda/2 = 2 */
  topology t = topology::path(2);
  params pr{1.0, 0.0, 0.5};
  ctmc_model m(t, pr);
  auto s = m.pack({1, 1}, {1});
  CHECK(m.mean_extinction(m.initial_point(s)) == doctest::Approx(2.0).epsilon(1e-10));
  /* closed edge instead: back to independent deaths */
  auto c = m.pack({1, 1}, {0});
  CHECK(m.mean_extinction(m.initial_point(c)) == doctest::Approx(1.5).epsilon(1e-10));
}

TEST_CASE("two-site mean extinction solves the four-state linear system") {
  /* lambda = 1, v = 1, p = 1/2, both infected, stationary environment.
     Eliminating the four transient states by hand gives exactly 45/26. */
  topology t = topology::path(2);
  params pr{1.0, 1.0, 0.5};
  ctmc_model m(t, pr);
  auto init = m.initial_stationary_env({1, 1});
  CHECK(m.mean_extinction(init) == doctest::Approx(45.0 / 26.0).epsilon(1e-12));
  /* the survival-curve integral agrees with the direct solve */
  CHECK(m.mean_extinction_by_quadrature(init) ==
        doctest::Approx(45.0 / 26.0).epsilon(1e-5));
}

TEST_CASE("three-site survival regression value") {
  topology t = topology::path(3);
  params pr{1.5, 1.0, 0.5};
  ctmc_model m(t, pr);
  auto init = m.initial_stationary_env({1, 1, 1});
  CHECK(m.survival_to(5.0, init) ==
        doctest::Approx(0.10212283060892213).epsilon(1e-9));
  CHECK(m.survival_to(0.0, init) == doctest::Approx(1.0));
  /* survival decreases in T */
  CHECK(m.survival_to(2.0, init) > m.survival_to(5.0, init));
  CHECK(m.survival_to(5.0, init) > m.survival_to(9.0, init));
}

TEST_CASE("absorption times vanish exactly on the empty class") {
  topology t = topology::path(2);
  params pr{1.3, 0.7, 0.4};
  ctmc_model m(t, pr);
  const auto& at = m.absorption_times();
  for (std::uint32_t s = 0; s < m.n_states(); ++s) {
    if (m.eta_empty(s))
      CHECK(at[s] == 0.0);
    else
      CHECK(at[s] > 0.0);
  }
}

TEST_CASE("the one-step set law: enumeration equals the analytic sum") {
  auto en = exact_z_one_step(0.3, 3, true);
  auto an = exact_z_one_step(0.3, 3, false);
  for (const auto& [k, q] : an.size_prob) {
    auto it = en.size_prob.find(k);
    REQUIRE(it != en.size_prob.end());
    CHECK(it->second == doctest::Approx(q).epsilon(1e-10));
  }
  CHECK(en.tv_to_interval_count == doctest::Approx(an.tv_to_interval_count).epsilon(1e-10));
}

TEST_CASE("the one-step set law is a probability law") {
  auto law = exact_z_one_step(0.2, 5, false);
  double total = law.truncated_mass;
  for (const auto& [k, q] : law.size_prob) {
    CHECK(q >= 0.0);
    total += q;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(law.truncated_mass < 1e-3);
}

TEST_CASE("distance to the interval-count reference is eps(1-eps)^2") {
  /* the window truncation accounts for the whole residual, so the identity
     holds to within the reported truncated mass */
  for (double eps : {0.05, 0.2}) {
    auto law = exact_z_one_step(eps, 8, false);
    double want = eps * (1 - eps) * (1 - eps);
    CHECK(std::abs(law.tv_to_interval_count - want) <=
          law.truncated_mass + 1e-12);
    CHECK(law.truncated_mass < 1e-4);
  }
}

#include <doctest.h>

#include <cmath>
#include <vector>

#include "cpde/rng.hpp"
#include "cpde/stats.hpp"

using namespace cpde;

TEST_CASE("mean and standard error on a known sample") {
  auto m = mean_with_se({1.0, 2.0, 3.0, 4.0});
  CHECK(m.mean == doctest::Approx(2.5));
  /* sample sd = sqrt(5/3), se = sd/2 */
  CHECK(m.se == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
  CHECK(m.n == 4);
}

TEST_CASE("median averages the middle pair on even counts") {
  CHECK(median({5.0, 1.0, 3.0}) == doctest::Approx(3.0));
  CHECK(median({4.0, 1.0, 3.0, 2.0}) == doctest::Approx(2.5));
}

TEST_CASE("wilson interval brackets the point estimate and stays in [0,1]") {
  auto w = wilson_interval(30, 100);
  CHECK(w.estimate == doctest::Approx(0.3));
  CHECK(w.lo < 0.3);
  CHECK(w.hi > 0.3);
  CHECK(w.lo > 0.0);
  CHECK(w.hi < 1.0);
  auto zero = wilson_interval(0, 50);
  CHECK(zero.estimate == 0.0);
  CHECK(zero.lo == 0.0);
  CHECK(zero.hi > 0.0);
  auto full = wilson_interval(50, 50);
  CHECK(full.hi == 1.0);
  CHECK(full.lo < 1.0);
}

TEST_CASE("wilson interval covers the truth at roughly nominal rate") {
  /* 200 seeded binomial(n=150, q=0.27) experiments; the 95% interval
     should cover q nearly always (binomial(200, .95) < 183 has prob ~3e-4) */
  double q = 0.27;
  rng g(2024, stream_kind::aux, 1, 0);
  int covered = 0;
  for (int rep = 0; rep < 200; ++rep) {
    std::size_t k = 0;
    for (int i = 0; i < 150; ++i) k += g.next_bernoulli(q);
    auto w = wilson_interval(k, 150);
    covered += (w.lo <= q && q <= w.hi);
  }
  CHECK(covered >= 183);
}

TEST_CASE("bootstrap median interval contains the sample median") {
  std::vector<double> xs;
  rng g(7, stream_kind::aux, 2, 0);
  for (int i = 0; i < 400; ++i) xs.push_back(g.next_exp(1.0));
  double med = median(xs);
  rng boot(8, stream_kind::aux, 3, 0);
  auto ci = bootstrap_median_ci(xs, 2000, boot);
  CHECK(ci.lo <= med);
  CHECK(ci.hi >= med);
  CHECK(ci.hi - ci.lo < 0.5);
}

TEST_CASE("exponential KS test separates the right rate from a wrong one") {
  std::vector<double> gaps;
  rng g(31, stream_kind::aux, 4, 0);
  for (int i = 0; i < 800; ++i) gaps.push_back(g.next_exp(2.5));
  auto right = ks_test_exponential(gaps, 2.5);
  auto wrong = ks_test_exponential(gaps, 5.0);
  CHECK(right.p_value > 1e-3);
  CHECK(wrong.p_value < 1e-6);
  CHECK(right.statistic < wrong.statistic);
}

TEST_CASE("linear fit recovers an exact line") {
  std::vector<double> x{1, 2, 3, 4, 5}, y;
  for (double xi : x) y.push_back(3.0 - 0.5 * xi);
  auto f = linear_fit(x, y);
  CHECK(f.intercept == doctest::Approx(3.0));
  CHECK(f.slope == doctest::Approx(-0.5));
  CHECK(f.r_squared == doctest::Approx(1.0));
}

TEST_CASE("isotonic fit pools adjacent violators") {
  auto fit = isotonic_fit({3.0, 1.0, 2.0, 4.0}, {1.0, 1.0, 1.0, 1.0});
  REQUIRE(fit.size() == 4);
  /* first pair pools to 2, then 2 <= 2 <= 4 */
  CHECK(fit[0] == doctest::Approx(2.0));
  CHECK(fit[1] == doctest::Approx(2.0));
  CHECK(fit[2] == doctest::Approx(2.0));
  CHECK(fit[3] == doctest::Approx(4.0));
  for (std::size_t i = 0; i + 1 < fit.size(); ++i) CHECK(fit[i] <= fit[i + 1]);

  auto mono = isotonic_fit({1.0, 2.0, 5.0}, {1.0, 2.0, 1.0});
  CHECK(mono[0] == doctest::Approx(1.0));
  CHECK(mono[1] == doctest::Approx(2.0));
  CHECK(mono[2] == doctest::Approx(5.0));
}

TEST_CASE("weighted isotonic fit uses the weights when pooling") {
  auto fit = isotonic_fit({4.0, 1.0}, {1.0, 3.0});
  CHECK(fit[0] == doctest::Approx(1.75));
  CHECK(fit[1] == doctest::Approx(1.75));
}

TEST_CASE("trend test flags a clear increase and not a clear decrease") {
  rng g(5, stream_kind::aux, 5, 0);
  std::vector<double> ses{0.02, 0.02, 0.02, 0.02};
  double up = isotonic_trend_pvalue({0.10, 0.20, 0.30, 0.40}, ses, g);
  rng g2(5, stream_kind::aux, 5, 0);
  double down = isotonic_trend_pvalue({0.40, 0.30, 0.20, 0.10}, ses, g2);
  CHECK(up < 0.001);
  CHECK(down > 0.5);
}

TEST_CASE("trend test is deterministic in its generator seed") {
  std::vector<double> est{0.1, 0.12, 0.2, 0.21}, ses{0.03, 0.03, 0.03, 0.03};
  rng a(77, stream_kind::aux, 6, 0), b(77, stream_kind::aux, 6, 0);
  CHECK(isotonic_trend_pvalue(est, ses, a) ==
        isotonic_trend_pvalue(est, ses, b));
}

TEST_CASE("independence z statistic reacts to correlated pairs") {
  /* independent: A ~ Bern(.5), B ~ Bern(.5); correlated: B = A */
  rng g(91, stream_kind::aux, 7, 0);
  std::size_t n = 4000, a = 0, b = 0, ab = 0, a2 = 0, b2 = 0, ab2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    bool x = g.next_bernoulli(0.5), y = g.next_bernoulli(0.5);
    a += x; b += y; ab += (x && y);
    a2 += x; b2 += x; ab2 += x;
  }
  CHECK(std::abs(independence_z(n, a, b, ab)) < 4.0);
  CHECK(std::abs(independence_z(n, a2, b2, ab2)) > 10.0);
}

TEST_CASE("harmonic numbers match the closed small cases") {
  CHECK(harmonic_number(1) == doctest::Approx(1.0));
  CHECK(harmonic_number(5) == doctest::Approx(137.0 / 60.0));
}

#pragma once

#include <cstddef>
#include <vector>

#include "cpde/rng.hpp"

namespace cpde {

struct mean_result {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

mean_result mean_with_se(const std::vector<double>& xs);

/* Sorts a copy. Even n averages the two middle order statistics. */
double median(std::vector<double> xs);

struct interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct proportion {
  double estimate = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

/* 95% Wilson score interval for a binomial proportion. */
proportion wilson_interval(std::size_t successes, std::size_t trials);

/* Percentile bootstrap 95% CI for the median. */
interval bootstrap_median_ci(const std::vector<double>& xs, int resamples,
                             rng& gen);

struct ks_result {
  double statistic = 0.0;
  double p_value = 0.0;
};

/* One-sample Kolmogorov-Smirnov test of Exp(rate) on the given gaps,
   asymptotic p-value with the small-sample correction. */
ks_result ks_test_exponential(std::vector<double> gaps, double rate);

struct fit_result {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
};

fit_result linear_fit(const std::vector<double>& x,
                      const std::vector<double>& y);

/* Weighted least-squares fit nondecreasing in index (pool adjacent
   violators). */
std::vector<double> isotonic_fit(const std::vector<double>& y,
                                 const std::vector<double>& w);

/* One-sided test of H0 "all group means equal" against "means nondecreasing
   in index". Statistic: weighted SSE explained by the isotonic fit relative
   to the pooled mean, weights 1/se^2; null distribution simulated from
   independent normals with the supplied standard errors. */
double isotonic_trend_pvalue(const std::vector<double>& estimates,
                             const std::vector<double>& ses, rng& gen,
                             int null_draws = 20000);

/* z statistic for Cov(A,B) = 0 from n paired Bernoulli observations,
   leading-order variance under independence. */
double independence_z(std::size_t n, std::size_t a_count, std::size_t b_count,
                      std::size_t ab_count);

double harmonic_number(int n);

}  // namespace cpde

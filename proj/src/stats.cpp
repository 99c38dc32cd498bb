#include "cpde/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cpde {

mean_result mean_with_se(const std::vector<double>& xs) {
  mean_result r;
  r.n = xs.size();
  if (r.n == 0) return r;
  double s = 0.0;
  for (double x : xs) s += x;
  r.mean = s / static_cast<double>(r.n);
  if (r.n < 2) return r;
  double ss = 0.0;
  for (double x : xs) ss += (x - r.mean) * (x - r.mean);
  double var = ss / static_cast<double>(r.n - 1);
  r.se = std::sqrt(var / static_cast<double>(r.n));
  return r;
}

double median(std::vector<double> xs) {
  if (xs.empty()) throw std::invalid_argument("median: empty sample");
  std::sort(xs.begin(), xs.end());
  std::size_t n = xs.size();
  if (n % 2 == 1) return xs[n / 2];
  return 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

proportion wilson_interval(std::size_t successes, std::size_t trials) {
  if (trials == 0) throw std::invalid_argument("wilson_interval: no trials");
  const double z = 1.959963984540054;
  double n = static_cast<double>(trials);
  double phat = static_cast<double>(successes) / n;
  double z2n = z * z / n;
  double center = (phat + z2n / 2.0) / (1.0 + z2n);
  double half = z * std::sqrt(phat * (1.0 - phat) / n + z2n / (4.0 * n)) /
                (1.0 + z2n);
  proportion out;
  out.estimate = phat;
  out.lo = successes == 0 ? 0.0 : std::max(0.0, center - half);
  out.hi = successes == trials ? 1.0 : std::min(1.0, center + half);
  return out;
}

interval bootstrap_median_ci(const std::vector<double>& xs, int resamples,
                             rng& gen) {
  if (xs.empty()) throw std::invalid_argument("bootstrap_median_ci: empty");
  std::vector<double> meds(resamples);
  std::vector<double> draw(xs.size());
  auto n = static_cast<std::uint32_t>(xs.size());
  for (int b = 0; b < resamples; ++b) {
    for (std::size_t i = 0; i < xs.size(); ++i) draw[i] = xs[gen.next_below(n)];
    meds[b] = median(draw);
  }
  std::sort(meds.begin(), meds.end());
  auto pick = [&](double q) {
    double idx = q * (resamples - 1);
    auto i = static_cast<std::size_t>(idx);
    return meds[i];
  };
  return {pick(0.025), pick(0.975)};
}

namespace {

double kolmogorov_tail(double t) {
  if (t <= 0.0) return 1.0;
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    double term = std::exp(-2.0 * k * k * t * t);
    s += (k % 2 == 1) ? term : -term;
    if (term < 1e-16) break;
  }
  return std::min(1.0, std::max(0.0, 2.0 * s));
}

}  // namespace

ks_result ks_test_exponential(std::vector<double> gaps, double rate) {
  if (gaps.empty()) throw std::invalid_argument("ks_test_exponential: empty");
  std::sort(gaps.begin(), gaps.end());
  double n = static_cast<double>(gaps.size());
  double d = 0.0;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    double F = 1.0 - std::exp(-rate * gaps[i]);
    double hi = (static_cast<double>(i) + 1.0) / n - F;
    double lo = F - static_cast<double>(i) / n;
    d = std::max(d, std::max(hi, lo));
  }
  ks_result out;
  out.statistic = d;
  double sn = std::sqrt(n);
  out.p_value = kolmogorov_tail((sn + 0.12 + 0.11 / sn) * d);
  return out;
}

fit_result linear_fit(const std::vector<double>& x,
                      const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("linear_fit: need >= 2 paired points");
  double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("linear_fit: degenerate x");
  fit_result f;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  double ybar = sy / n;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double pred = f.intercept + f.slope * x[i];
    ss_res += (y[i] - pred) * (y[i] - pred);
    ss_tot += (y[i] - ybar) * (y[i] - ybar);
  }
  f.r_squared = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
  return f;
}

std::vector<double> isotonic_fit(const std::vector<double>& y,
                                 const std::vector<double>& w) {
  struct block {
    double sum_wy, sum_w;
    std::size_t count;
  };
  std::vector<block> stack;
  for (std::size_t i = 0; i < y.size(); ++i) {
    block b{w[i] * y[i], w[i], 1};
    while (!stack.empty() &&
           stack.back().sum_wy * b.sum_w >= b.sum_wy * stack.back().sum_w) {
      /* mean(back) >= mean(b): pool */
      b.sum_wy += stack.back().sum_wy;
      b.sum_w += stack.back().sum_w;
      b.count += stack.back().count;
      stack.pop_back();
    }
    stack.push_back(b);
  }
  std::vector<double> out;
  out.reserve(y.size());
  for (const block& b : stack) {
    double m = b.sum_wy / b.sum_w;
    for (std::size_t k = 0; k < b.count; ++k) out.push_back(m);
  }
  return out;
}

namespace {

double isotonic_statistic(const std::vector<double>& y,
                          const std::vector<double>& w) {
  auto iso = isotonic_fit(y, w);
  double sw = 0, swy = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    sw += w[i];
    swy += w[i] * y[i];
  }
  double wbar = swy / sw;
  double t = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i)
    t += w[i] * (iso[i] - wbar) * (iso[i] - wbar);
  return t;
}

}  // namespace

double isotonic_trend_pvalue(const std::vector<double>& estimates,
                             const std::vector<double>& ses, rng& gen,
                             int null_draws) {
  if (estimates.size() != ses.size() || estimates.size() < 2)
    throw std::invalid_argument("isotonic_trend_pvalue: need >= 2 groups");
  std::vector<double> se = ses;
  double max_se = 0.0;
  for (double s : se) max_se = std::max(max_se, s);
  if (max_se == 0.0) max_se = 1.0;
  for (double& s : se) s = std::max(s, 1e-3 * max_se);
  std::vector<double> w(se.size());
  for (std::size_t i = 0; i < se.size(); ++i) w[i] = 1.0 / (se[i] * se[i]);

  double t_obs = isotonic_statistic(estimates, w);
  std::vector<double> ynull(se.size());
  int ge = 0;
  for (int d = 0; d < null_draws; ++d) {
    for (std::size_t i = 0; i < se.size(); ++i)
      ynull[i] = se[i] * gen.next_normal();
    if (isotonic_statistic(ynull, w) >= t_obs) ++ge;
  }
  return (1.0 + ge) / (1.0 + null_draws);
}

double independence_z(std::size_t n, std::size_t a_count, std::size_t b_count,
                      std::size_t ab_count) {
  if (n == 0) throw std::invalid_argument("independence_z: no samples");
  double nn = static_cast<double>(n);
  double pa = static_cast<double>(a_count) / nn;
  double pb = static_cast<double>(b_count) / nn;
  double pab = static_cast<double>(ab_count) / nn;
  double var = pa * pb * (1.0 - pa) * (1.0 - pb) / nn;
  if (var <= 0.0) return 0.0;
  return (pab - pa * pb) / std::sqrt(var);
}

double harmonic_number(int n) {
  double h = 0.0;
  for (int k = 1; k <= n; ++k) h += 1.0 / k;
  return h;
}

}  // namespace cpde

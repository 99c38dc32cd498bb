#include "cpde/oracle.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <stdexcept>

namespace cpde {

ctmc_model::ctmc_model(const topology& top, const params& pr)
    : top_(top), pr_(pr) {
  pr_.validate();
  n_sites_ = top_.n_sites;
  n_edges_ = top_.n_edges();
  int bits = n_sites_ + n_edges_;
  if (bits > 20)
    throw std::invalid_argument("ctmc_model: state space above 20 bits");
  n_states_ = 1u << bits;
  eta_mask_ = (1u << n_sites_) - 1u;
  build();
}

std::uint32_t ctmc_model::pack(const std::vector<std::uint8_t>& eta,
                               const std::vector<std::uint8_t>& zeta) const {
  if (static_cast<int>(eta.size()) != n_sites_ ||
      static_cast<int>(zeta.size()) != n_edges_)
    throw std::invalid_argument("ctmc_model::pack: size mismatch");
  std::uint32_t s = 0;
  for (int x = 0; x < n_sites_; ++x)
    if (eta[x]) s |= 1u << x;
  for (int e = 0; e < n_edges_; ++e)
    if (zeta[e]) s |= 1u << (n_sites_ + e);
  return s;
}

void ctmc_model::build() {
  const double open_rate = pr_.v * pr_.p;
  const double close_rate = pr_.v * (1.0 - pr_.p);
  row_ptr_.assign(n_states_ + 1, 0);
  exit_rate_.assign(n_states_, 0.0);

  std::vector<std::pair<std::uint32_t, double>> row;
  /* two passes: count then fill */
  for (int pass = 0; pass < 2; ++pass) {
    std::uint64_t cursor = 0;
    for (std::uint32_t s = 0; s < n_states_; ++s) {
      row.clear();
      for (int x = 0; x < n_sites_; ++x) {
        if (s & (1u << x)) row.push_back({s & ~(1u << x), 1.0});
      }
      for (int e = 0; e < n_edges_; ++e) {
        std::uint32_t ebit = 1u << (n_sites_ + e);
        if (s & ebit) {
          if (close_rate > 0) row.push_back({s & ~ebit, close_rate});
          auto [a, b] = top_.edges[e];
          bool ia = s & (1u << a), ib = s & (1u << b);
          if (ia != ib && pr_.lambda > 0)
            row.push_back({s | (1u << a) | (1u << b), pr_.lambda});
        } else if (open_rate > 0) {
          row.push_back({s | ebit, open_rate});
        }
      }
      if (pass == 0) {
        row_ptr_[s + 1] = row.size();
        double tot = 0;
        for (auto& [t, r] : row) tot += r;
        exit_rate_[s] = tot;
      } else {
        for (auto& [t, r] : row) {
          col_[cursor] = t;
          rate_[cursor] = r;
          ++cursor;
        }
      }
    }
    if (pass == 0) {
      for (std::uint32_t s = 0; s < n_states_; ++s)
        row_ptr_[s + 1] += row_ptr_[s];
      col_.resize(row_ptr_[n_states_]);
      rate_.resize(row_ptr_[n_states_]);
      uniform_rate_ = 0.0;
      for (double r : exit_rate_) uniform_rate_ = std::max(uniform_rate_, r);
    }
  }
}

double ctmc_model::exit_rate(std::uint32_t s) const { return exit_rate_[s]; }

std::vector<double> ctmc_model::initial_point(std::uint32_t s) const {
  std::vector<double> v(n_states_, 0.0);
  v[s] = 1.0;
  return v;
}

std::vector<double> ctmc_model::initial_stationary_env(
    const std::vector<std::uint8_t>& eta0) const {
  std::vector<std::uint8_t> zeta(n_edges_, 0);
  std::vector<double> init(n_states_, 0.0);
  std::uint32_t base = pack(eta0, zeta);
  for (std::uint32_t z = 0; z < (1u << n_edges_); ++z) {
    double w = 1.0;
    for (int e = 0; e < n_edges_; ++e)
      w *= (z & (1u << e)) ? pr_.p : 1.0 - pr_.p;
    if (w > 0.0) init[base | (z << n_sites_)] += w;
  }
  return init;
}

double ctmc_model::survival_to(double T, const std::vector<double>& init,
                               double tail_tol) const {
  if (T < 0) throw std::invalid_argument("survival_to: negative horizon");
  if (init.size() != n_states_)
    throw std::invalid_argument("survival_to: init size mismatch");
  double m = uniform_rate_ * T;
  if (m > 600.0)
    throw std::invalid_argument("survival_to: uniformized mean too large");

  auto live_mass = [&](const std::vector<double>& v) {
    double s = 0;
    for (std::uint32_t i = 0; i < n_states_; ++i)
      if (!eta_empty(i)) s += v[i];
    return s;
  };

  if (m == 0.0) return live_mass(init);

  std::vector<double> cur = init, nxt(n_states_);
  double w = std::exp(-m); /* Poisson(m) weight at k=0 */
  double cum = w;
  double acc = w * live_mass(cur);
  std::uint64_t k = 0;
  while (cum < 1.0 - tail_tol) {
    /* one uniformized jump: nxt = cur (I - D/L) + cur A / L */
    ++k;
    std::fill(nxt.begin(), nxt.end(), 0.0);
    for (std::uint32_t s = 0; s < n_states_; ++s) {
      double mass = cur[s];
      if (mass == 0.0) continue;
      nxt[s] += mass * (1.0 - exit_rate_[s] / uniform_rate_);
      for (std::uint64_t j = row_ptr_[s]; j < row_ptr_[s + 1]; ++j)
        nxt[col_[j]] += mass * (rate_[j] / uniform_rate_);
    }
    cur.swap(nxt);
    w *= m / static_cast<double>(k);
    cum += w;
    acc += w * live_mass(cur);
    if (k > 100000) throw std::runtime_error("survival_to: did not converge");
  }
  return acc;
}

const std::vector<double>& ctmc_model::absorption_times() const {
  if (!absorption_times_.empty()) return absorption_times_;
  /* index transient states (eta != 0) */
  std::vector<std::int32_t> idx(n_states_, -1);
  std::uint32_t nt = 0;
  for (std::uint32_t s = 0; s < n_states_; ++s)
    if (!eta_empty(s)) idx[s] = static_cast<std::int32_t>(nt++);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(col_.size());
  for (std::uint32_t s = 0; s < n_states_; ++s) {
    if (idx[s] < 0) continue;
    trip.emplace_back(idx[s], idx[s], exit_rate_[s]);
    for (std::uint64_t j = row_ptr_[s]; j < row_ptr_[s + 1]; ++j) {
      std::uint32_t t = col_[j];
      if (idx[t] >= 0) trip.emplace_back(idx[s], idx[t], -rate_[j]);
    }
  }
  Eigen::SparseMatrix<double> A(nt, nt);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("absorption_times: factorization failed");
  Eigen::VectorXd b = Eigen::VectorXd::Ones(nt);
  Eigen::VectorXd t = lu.solve(b);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("absorption_times: solve failed");

  absorption_times_.assign(n_states_, 0.0);
  for (std::uint32_t s = 0; s < n_states_; ++s)
    if (idx[s] >= 0) absorption_times_[s] = t[idx[s]];
  return absorption_times_;
}

double ctmc_model::mean_extinction(const std::vector<double>& init) const {
  const auto& times = absorption_times();
  if (init.size() != n_states_)
    throw std::invalid_argument("mean_extinction: init size mismatch");
  double acc = 0;
  for (std::uint32_t s = 0; s < n_states_; ++s) acc += init[s] * times[s];
  return acc;
}

double ctmc_model::mean_extinction_by_quadrature(
    const std::vector<double>& init, double step) const {
  /* find an end point where the curve is numerically dead */
  double t_end = 8.0;
  while (survival_to(t_end, init) > 1e-9) {
    t_end *= 2.0;
    if (t_end > 4096.0)
      throw std::runtime_error("quadrature: survival does not vanish");
  }
  auto n_half = static_cast<std::size_t>(t_end / step);
  if (n_half % 2 == 1) ++n_half;
  double h = t_end / static_cast<double>(n_half);
  double acc = survival_to(0.0, init) + survival_to(t_end, init);
  for (std::size_t i = 1; i < n_half; ++i) {
    double w = (i % 2 == 1) ? 4.0 : 2.0;
    acc += w * survival_to(h * static_cast<double>(i), init);
  }
  return acc * h / 3.0;
}

namespace {

/* Interval H-rules, one step: saturate Z along same-level edges with
   V = 1, then every saturated k with an up-permit (its own U, or a V on
   either side) contributes {k-1, k, k+1}. Driver lookups go through the
   callbacks so the enumerated and summed routes share the step logic. */
template <class VF, class UF>
std::pair<int, bool> z_step_interval_size(int radius, VF v_at, UF u_at) {
  /* saturation of {0}: maximal run of V=1 edges through 0 */
  int l = 0, r = 0;
  while (l - 1 >= -radius && v_at(l - 1)) --l; /* v_at(j): edge {j, j+1} */
  while (r + 1 <= radius && v_at(r)) ++r;
  bool truncated = (l == -radius) || (r == radius);
  if (l == 0 && r == 0) return {u_at(0) ? 3 : 0, truncated};
  return {(r - l + 1) + 2, truncated};
}

}  // namespace

z_one_step_law exact_z_one_step(double eps, int radius, bool enumerate) {
  if (eps <= 0 || eps >= 1 || radius < 2)
    throw std::invalid_argument("exact_z_one_step: bad arguments");
  z_one_step_law out;
  if (enumerate) {
    if (radius > 4)
      throw std::invalid_argument("exact_z_one_step: enumeration radius > 4");
    int n_v = 2 * radius;      /* edges {j, j+1}, j in [-radius, radius-1] */
    int n_u = 2 * radius + 1;  /* vertices in [-radius, radius] */
    int bits = n_v + n_u;
    for (std::uint64_t a = 0; a < (1ull << bits); ++a) {
      double w = 1.0;
      for (int b = 0; b < bits; ++b)
        w *= (a & (1ull << b)) ? eps : 1.0 - eps;
      auto v_at = [&](int j) -> bool { return a & (1ull << (j + radius)); };
      auto u_at = [&](int k) -> bool {
        return a & (1ull << (n_v + k + radius));
      };
      auto [size, trunc] = z_step_interval_size(radius, v_at, u_at);
      if (trunc)
        out.truncated_mass += w;
      else
        out.size_prob[size] += w;
    }
  } else {
    /* exact summation over the independent coordinates: the saturation of
       {0} is [l, r] iff the V-run through 0 is exactly that (prob
       eps^(r-l) (1-eps)^2), independent of every U; a singleton grows to
       size 3 iff U_0 = 1. */
    out.size_prob[0] = (1.0 - eps) * (1.0 - eps) * (1.0 - eps);
    out.size_prob[3] = eps * (1.0 - eps) * (1.0 - eps);
    for (int l = -radius + 1; l <= 0; ++l) {
      for (int r = (l == 0 ? 1 : 0); r <= radius - 1; ++r) {
        if (l == 0 && r == 0) continue;
        double w = std::pow(eps, r - l) * (1.0 - eps) * (1.0 - eps);
        out.size_prob[(r - l + 1) + 2] += w;
      }
    }
    double covered = 0;
    for (auto& [k, p] : out.size_prob) covered += p;
    out.truncated_mass = std::max(0.0, 1.0 - covered);
  }

  /* interval-count reference law, padded at 0 */
  std::map<int, double> ref;
  double ref_mass = 0.0;
  for (int k = 4; k <= 2 * radius + 3; ++k) {
    ref[k] = (k - 2) * std::pow(eps, k - 3) * (1.0 - eps) * (1.0 - eps);
    ref_mass += ref[k];
  }
  ref[0] = std::max(0.0, 1.0 - ref_mass);
  double tv = 0.0;
  for (auto& [k, p] : out.size_prob) {
    auto it = ref.find(k);
    double q = (it == ref.end()) ? 0.0 : it->second;
    tv += std::abs(p - q);
  }
  for (auto& [k, q] : ref)
    if (!out.size_prob.count(k)) tv += q;
  out.tv_to_interval_count = 0.5 * (tv + out.truncated_mass);
  return out;
}

}  // namespace cpde

#include "cpde/zprocess.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include "cpde/rng.hpp"

namespace cpde {

namespace {

/* Fold the signed site index into a distinct stream entity. */
std::uint64_t fold_index(long long k) {
  return k >= 0 ? 2ull * static_cast<std::uint64_t>(k)
                : 2ull * static_cast<std::uint64_t>(-(k + 1)) + 1ull;
}

}  // namespace

bernoulli_z_driver::bernoulli_z_driver(std::uint64_t seed_, double eps_)
    : seed(seed_), eps(eps_) {
  if (eps < 0.0 || eps > 1.0)
    throw std::domain_error("bernoulli_z_driver: eps must be in [0, 1]");
}

bool bernoulli_z_driver::u(long long k, long long n) {
  rng g(seed, stream_kind::aux, fold_index(k), static_cast<std::uint64_t>(n));
  return g.next_bernoulli(eps);
}

bool bernoulli_z_driver::v(long long k, long long n) {
  rng g(seed, stream_kind::aux, fold_index(k), static_cast<std::uint64_t>(n));
  g.next_u64();
  return g.next_bernoulli(eps);
}

bool interval_grid_z_driver::u(long long k, long long n) {
  if (n < 0 || n >= grid->n_windows) return false;
  if (grid->wraps)
    k = ((k % grid->n_blocks) + grid->n_blocks) % grid->n_blocks;
  else if (k < 0 || k >= grid->n_blocks)
    return false;
  return grid->U[n][k] != 0;
}

bool interval_grid_z_driver::v(long long k, long long n) {
  if (n < 0 || n >= grid->n_windows) return false;
  if (grid->wraps)
    k = ((k % grid->n_pairs) + grid->n_pairs) % grid->n_pairs;
  else if (k < 0 || k >= grid->n_pairs)
    return false;
  return grid->V[n][k] != 0;
}

bool vertex_grid_z_driver::u(long long k, long long n) {
  if (n < 0 || n >= grid->n_windows) return false;
  if (wraps)
    k = ((k % n_sites) + n_sites) % n_sites;
  else if (k < 0 || k >= n_sites)
    return false;
  return grid->U[n][k] != 0;
}

bool vertex_grid_z_driver::v(long long k, long long n) {
  if (n < 0 || n >= grid->n_windows) return false;
  int n_edges = wraps ? n_sites : n_sites - 1;
  if (wraps)
    k = ((k % n_sites) + n_sites) % n_sites;
  else if (k < 0 || k >= n_edges)
    return false;
  return grid->V[n][k] != 0;
}

z_trace run_Z(z_driver& drv, const std::vector<long long>& z0,
              long long budget, z_rule rule, long long modulus,
              bool record_levels, long long span_limit) {
  if (budget <= 0) throw std::domain_error("run_Z: budget must be positive");
  if (modulus < 0) throw std::domain_error("run_Z: modulus must be >= 0");
  auto norm = [modulus](long long k) {
    return modulus > 0 ? ((k % modulus) + modulus) % modulus : k;
  };

  std::vector<long long> cur;
  cur.reserve(z0.size());
  for (long long k : z0) cur.push_back(norm(k));
  std::sort(cur.begin(), cur.end());
  cur.erase(std::unique(cur.begin(), cur.end()), cur.end());

  z_trace tr;
  tr.level_sizes.push_back(cur.size());
  if (record_levels) tr.levels.push_back(cur);
  if (cur.empty()) {
    tr.n_ext = 0;
    tr.died = true;
    return tr;
  }

  std::vector<long long> sat;
  std::unordered_set<long long> seen;
  for (long long n = 0; n < budget; ++n) {
    /* Sweep the level along pair edges with v = 1. */
    sat = cur;
    seen.clear();
    seen.insert(cur.begin(), cur.end());
    long long grown = 0;
    for (std::size_t i = 0; i < sat.size(); ++i) {
      long long j = sat[i];
      for (int d : {1, -1}) {
        long long tgt = norm(j + d);
        if (seen.count(tgt)) continue;
        if (!drv.v(norm(d > 0 ? j : j - 1), n)) continue;
        seen.insert(tgt);
        sat.push_back(tgt);
        if (++grown > span_limit)
          throw std::runtime_error("run_Z: saturation span limit exceeded");
      }
    }
    /* Step up where a site holds a permit of its own or of an incident
       pair. */
    std::unordered_set<long long> next_seen;
    std::vector<long long> next;
    for (long long j : sat) {
      bool permit = drv.u(j, n) || drv.v(norm(j), n) || drv.v(norm(j - 1), n);
      if (!permit) continue;
      if (rule == z_rule::interval) {
        for (int d : {-1, 0, 1}) {
          long long tgt = norm(j + d);
          if (next_seen.insert(tgt).second) next.push_back(tgt);
        }
      } else {
        if (next_seen.insert(j).second) next.push_back(j);
      }
    }
    std::sort(next.begin(), next.end());
    cur.swap(next);
    tr.level_sizes.push_back(cur.size());
    if (record_levels) tr.levels.push_back(cur);
    if (cur.empty()) {
      tr.n_ext = n + 1;
      tr.died = true;
      break;
    }
  }
  return tr;
}

std::uint64_t z_containment_check(
    const std::vector<std::vector<std::uint8_t>>& eta_at_windows,
    const interval_block_grid& grid, const z_trace& zt) {
  if (zt.levels.empty())
    throw std::invalid_argument("z_containment_check: trace has no level sets");
  int lim = grid.n_windows;
  lim = std::min<int>(lim, static_cast<int>(zt.levels.size()));
  lim = std::min<int>(lim, static_cast<int>(eta_at_windows.size()));
  std::uint64_t violations = 0;
  for (int n = 0; n < lim; ++n) {
    std::unordered_set<long long> zn(zt.levels[n].begin(), zt.levels[n].end());
    const auto& eta = eta_at_windows[n];
    const int ns = static_cast<int>(eta.size());
    /* map vertices to their window-n block */
    std::vector<int> block_of(ns, -1);
    for (int k = 0; k < grid.n_blocks; ++k) {
      int lo = grid.block_lo[n][k], hi = grid.block_hi[n][k];
      for (int x = lo;; x = grid.wraps ? (x + 1) % ns : x + 1) {
        block_of[x] = k;
        if (x == hi) break;
      }
    }
    for (int x = 0; x < ns; ++x)
      if (eta[x] && !zn.count(block_of[x])) ++violations;
  }
  return violations;
}

}  // namespace cpde

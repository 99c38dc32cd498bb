#pragma once

#include <cstdint>
#include <vector>

#include "cpde/blocks.hpp"

namespace cpde {

/* Level-indexed percolation variables. u(k,n) is the vertex variable at
   site k, level n; v(k,n) is the pair variable for {k, k+1} at level n.
   Implementations must be pure functions of (k, n). */
struct z_driver {
  virtual ~z_driver() = default;
  virtual bool u(long long k, long long n) = 0;
  virtual bool v(long long k, long long n) = 0;
};

/* Independent Bernoulli(eps) variables, keyed by (k, n) so that any query
   order yields the same assignment. */
struct bernoulli_z_driver final : z_driver {
  std::uint64_t seed;
  double eps;
  bernoulli_z_driver(std::uint64_t seed_, double eps_);
  bool u(long long k, long long n) override;
  bool v(long long k, long long n) override;
};

/* Variables read off an extracted interval block grid (wraps on cycles). */
struct interval_grid_z_driver final : z_driver {
  const interval_block_grid* grid;
  explicit interval_grid_z_driver(const interval_block_grid& g) : grid(&g) {}
  bool u(long long k, long long n) override;
  bool v(long long k, long long n) override;
};

/* Variables read off a vertex block grid (wraps on cycles). */
struct vertex_grid_z_driver final : z_driver {
  const vertex_block_grid* grid;
  int n_sites;
  bool wraps;
  vertex_grid_z_driver(const vertex_block_grid& g, int n_sites_, bool wraps_)
      : grid(&g), n_sites(n_sites_), wraps(wraps_) {}
  bool u(long long k, long long n) override;
  bool v(long long k, long long n) override;
};

/* Up-step rule. interval: a permitted site k feeds k-1, k, k+1 at the next
   level. vertex: a permitted site feeds only itself. Both rules first
   saturate the current level along pair edges with v = 1, and a site is
   permitted to step up when its own u holds or an incident pair variable
   does. */
enum class z_rule { interval, vertex };

struct z_trace {
  std::vector<std::uint64_t> level_sizes; /* |Z_0|, |Z_1|, ... */
  long long n_ext = -1;                   /* first empty level; -1 = budget hit */
  bool died = false;
  std::vector<std::vector<long long>> levels; /* kept when requested */
};

/* Runs the level recursion from Z_0 = z0 for at most `budget` steps.
   modulus > 0 wraps site indices (cycle geometry); modulus = 0 runs on the
   integer line, where a saturation sweep is capped at span_limit added
   sites per level (exceeding it throws). */
z_trace run_Z(z_driver& drv, const std::vector<long long>& z0,
              long long budget, z_rule rule = z_rule::interval,
              long long modulus = 0, bool record_levels = false,
              long long span_limit = 1 << 22);

/* Containment audit: every vertex infected at time nT must lie in a block
   whose index is in Z_n. eta_at_windows[n] is the configuration at nT.
   Returns the number of (n, vertex) violations. */
std::uint64_t z_containment_check(
    const std::vector<std::vector<std::uint8_t>>& eta_at_windows,
    const interval_block_grid& grid, const z_trace& zt);

}  // namespace cpde

#pragma once

#include <cstdint>
#include <vector>

#include "cpde/params.hpp"
#include "cpde/streams.hpp"
#include "cpde/topology.hpp"

namespace cpde {

/* Space-time blocks for a path or cycle: windows [nT,(n+1)T), and per
   window a partition of the vertex line into intervals separated by
   barrier edges (edges closed throughout the window). Pair interval k
   spans vertices [k*r0, (k+1)*r0]. On a cycle, n_sites must be a multiple
   of r0 and everything wraps; on a path the two ends act as permanent
   barriers and there is one trailing block after the last pair. */
struct interval_block_grid {
  int r0 = 1;
  double T = 1.0;
  int n_windows = 0;
  int n_pairs = 0;  /* V/barrier index range */
  int n_blocks = 0; /* cycle: == n_pairs; path: n_pairs + 1 */
  bool wraps = false;
  /* [window][edge]: closed throughout the window */
  std::vector<std::vector<std::uint8_t>> n_closed;
  /* [window][pair k]: no barrier among edges k*r0 .. (k+1)*r0 - 1 */
  std::vector<std::vector<std::uint8_t>> V;
  /* [window][pair k]: leftmost barrier edge, or (k+1)*r0 - 1 if none */
  std::vector<std::vector<int>> barrier;
  /* [window][block k]: vertex interval [lo, hi], hi possibly < lo when a
     cycle block wraps through vertex 0 */
  std::vector<std::vector<int>> block_lo, block_hi;
  /* [window][block k]: a valid path crosses the block bottom-to-top */
  std::vector<std::vector<std::uint8_t>> U;

  /* Vertices of block k in window n, in order. */
  std::vector<int> block_vertices(int n, int k, int n_sites) const;
};

interval_block_grid interval_block_variables(const topology& top,
                                             const params& pr,
                                             const event_streams& streams,
                                             const std::vector<std::uint8_t>& zeta0,
                                             int r0, double T, int n_windows);

/* Per-window indicators at single-vertex resolution: V = the edge was open
   at some point in the window, U = no recovery mark at the vertex. */
struct vertex_block_grid {
  double T = 1.0;
  int n_windows = 0;
  std::vector<std::vector<std::uint8_t>> V; /* [window][edge] */
  std::vector<std::vector<std::uint8_t>> U; /* [window][vertex] */
};

vertex_block_grid vertex_block_variables(const topology& top,
                                         const event_streams& streams,
                                         const std::vector<std::uint8_t>& zeta0,
                                         double T, int n_windows);

/* Four-vertex sliding blocks with strong environment/infection density
   conditions, and the oriented reachability of the all-conditions blocks.
   Block (k,n) = vertices 4k-2n .. 4k-2n+3 over window [nT,(n+1)T); its
   three interior edges must open (c1) and never close (c2); all
   non-arrow events in the block must be isolated by gaps > gap_delta,
   window endpoints included (c3); and every length-(T*gap_delta/6)
   subwindow must contain an arrow on each interior edge (c4). */
struct good_block_grid {
  double M = 0, T = 0, gap_delta = 0;
  int n_rows = 0;
  int k_base = 0, k_count = 0;
  /* [row][k - k_base] */
  std::vector<std::vector<std::uint8_t>> c1, c2, c3, c4, good;
  /* oriented reachability from block (0,0): (k,n) feeds (k,n+1), (k+1,n+1) */
  std::vector<std::vector<std::uint8_t>> reachable;
  bool top_row_reached = false;
};

good_block_grid evaluate_good_blocks(const topology& top,
                                     const event_streams& streams,
                                     double gap_delta, double T, int n_rows,
                                     int k_base, int k_count);

/* Propagation demonstration on an isolated 4-vertex block: seed two
   adjacent infected vertices across a forced-open interior edge, condition
   on the block being good, and test that the whole block is infected with
   all interior edges open at the window end. */
struct block_propagation_result {
  std::uint64_t replicas = 0;
  std::uint64_t conditioned = 0; /* replicas where the block was good */
  std::uint64_t propagated = 0;  /* ... and eta_T = 1, zeta_T = 1 on it */
  std::uint64_t c1_count = 0, c2_count = 0; /* marginals over all replicas */
};

block_propagation_result good_block_propagation(const params& pr,
                                                double gap_delta, double T,
                                                std::uint64_t replicas,
                                                std::uint64_t seed);

}  // namespace cpde

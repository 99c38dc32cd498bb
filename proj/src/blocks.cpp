#include "cpde/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cpde/engine.hpp"

namespace cpde {

namespace {

/* Number of stream points in [lo, hi). */
std::size_t points_in(const std::vector<double>& pts, double lo, double hi) {
  auto a = std::lower_bound(pts.begin(), pts.end(), lo);
  auto b = std::lower_bound(pts.begin(), pts.end(), hi);
  return static_cast<std::size_t>(b - a);
}

void collect_in(const std::vector<double>& pts, double lo, double hi,
                std::vector<double>& out) {
  auto a = std::lower_bound(pts.begin(), pts.end(), lo);
  auto b = std::lower_bound(pts.begin(), pts.end(), hi);
  out.insert(out.end(), a, b);
}

}  // namespace

std::vector<int> interval_block_grid::block_vertices(int n, int k,
                                                     int n_sites) const {
  std::vector<int> out;
  int lo = block_lo[n][k], hi = block_hi[n][k];
  int x = lo;
  for (;;) {
    out.push_back(x);
    if (x == hi) break;
    x = wraps ? (x + 1) % n_sites : x + 1;
  }
  return out;
}

interval_block_grid interval_block_variables(
    const topology& top, const params& pr, const event_streams& streams,
    const std::vector<std::uint8_t>& zeta0, int r0, double T, int n_windows) {
  (void)pr;
  if (top.shape != topology::shape_kind::path && top.shape != topology::shape_kind::cycle)
    throw std::domain_error("interval blocks: need a path or cycle");
  if (r0 < 1) throw std::domain_error("interval blocks: r0 must be >= 1");
  if (!(T > 0)) throw std::domain_error("interval blocks: T must be > 0");
  if (n_windows < 1) throw std::domain_error("interval blocks: need >= 1 window");
  if (streams.horizon + 1e-9 < n_windows * T)
    throw std::domain_error("interval blocks: streams end before the last window");
  if (static_cast<int>(zeta0.size()) != top.n_edges())
    throw std::invalid_argument("interval blocks: zeta0 size mismatch");

  interval_block_grid g;
  g.r0 = r0;
  g.T = T;
  g.n_windows = n_windows;
  g.wraps = top.shape == topology::shape_kind::cycle;
  if (g.wraps) {
    if (top.n_sites % r0 != 0)
      throw std::domain_error("interval blocks: cycle size must be a multiple of r0");
    g.n_pairs = top.n_sites / r0;
    if (g.n_pairs < 2)
      throw std::domain_error("interval blocks: cycle needs at least two pair intervals");
    g.n_blocks = g.n_pairs;
  } else {
    g.n_pairs = (top.n_sites - 1) / r0;
    if (g.n_pairs < 1)
      throw std::domain_error("interval blocks: path too short for r0");
    g.n_blocks = g.n_pairs + 1;
  }

  const int ne = top.n_edges();
  const int ns = top.n_sites;

  /* Window-constant closure per edge: closed at the window start and no
     open point inside. Each edge walks its own points once. */
  g.n_closed.assign(n_windows, std::vector<std::uint8_t>(ne, 0));
  for (int e = 0; e < ne; ++e) {
    const auto& op = streams.open_t[e];
    const auto& cl = streams.close_t[e];
    std::size_t io = 0, ic = 0;
    int z = zeta0[e];
    for (int n = 0; n < n_windows; ++n) {
      double hi = (n + 1) * T;
      int z_start = z;
      bool has_open = false;
      for (;;) {
        double to = io < op.size() ? op[io] : streams.horizon + 1;
        double tc = ic < cl.size() ? cl[ic] : streams.horizon + 1;
        if (to >= hi && tc >= hi) break;
        if (to <= tc) {
          z = 1;
          has_open = true;
          ++io;
        } else {
          z = 0;
          ++ic;
        }
      }
      g.n_closed[n][e] = (z_start == 0 && !has_open) ? 1 : 0;
    }
  }

  g.V.assign(n_windows, std::vector<std::uint8_t>(g.n_pairs, 0));
  g.barrier.assign(n_windows, std::vector<int>(g.n_pairs, 0));
  g.block_lo.assign(n_windows, std::vector<int>(g.n_blocks, 0));
  g.block_hi.assign(n_windows, std::vector<int>(g.n_blocks, 0));
  for (int n = 0; n < n_windows; ++n) {
    for (int k = 0; k < g.n_pairs; ++k) {
      int first = -1;
      for (int e = k * r0; e < (k + 1) * r0; ++e) {
        if (g.n_closed[n][e]) {
          first = e;
          break;
        }
      }
      g.V[n][k] = first < 0 ? 1 : 0;
      g.barrier[n][k] = first < 0 ? (k + 1) * r0 - 1 : first;
    }
    if (g.wraps) {
      for (int k = 0; k < g.n_blocks; ++k) {
        int prev = (k + g.n_pairs - 1) % g.n_pairs;
        g.block_lo[n][k] = (g.barrier[n][prev] + 1) % ns;
        g.block_hi[n][k] = g.barrier[n][k];
      }
    } else {
      for (int k = 0; k < g.n_blocks; ++k) {
        g.block_lo[n][k] = k == 0 ? 0 : g.barrier[n][k - 1] + 1;
        g.block_hi[n][k] = k == g.n_pairs ? ns - 1 : g.barrier[n][k];
      }
    }
  }

  /* Bottom-to-top crossings: start with every vertex marked at nT, kill a
     mark at each recovery, and let arrows on currently-open edges join the
     marks of endpoints that sit in the same block. U holds iff a mark
     survives to the window top. */
  g.U.assign(n_windows, std::vector<std::uint8_t>(g.n_blocks, 0));
  auto merged = merge_events(streams);
  std::vector<std::uint8_t> zeta = zeta0;
  std::vector<std::uint8_t> mark(ns, 1);
  std::vector<int> block_of(ns, -1);
  std::size_t iev = 0;
  for (int n = 0; n < n_windows; ++n) {
    double hi = (n + 1) * T;
    for (int k = 0; k < g.n_blocks; ++k) {
      int lo = g.block_lo[n][k], bhi = g.block_hi[n][k];
      for (int x = lo;; x = g.wraps ? (x + 1) % ns : x + 1) {
        block_of[x] = k;
        if (x == bhi) break;
      }
    }
    std::fill(mark.begin(), mark.end(), 1);
    for (; iev < merged.size() && merged[iev].t < hi; ++iev) {
      const event& ev = merged[iev];
      switch (ev.kind) {
        case stream_kind::edge_open: zeta[ev.entity] = 1; break;
        case stream_kind::edge_close: zeta[ev.entity] = 0; break;
        case stream_kind::site_recover: mark[ev.entity] = 0; break;
        default: {
          if (!zeta[ev.entity]) break;
          auto [x, y] = top.edges[ev.entity];
          if (block_of[x] != block_of[y]) break;
          std::uint8_t m = mark[x] | mark[y];
          mark[x] = m;
          mark[y] = m;
          break;
        }
      }
    }
    for (int x = 0; x < ns; ++x)
      if (mark[x]) g.U[n][block_of[x]] = 1;
  }
  return g;
}

vertex_block_grid vertex_block_variables(const topology& top,
                                         const event_streams& streams,
                                         const std::vector<std::uint8_t>& zeta0,
                                         double T, int n_windows) {
  if (!(T > 0)) throw std::domain_error("vertex blocks: T must be > 0");
  if (n_windows < 1) throw std::domain_error("vertex blocks: need >= 1 window");
  if (streams.horizon + 1e-9 < n_windows * T)
    throw std::domain_error("vertex blocks: streams end before the last window");
  vertex_block_grid g;
  g.T = T;
  g.n_windows = n_windows;
  g.V.assign(n_windows, std::vector<std::uint8_t>(top.n_edges(), 0));
  g.U.assign(n_windows, std::vector<std::uint8_t>(top.n_sites, 0));
  for (int e = 0; e < top.n_edges(); ++e) {
    const auto& op = streams.open_t[e];
    const auto& cl = streams.close_t[e];
    std::size_t io = 0, ic = 0;
    int z = zeta0[e];
    for (int n = 0; n < n_windows; ++n) {
      double hi = (n + 1) * T;
      bool seen_open = z == 1;
      for (;;) {
        double to = io < op.size() ? op[io] : streams.horizon + 1;
        double tc = ic < cl.size() ? cl[ic] : streams.horizon + 1;
        if (to >= hi && tc >= hi) break;
        if (to <= tc) {
          z = 1;
          seen_open = true;
          ++io;
        } else {
          z = 0;
          ++ic;
        }
      }
      g.V[n][e] = seen_open ? 1 : 0;
    }
  }
  for (int x = 0; x < top.n_sites; ++x) {
    const auto& rc = streams.recover_t[x];
    for (int n = 0; n < n_windows; ++n)
      g.U[n][x] = points_in(rc, n * T, (n + 1) * T) == 0 ? 1 : 0;
  }
  return g;
}

good_block_grid evaluate_good_blocks(const topology& top,
                                     const event_streams& streams,
                                     double gap_delta, double T, int n_rows,
                                     int k_base, int k_count) {
  if (top.shape != topology::shape_kind::path && top.shape != topology::shape_kind::cycle)
    throw std::domain_error("good blocks: need a path or cycle");
  if (!(T > 0)) throw std::domain_error("good blocks: T must be > 0");
  if (!(gap_delta > 0) || gap_delta >= 6.0)
    throw std::domain_error("good blocks: gap_delta must be in (0, 6)");
  if (n_rows < 1 || k_count < 1)
    throw std::domain_error("good blocks: need at least one block");
  if (streams.horizon + 1e-9 < n_rows * T)
    throw std::domain_error("good blocks: streams end before the last row");

  good_block_grid g;
  g.T = T;
  g.gap_delta = gap_delta;
  g.n_rows = n_rows;
  g.k_base = k_base;
  g.k_count = k_count;
  auto blank = std::vector<std::vector<std::uint8_t>>(
      n_rows, std::vector<std::uint8_t>(k_count, 0));
  g.c1 = g.c2 = g.c3 = g.c4 = g.good = g.reachable = blank;

  const int ns = top.n_sites;
  const bool wraps = top.shape == topology::shape_kind::cycle;
  const long long n_subs = static_cast<long long>(std::ceil(6.0 / gap_delta - 1e-9));
  const double sub_w = T * gap_delta / 6.0;

  std::vector<double> pts;
  for (int n = 0; n < n_rows; ++n) {
    double wlo = n * T, whi = (n + 1) * T;
    for (int kc = 0; kc < k_count; ++kc) {
      long long a = 4LL * (k_base + kc) - 2LL * n;
      int verts[4], eids[3];
      if (wraps) {
        for (int i = 0; i < 4; ++i)
          verts[i] = static_cast<int>(((a + i) % ns + ns) % ns);
        for (int i = 0; i < 3; ++i) eids[i] = verts[i];
      } else {
        if (a < 0 || a + 3 >= ns)
          throw std::domain_error("good blocks: block leaves the path");
        for (int i = 0; i < 4; ++i) verts[i] = static_cast<int>(a + i);
        for (int i = 0; i < 3; ++i) eids[i] = verts[i];
      }

      bool c1 = true, c2 = true;
      for (int e : eids) {
        if (points_in(streams.open_t[e], wlo, whi) == 0) c1 = false;
        if (points_in(streams.close_t[e], wlo, whi) != 0) c2 = false;
      }

      pts.clear();
      for (int e : eids) {
        collect_in(streams.open_t[e], wlo, whi, pts);
        collect_in(streams.close_t[e], wlo, whi, pts);
      }
      for (int x : verts) collect_in(streams.recover_t[x], wlo, whi, pts);
      std::sort(pts.begin(), pts.end());
      bool c3 = true;
      double prev = wlo;
      for (double t : pts) {
        if (t - prev <= gap_delta) {
          c3 = false;
          break;
        }
        prev = t;
      }
      if (c3 && whi - prev <= gap_delta) c3 = false;

      bool c4 = true;
      for (int e : eids) {
        for (long long l = 0; l < n_subs && c4; ++l) {
          double slo = wlo + l * sub_w;
          double shi = std::min(wlo + (l + 1) * sub_w, whi);
          if (slo >= whi) break;
          std::size_t cnt =
              streams.split
                  ? points_in(streams.infect_accept_t[e], slo, shi) +
                        points_in(streams.infect_reject_t[e], slo, shi)
                  : points_in(streams.infect_t[e], slo, shi);
          if (cnt == 0) c4 = false;
        }
        if (!c4) break;
      }

      g.c1[n][kc] = c1;
      g.c2[n][kc] = c2;
      g.c3[n][kc] = c3;
      g.c4[n][kc] = c4;
      g.good[n][kc] = c1 && c2 && c3 && c4;
    }
  }

  /* Oriented reachability from block (0,0) through good blocks only:
     (k,n) feeds (k,n+1) and (k+1,n+1). */
  if (k_base <= 0 && 0 < k_base + k_count)
    g.reachable[0][-k_base] = g.good[0][-k_base];
  for (int n = 1; n < n_rows; ++n)
    for (int kc = 0; kc < k_count; ++kc) {
      if (!g.good[n][kc]) continue;
      bool from_below = g.reachable[n - 1][kc] ||
                        (kc > 0 && g.reachable[n - 1][kc - 1]);
      g.reachable[n][kc] = from_below;
    }
  for (int kc = 0; kc < k_count; ++kc)
    if (g.reachable[n_rows - 1][kc]) g.top_row_reached = true;
  return g;
}

block_propagation_result good_block_propagation(const params& pr,
                                                double gap_delta, double T,
                                                std::uint64_t replicas,
                                                std::uint64_t seed) {
  block_propagation_result out;
  out.replicas = replicas;
  topology top = topology::path(4);
  sim_config cfg;
  cfg.horizon = T;
  cfg.stop_on_extinction = false;
  std::vector<std::uint8_t> eta0 = {0, 1, 1, 0};
  for (std::uint64_t r = 0; r < replicas; ++r) {
    std::uint64_t s = stream_seed(seed, stream_kind::replica, r, 0);
    auto streams = materialize_streams(top, pr, s, T, false);
    auto zeta0 = stationary_environment(top, pr.p, s);
    zeta0[1] = 1; /* the seeded pair straddles the middle edge */
    auto grid = evaluate_good_blocks(top, streams, gap_delta, T, 1, 0, 1);
    if (grid.c1[0][0]) ++out.c1_count;
    if (grid.c2[0][0]) ++out.c2_count;
    if (!grid.good[0][0]) continue;
    ++out.conditioned;
    auto res = simulate_cpde_replay(top, pr, eta0, zeta0, streams, cfg);
    bool full = true;
    for (int x = 0; x < 4 && full; ++x)
      if (!res.eta_final[x]) full = false;
    for (int e = 0; e < 3 && full; ++e)
      if (!res.zeta_final[e]) full = false;
    if (full) ++out.propagated;
  }
  return out;
}

}  // namespace cpde

#pragma once

#include <cstdint>
#include <vector>

#include "cpde/params.hpp"
#include "cpde/rng.hpp"
#include "cpde/topology.hpp"

namespace cpde {

/* Events with t in [w*stream_window, (w+1)*stream_window) come from the
   substream keyed (seed, kind, entity, w); a stream's points therefore do
   not depend on the horizon it is read over. */
constexpr double stream_window = 16.0;

struct event {
  double t;
  stream_kind kind;
  std::uint32_t entity; /* edge index, or vertex index for recoveries */
};

/* 0 = environment updates, 1 = recoveries, 2 = infection arrows. Ties in
   time break by class, then kind, then entity id. */
int event_class(stream_kind k);
bool event_before(const event& a, const event& b);

double kind_rate(stream_kind k, const params& pr);

/* Poisson(rate) points inside window w, ascending: exponential gaps from
   the window start, overshoot discarded. */
std::vector<double> window_points(std::uint64_t seed, stream_kind kind,
                                  std::uint32_t entity, std::uint64_t w,
                                  double rate);

/* All points of one substream in [0, horizon), ascending. */
std::vector<double> stream_points(std::uint64_t seed, stream_kind kind,
                                  std::uint32_t entity, double horizon,
                                  double rate);

/* Materialized graphical representation over [0, horizon). With
   split_infections the infection arrows of edge e are the two substreams
   at rates lambda*p / lambda*(1-p); otherwise one stream at rate lambda. */
struct event_streams {
  bool split = false;
  double horizon = 0.0;
  std::vector<std::vector<double>> open_t;          /* per edge, rate v*p   */
  std::vector<std::vector<double>> close_t;         /* per edge, v*(1-p)    */
  std::vector<std::vector<double>> infect_t;        /* per edge, lambda     */
  std::vector<std::vector<double>> infect_accept_t; /* per edge, lambda*p   */
  std::vector<std::vector<double>> infect_reject_t; /* per edge, l*(1-p)    */
  std::vector<std::vector<double>> recover_t;       /* per vertex, rate 1   */
};

event_streams materialize_streams(const topology& top, const params& pr,
                                  std::uint64_t seed, double horizon,
                                  bool split_infections);

/* Global replay order for the materialized streams. */
std::vector<event> merge_events(const event_streams& s);

/* Edge states at time 0, sampled stationary (open with probability p). */
std::vector<std::uint8_t> stationary_environment(const topology& top, double p,
                                                 std::uint64_t seed);

}  // namespace cpde

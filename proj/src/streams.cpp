#include "cpde/streams.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cpde {

int event_class(stream_kind k) {
  switch (k) {
    case stream_kind::edge_open:
    case stream_kind::edge_close:
      return 0;
    case stream_kind::site_recover:
      return 1;
    case stream_kind::edge_infect:
    case stream_kind::edge_infect_accept:
    case stream_kind::edge_infect_reject:
      return 2;
    default:
      throw std::invalid_argument("event_class: not an event stream kind");
  }
}

bool event_before(const event& a, const event& b) {
  if (a.t != b.t) return a.t < b.t;
  int ca = event_class(a.kind), cb = event_class(b.kind);
  if (ca != cb) return ca < cb;
  if (a.kind != b.kind) return a.kind < b.kind;
  return a.entity < b.entity;
}

double kind_rate(stream_kind k, const params& pr) {
  switch (k) {
    case stream_kind::edge_open: return pr.v * pr.p;
    case stream_kind::edge_close: return pr.v * (1.0 - pr.p);
    case stream_kind::edge_infect: return pr.lambda;
    case stream_kind::edge_infect_accept: return pr.lambda * pr.p;
    case stream_kind::edge_infect_reject: return pr.lambda * (1.0 - pr.p);
    case stream_kind::site_recover: return 1.0;
    default:
      throw std::invalid_argument("kind_rate: not an event stream kind");
  }
}

std::vector<double> window_points(std::uint64_t seed, stream_kind kind,
                                  std::uint32_t entity, std::uint64_t w,
                                  double rate) {
  std::vector<double> out;
  if (rate <= 0.0) return out;
  rng gen(seed, kind, entity, w);
  double t0 = static_cast<double>(w) * stream_window;
  double t1 = t0 + stream_window;
  double t = t0 + gen.next_exp(rate);
  while (t < t1) {
    out.push_back(t);
    t += gen.next_exp(rate);
  }
  return out;
}

std::vector<double> stream_points(std::uint64_t seed, stream_kind kind,
                                  std::uint32_t entity, double horizon,
                                  double rate) {
  std::vector<double> out;
  if (rate <= 0.0 || horizon <= 0.0) return out;
  auto last_w = static_cast<std::uint64_t>(horizon / stream_window);
  for (std::uint64_t w = 0; w <= last_w; ++w) {
    for (double t : window_points(seed, kind, entity, w, rate)) {
      if (t < horizon) out.push_back(t);
    }
  }
  return out;
}

event_streams materialize_streams(const topology& top, const params& pr,
                                  std::uint64_t seed, double horizon,
                                  bool split_infections) {
  pr.validate();
  event_streams s;
  s.split = split_infections;
  s.horizon = horizon;
  int ne = top.n_edges();
  s.open_t.resize(ne);
  s.close_t.resize(ne);
  if (split_infections) {
    s.infect_accept_t.resize(ne);
    s.infect_reject_t.resize(ne);
  } else {
    s.infect_t.resize(ne);
  }
  for (int e = 0; e < ne; ++e) {
    auto ue = static_cast<std::uint32_t>(e);
    s.open_t[e] = stream_points(seed, stream_kind::edge_open, ue, horizon,
                                kind_rate(stream_kind::edge_open, pr));
    s.close_t[e] = stream_points(seed, stream_kind::edge_close, ue, horizon,
                                 kind_rate(stream_kind::edge_close, pr));
    if (split_infections) {
      s.infect_accept_t[e] =
          stream_points(seed, stream_kind::edge_infect_accept, ue, horizon,
                        kind_rate(stream_kind::edge_infect_accept, pr));
      s.infect_reject_t[e] =
          stream_points(seed, stream_kind::edge_infect_reject, ue, horizon,
                        kind_rate(stream_kind::edge_infect_reject, pr));
    } else {
      s.infect_t[e] = stream_points(seed, stream_kind::edge_infect, ue, horizon,
                                    kind_rate(stream_kind::edge_infect, pr));
    }
  }
  s.recover_t.resize(top.n_sites);
  for (int x = 0; x < top.n_sites; ++x) {
    s.recover_t[x] =
        stream_points(seed, stream_kind::site_recover,
                      static_cast<std::uint32_t>(x), horizon, 1.0);
  }
  return s;
}

std::vector<event> merge_events(const event_streams& s) {
  std::vector<event> ev;
  std::size_t total = 0;
  auto count = [&total](const std::vector<std::vector<double>>& vv) {
    for (const auto& v : vv) total += v.size();
  };
  count(s.open_t);
  count(s.close_t);
  count(s.infect_t);
  count(s.infect_accept_t);
  count(s.infect_reject_t);
  count(s.recover_t);
  ev.reserve(total);
  auto push = [&ev](const std::vector<std::vector<double>>& vv,
                    stream_kind k) {
    for (std::uint32_t i = 0; i < vv.size(); ++i)
      for (double t : vv[i]) ev.push_back({t, k, i});
  };
  push(s.open_t, stream_kind::edge_open);
  push(s.close_t, stream_kind::edge_close);
  push(s.infect_t, stream_kind::edge_infect);
  push(s.infect_accept_t, stream_kind::edge_infect_accept);
  push(s.infect_reject_t, stream_kind::edge_infect_reject);
  push(s.recover_t, stream_kind::site_recover);
  std::sort(ev.begin(), ev.end(), event_before);
  return ev;
}

std::vector<std::uint8_t> stationary_environment(const topology& top, double p,
                                                 std::uint64_t seed) {
  std::vector<std::uint8_t> z(top.n_edges());
  for (int e = 0; e < top.n_edges(); ++e) {
    rng gen(seed, stream_kind::init_env, static_cast<std::uint32_t>(e), 0);
    z[e] = gen.next_bernoulli(p) ? 1 : 0;
  }
  return z;
}

}  // namespace cpde

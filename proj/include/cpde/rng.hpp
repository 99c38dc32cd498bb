#pragma once

#include <cstdint>
#include <cmath>

namespace cpde {

/* SplitMix64 finalizer (public domain). Bijective, full avalanche. */
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/* Entity kinds used to key event and coin streams. Values are part of the
   reproducibility contract: changing them changes every sampled path. */
enum class stream_kind : std::uint64_t {
  edge_open = 1,       /* environment opening events, rate v*p        */
  edge_close = 2,      /* environment closing events, rate v*(1-p)    */
  edge_infect = 3,     /* infection arrows, rate lambda               */
  edge_infect_accept = 4, /* split infection arrows, rate lambda*p    */
  edge_infect_reject = 5, /* split infection arrows, rate lambda*(1-p)*/
  site_recover = 6,    /* recovery marks, rate 1                      */
  init_env = 7,        /* initial edge states                         */
  thin_coin = 8,       /* per-event acceptance coins                  */
  replica = 9,         /* per-replica master substreams               */
  aux = 10,            /* everything else (bootstrap, null draws)     */
};

/* Derives the seed of the substream (master, kind, entity, window).
   Chained SplitMix64 mixing; each field lands in a separate round. */
constexpr std::uint64_t stream_seed(std::uint64_t master, stream_kind kind,
                                    std::uint64_t entity, std::uint64_t window) {
  std::uint64_t h = mix64(master + 0x9e3779b97f4a7c15ull);
  h = mix64(h ^ (static_cast<std::uint64_t>(kind) * 0xff51afd7ed558ccdull));
  h = mix64(h ^ (entity * 0xc4ceb9fe1a85ec53ull));
  h = mix64(h ^ (window * 0x2545f4914f6cdd1dull));
  return h;
}

/* Counter-based generator: state walks the Weyl sequence, outputs are the
   mixed counter. Equal seeds give equal streams on any platform. */
class rng {
public:
  explicit rng(std::uint64_t seed) : state_(seed) {}

  rng(std::uint64_t master, stream_kind kind, std::uint64_t entity,
      std::uint64_t window)
      : state_(stream_seed(master, kind, entity, window)) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix64(state_);
  }

  /* Uniform on (0, 1]; never returns 0, so log() is always safe. */
  double next_unit() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  double next_exp(double rate) { return -std::log(next_unit()) / rate; }

  bool next_bernoulli(double q) { return next_unit() <= q; }

  /* Uniform integer in [0, n). Multiply-shift; bias O(n/2^64). */
  std::uint32_t next_below(std::uint32_t n) {
    return static_cast<std::uint32_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  double next_normal() {
    double u1 = next_unit();
    double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

private:
  std::uint64_t state_;
};

}  // namespace cpde

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cpde/config.hpp"

namespace cpde {

/* One line of the fixed estimator-output schema. Unset fields print
   empty. */
struct csv_row {
  std::string topology;
  std::string kind;
  std::optional<int> n;
  std::optional<double> lambda, v, p, horizon;
  std::string eta0;
  std::optional<std::uint64_t> replicas, seed;
  std::optional<double> survival, ci_low, ci_high;
  std::optional<double> mean_tau, se_tau, median_tau;
  std::optional<std::uint64_t> cap_hits;
};

std::string csv_header();
std::string csv_line(const csv_row& r);

/* Shortest round-trip decimal; deterministic for a given build. */
std::string format_double(double x);

void write_csv(const std::string& path, const std::vector<csv_row>& rows);

/* Companion file <csv path>.manifest: resolved config echo plus the seed
   and wall time. Results never depend on it. */
void write_manifest(const std::string& csv_path, const config& resolved,
                    std::uint64_t seed, double wall_seconds);

}  // namespace cpde

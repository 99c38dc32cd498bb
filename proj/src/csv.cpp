#include "cpde/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cpde {

std::string csv_header() {
  return "topology,kind,n,lambda,v,p,horizon,eta0_spec,replicas,seed,"
         "survival,ci_low,ci_high,mean_tau,se_tau,median_tau,cap_hits";
}

std::string format_double(double x) {
  char buf[40];
  /* %.17g round-trips but prints noise; try increasing precision until the
     value survives a parse round-trip. */
  for (int prec = 6; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

namespace {

void put(std::ostringstream& out, const std::optional<double>& x) {
  if (x) out << format_double(*x);
}

void put(std::ostringstream& out, const std::optional<std::uint64_t>& x) {
  if (x) out << *x;
}

void put(std::ostringstream& out, const std::optional<int>& x) {
  if (x) out << *x;
}

}  // namespace

std::string csv_line(const csv_row& r) {
  std::ostringstream out;
  out << r.topology << ',' << r.kind << ',';
  put(out, r.n);
  out << ',';
  put(out, r.lambda);
  out << ',';
  put(out, r.v);
  out << ',';
  put(out, r.p);
  out << ',';
  put(out, r.horizon);
  out << ',' << r.eta0 << ',';
  put(out, r.replicas);
  out << ',';
  put(out, r.seed);
  out << ',';
  put(out, r.survival);
  out << ',';
  put(out, r.ci_low);
  out << ',';
  put(out, r.ci_high);
  out << ',';
  put(out, r.mean_tau);
  out << ',';
  put(out, r.se_tau);
  out << ',';
  put(out, r.median_tau);
  out << ',';
  put(out, r.cap_hits);
  return out.str();
}

void write_csv(const std::string& path, const std::vector<csv_row>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  out << csv_header() << '\n';
  for (const auto& r : rows) out << csv_line(r) << '\n';
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void write_manifest(const std::string& csv_path, const config& resolved,
                    std::uint64_t seed, double wall_seconds) {
  std::ofstream out(csv_path + ".manifest", std::ios::binary);
  if (!out) return; /* best effort; never fails the run */
  out << "seed = " << seed << "\n";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", wall_seconds);
  out << "wall_seconds = " << buf << "\n\n";
  out << resolved.echo();
}

}  // namespace cpde

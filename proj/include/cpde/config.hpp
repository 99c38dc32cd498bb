#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cpde {

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/* Flat key=value files with [section] headers and '#' comments. Keys
   before the first header belong to [run]. Duplicate keys: last wins. */
struct config {
  struct entry {
    std::string section, key, value;
  };
  std::vector<entry> entries;

  static config parse_file(const std::string& path);
  static config parse_text(const std::string& text);

  /* Appends or replaces (used for command-line overrides). */
  void set(const std::string& section, const std::string& key,
           const std::string& value);
  std::optional<std::string> get(const std::string& section,
                                 const std::string& key) const;
  std::string echo() const; /* canonical round-trip text */
};

/* Typed access that tracks which keys were read; finish() rejects any key
   that nothing consumed, naming it. Range violations name the field, the
   offending value, and the legal range. */
class config_reader {
public:
  explicit config_reader(const config& c) : cfg_(c), used_(c.entries.size()) {}

  bool was_set(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback);
  double get_double(const std::string& section, const std::string& key,
                    double fallback, double lo, double hi);
  std::int64_t get_int(const std::string& section, const std::string& key,
                       std::int64_t fallback, std::int64_t lo,
                       std::int64_t hi);
  std::uint64_t get_u64(const std::string& section, const std::string& key,
                        std::uint64_t fallback);
  bool get_bool(const std::string& section, const std::string& key,
                bool fallback);
  /* Comma-separated doubles; empty when absent. */
  std::vector<double> get_list(const std::string& section,
                               const std::string& key, double lo, double hi);

  void finish() const;

private:
  std::optional<std::string> take(const std::string& section,
                                  const std::string& key);
  const config& cfg_;
  std::vector<bool> used_;
};

double parse_double_or_throw(const std::string& field, const std::string& text,
                             double lo, double hi);
std::int64_t parse_int_or_throw(const std::string& field,
                                const std::string& text, std::int64_t lo,
                                std::int64_t hi);

}  // namespace cpde

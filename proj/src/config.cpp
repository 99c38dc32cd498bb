#include "cpde/config.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace cpde {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

}  // namespace

config config::parse_text(const std::string& text) {
  config c;
  std::istringstream in(text);
  std::string line, section = "run";
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw config_error("config line " + std::to_string(lineno) +
                           ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw config_error("config line " + std::to_string(lineno) +
                           ": empty section name");
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("config line " + std::to_string(lineno) +
                         ": expected key=value, got '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw config_error("config line " + std::to_string(lineno) +
                         ": empty key");
    c.set(section, key, value);
  }
  return c;
}

config config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str());
}

void config::set(const std::string& section, const std::string& key,
                 const std::string& value) {
  for (auto& e : entries)
    if (e.section == section && e.key == key) {
      e.value = value;
      return;
    }
  entries.push_back({section, key, value});
}

std::optional<std::string> config::get(const std::string& section,
                                       const std::string& key) const {
  for (const auto& e : entries)
    if (e.section == section && e.key == key) return e.value;
  return std::nullopt;
}

std::string config::echo() const {
  std::ostringstream out;
  std::string cur;
  bool first = true;
  for (const auto& e : entries) {
    if (first || e.section != cur) {
      if (!first) out << "\n";
      out << "[" << e.section << "]\n";
      cur = e.section;
      first = false;
    }
    out << e.key << " = " << e.value << "\n";
  }
  return out.str();
}

double parse_double_or_throw(const std::string& field, const std::string& text,
                             double lo, double hi) {
  errno = 0;
  char* end = nullptr;
  double x = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0' || errno == ERANGE)
    throw config_error("field " + field + ": value '" + text +
                       "' is not a number");
  if (!(x >= lo && x <= hi)) {
    std::ostringstream msg;
    msg << "field " << field << ": value " << text << " outside legal range ["
        << lo << ", " << hi << "]";
    throw config_error(msg.str());
  }
  return x;
}

std::int64_t parse_int_or_throw(const std::string& field,
                                const std::string& text, std::int64_t lo,
                                std::int64_t hi) {
  errno = 0;
  char* end = nullptr;
  long long x = std::strtoll(text.c_str(), &end, 10);
  if (end == text.c_str() || *end != '\0' || errno == ERANGE)
    throw config_error("field " + field + ": value '" + text +
                       "' is not an integer");
  if (x < lo || x > hi) {
    std::ostringstream msg;
    msg << "field " << field << ": value " << text << " outside legal range ["
        << lo << ", " << hi << "]";
    throw config_error(msg.str());
  }
  return x;
}

bool config_reader::was_set(const std::string& section,
                            const std::string& key) const {
  return cfg_.get(section, key).has_value();
}

std::optional<std::string> config_reader::take(const std::string& section,
                                               const std::string& key) {
  for (std::size_t i = 0; i < cfg_.entries.size(); ++i) {
    const auto& e = cfg_.entries[i];
    if (e.section == section && e.key == key) {
      used_[i] = true;
      return e.value;
    }
  }
  return std::nullopt;
}

std::string config_reader::get_string(const std::string& section,
                                      const std::string& key,
                                      const std::string& fallback) {
  auto v = take(section, key);
  return v ? *v : fallback;
}

double config_reader::get_double(const std::string& section,
                                 const std::string& key, double fallback,
                                 double lo, double hi) {
  auto v = take(section, key);
  if (!v) return fallback;
  return parse_double_or_throw(section + "." + key, *v, lo, hi);
}

std::int64_t config_reader::get_int(const std::string& section,
                                    const std::string& key,
                                    std::int64_t fallback, std::int64_t lo,
                                    std::int64_t hi) {
  auto v = take(section, key);
  if (!v) return fallback;
  return parse_int_or_throw(section + "." + key, *v, lo, hi);
}

std::uint64_t config_reader::get_u64(const std::string& section,
                                     const std::string& key,
                                     std::uint64_t fallback) {
  auto v = take(section, key);
  if (!v) return fallback;
  errno = 0;
  char* end = nullptr;
  unsigned long long x = std::strtoull(v->c_str(), &end, 10);
  if (end == v->c_str() || *end != '\0' || errno == ERANGE ||
      v->find('-') != std::string::npos)
    throw config_error("field " + section + "." + key + ": value '" + *v +
                       "' is not an unsigned integer");
  return x;
}

bool config_reader::get_bool(const std::string& section,
                             const std::string& key, bool fallback) {
  auto v = take(section, key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw config_error("field " + section + "." + key + ": value '" + *v +
                     "' is not a boolean (legal: true/false/1/0/yes/no)");
}

std::vector<double> config_reader::get_list(const std::string& section,
                                            const std::string& key, double lo,
                                            double hi) {
  auto v = take(section, key);
  std::vector<double> out;
  if (!v) return out;
  std::istringstream in(*v);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::string t = item;
    std::size_t a = t.find_first_not_of(" \t");
    std::size_t b = t.find_last_not_of(" \t");
    if (a == std::string::npos)
      throw config_error("field " + section + "." + key +
                         ": empty list element");
    out.push_back(parse_double_or_throw(section + "." + key,
                                        t.substr(a, b - a + 1), lo, hi));
  }
  if (out.empty())
    throw config_error("field " + section + "." + key + ": empty list");
  return out;
}

void config_reader::finish() const {
  for (std::size_t i = 0; i < cfg_.entries.size(); ++i)
    if (!used_[i])
      throw config_error("unknown config key '" + cfg_.entries[i].section +
                         "." + cfg_.entries[i].key + "'");
}

}  // namespace cpde

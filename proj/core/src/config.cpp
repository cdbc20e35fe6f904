#include "vrjp/config.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "vrjp/errors.hpp"

namespace vrjp {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool valid_key(std::string_view key) {
  if (key.empty()) return false;
  for (char ch : key) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                    (ch >= '0' && ch <= '9') || ch == '_' || ch == '-' || ch == '.';
    if (!ok) return false;
  }
  return true;
}

template <class T>
T parse_number(const std::string& key, std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("bad value for '" + key + "': '" + std::string(text) + "'");
  }
  return value;
}

double parse_double(const std::string& key, std::string_view text) {
  // from_chars for double is missing in older libstdc++.
  std::string s(text);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw ConfigError("bad value for '" + key + "': '" + s + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

ExperimentConfig::ExperimentConfig(std::string command) { values_["command"] = std::move(command); }

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  ExperimentConfig cfg;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    if (!valid_key(key)) {
      throw ConfigError("config line " + std::to_string(line_no) + ": bad key");
    }
    if (!cfg.values_.emplace(std::string(key), std::string(trim(line.substr(eq + 1)))).second) {
      throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key");
    }
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string ExperimentConfig::to_text() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

void ExperimentConfig::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write config file " + path);
  out << to_text();
}

const std::string& ExperimentConfig::command() const {
  static const std::string none;
  const auto it = values_.find("command");
  return it == values_.end() ? none : it->second;
}

void ExperimentConfig::set(const std::string& key, std::string value) {
  if (!valid_key(key)) throw ConfigError("bad config key '" + key + "'");
  if (value.find_first_of("#\n") != std::string::npos || trim(value) != value) {
    throw ConfigError("value for '" + key + "' cannot be stored losslessly");
  }
  values_[key] = std::move(value);
}

void ExperimentConfig::set(const std::string& key, double value) { set(key, format_double(value)); }
void ExperimentConfig::set(const std::string& key, std::int64_t value) {
  set(key, std::to_string(value));
}
void ExperimentConfig::set(const std::string& key, std::uint64_t value) {
  set(key, std::to_string(value));
}

std::string ExperimentConfig::get_string(const std::string& key,
                                         const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_double(key, it->second);
}

std::int64_t ExperimentConfig::get_int(const std::string& key, std::int64_t fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_number<std::int64_t>(key, it->second);
}

std::uint64_t ExperimentConfig::get_uint64(const std::string& key, std::uint64_t fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_number<std::uint64_t>(key, it->second);
}

std::size_t ExperimentConfig::get_count(const std::string& key, std::size_t fallback) const {
  const std::int64_t n = get_int(key, static_cast<std::int64_t>(fallback));
  if (n <= 0) throw ConfigError("'" + key + "' must be a positive count");
  return static_cast<std::size_t>(n);
}

std::vector<double> ExperimentConfig::get_doubles(const std::string& key,
                                                  std::vector<double> fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  std::string_view rest = it->second;
  while (true) {
    const auto comma = rest.find(',');
    out.push_back(parse_double(key, trim(rest.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return out;
}

std::uint64_t ExperimentConfig::hash() const {
  ExperimentConfig copy = *this;
  copy.values_.erase("out");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : copy.to_text()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string ExperimentConfig::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

}  // namespace vrjp

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace vrjp {

/// Flat key-value parameter record of one experiment. The text form is one
/// "key = value" per line in key order, '#' starts a comment; parse(to_text())
/// reproduces the record exactly.
class ExperimentConfig {
 public:
  ExperimentConfig() = default;
  explicit ExperimentConfig(std::string command);

  static ExperimentConfig parse(std::string_view text);
  static ExperimentConfig load(const std::string& path);
  std::string to_text() const;
  void save(const std::string& path) const;

  const std::string& command() const;
  std::uint64_t seed() const { return get_uint64("seed", 1); }
  std::string output_path() const { return get_string("out", "."); }

  void set(const std::string& key, std::string value);
  void set(const std::string& key, double value);
  void set(const std::string& key, std::int64_t value);
  void set(const std::string& key, std::uint64_t value);
  void set(const std::string& key, int value) { set(key, static_cast<std::int64_t>(value)); }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void erase(const std::string& key) { values_.erase(key); }

  // Typed getters throw ConfigError on malformed values.
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback) const;
  /// Positive count; 0 or negative is a ConfigError.
  std::size_t get_count(const std::string& key, std::size_t fallback) const;
  /// Comma-separated list of reals.
  std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const;

  const std::map<std::string, std::string>& entries() const { return values_; }

  /// 64-bit FNV-1a of the text form without the output path, so the same
  /// experiment written to two places has one hash.
  std::uint64_t hash() const;
  std::string hash_hex() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;

 private:
  std::map<std::string, std::string> values_;
};

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

}  // namespace vrjp

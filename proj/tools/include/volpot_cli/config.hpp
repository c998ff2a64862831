#pragma once

#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace volpot::cli {

/// Raised for malformed or inconsistent configuration; line is 0 when the
/// problem is not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

/// Line-oriented key/value configuration.
///
///   # comment
///   operator.kind = laplace
///   [domain]            # later undotted keys are read as domain.<key>
///   center = [0, 0]
///   points = [[0, 0], [2, 0]]
///
/// Dotted keys are always absolute. Values are scalars or bracketed lists,
/// nested at most one level.
class Config {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  static Config parse(std::istream& in, const std::string& source = "<config>");
  static Config load(const std::string& path);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const std::map<std::string, Entry>& entries() const { return entries_; }
  const std::string& source() const { return source_; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::string> get_strings(const std::string& key,
                                       const std::vector<std::string>& fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<int> get_ints(const std::string& key, const std::vector<int>& fallback) const;
  /// Either a nested list [[..], [..]] or a flat list whose length is a multiple of dim.
  std::vector<std::vector<double>> get_tuples(const std::string& key, int dim) const;

  /// Throws ConfigError at the line of key.
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

 private:
  std::string source_;
  std::map<std::string, Entry> entries_;
};

}  // namespace volpot::cli

#include "volpot_cli/config.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace volpot::cli {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool valid_key(const std::string& key) {
  if (key.empty() || key.front() == '.' || key.back() == '.') return false;
  for (char c : key) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-')) return false;
  }
  return key.find("..") == std::string::npos;
}

// A list value: each element is either a scalar (one token) or a nested list.
using Element = std::vector<std::string>;

bool parse_list(const std::string& text, std::vector<Element>& out, bool& nested, std::string& why) {
  out.clear();
  nested = false;
  const std::string s = trim(text);
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') {
    why = "expected a bracketed list";
    return false;
  }
  std::size_t i = 1;
  const std::size_t end = s.size() - 1;
  auto skip = [&] {
    while (i < end && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  };
  auto scalar = [&](std::string& tok) {
    const std::size_t start = i;
    while (i < end && s[i] != ',' && s[i] != '[' && s[i] != ']') ++i;
    tok = trim(s.substr(start, i - start));
    return !tok.empty();
  };
  skip();
  if (i == end) return true;
  while (true) {
    skip();
    Element el;
    if (s[i] == '[') {
      nested = true;
      ++i;
      skip();
      while (i < end && s[i] != ']') {
        std::string tok;
        if (!scalar(tok)) {
          why = "empty list element";
          return false;
        }
        el.push_back(tok);
        if (i < end && s[i] == ',') ++i;
        skip();
      }
      if (i >= end) {
        why = "unterminated nested list";
        return false;
      }
      ++i;
    } else {
      std::string tok;
      if (!scalar(tok)) {
        why = "empty list element";
        return false;
      }
      el.push_back(tok);
    }
    out.push_back(std::move(el));
    skip();
    if (i == end) break;
    if (s[i] != ',') {
      why = "expected ',' between list elements";
      return false;
    }
    ++i;
  }
  return true;
}

bool to_double(const std::string& tok, double& v) {
  if (tok.empty()) return false;
  errno = 0;
  char* endp = nullptr;
  v = std::strtod(tok.c_str(), &endp);
  return errno == 0 && endp == tok.c_str() + tok.size();
}

bool to_int(const std::string& tok, int& v) {
  if (tok.empty()) return false;
  errno = 0;
  char* endp = nullptr;
  const long x = std::strtol(tok.c_str(), &endp, 10);
  if (errno != 0 || endp != tok.c_str() + tok.size() || x < -2147483647L || x > 2147483647L) return false;
  v = static_cast<int>(x);
  return true;
}

}  // namespace

ConfigError::ConfigError(const std::string& source, int line, const std::string& message)
    : std::runtime_error(line > 0 ? source + ":" + std::to_string(line) + ": " + message
                                  : source + ": " + message),
      line_(line) {}

Config Config::parse(std::istream& in, const std::string& source) {
  Config cfg;
  cfg.source_ = source;
  std::string section;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    if (text.front() == '[' && text.find('=') == std::string::npos) {
      if (text.back() != ']') throw ConfigError(source, line, "unterminated section header");
      section = trim(text.substr(1, text.size() - 2));
      if (!valid_key(section) || section.find('.') != std::string::npos) {
        throw ConfigError(source, line, "invalid section name '" + section + "'");
      }
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(source, line, "expected 'key = value'");
    std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (!valid_key(key)) throw ConfigError(source, line, "invalid key '" + key + "'");
    if (key.find('.') == std::string::npos) {
      if (section.empty()) {
        throw ConfigError(source, line, "key '" + key + "' needs a section, e.g. section." + key);
      }
      key = section + "." + key;
    }
    if (value.empty()) throw ConfigError(source, line, "missing value for '" + key + "'");
    if (value.front() == '[') {
      std::vector<Element> els;
      bool nested = false;
      std::string why;
      if (!parse_list(value, els, nested, why)) throw ConfigError(source, line, why);
    }
    if (cfg.entries_.count(key)) {
      throw ConfigError(source, line,
                        "duplicate key '" + key + "' (first set on line " +
                            std::to_string(cfg.entries_[key].line) + ")");
    }
    cfg.entries_[key] = Entry{value, line};
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "cannot open configuration file");
  return parse(in, path);
}

void Config::fail(const std::string& key, const std::string& message) const {
  const auto it = entries_.find(key);
  throw ConfigError(source_, it == entries_.end() ? 0 : it->second.line,
                    key + ": " + message);
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  if (it->second.value.front() == '[') fail(key, "expected a scalar, got a list");
  return it->second.value;
}

double Config::get_double(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  double v = 0.0;
  if (!to_double(get_string(key, ""), v)) fail(key, "expected a number");
  return v;
}

int Config::get_int(const std::string& key, int fallback) const {
  if (!has(key)) return fallback;
  int v = 0;
  if (!to_int(get_string(key, ""), v)) fail(key, "expected an integer");
  return v;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get_string(key, "");
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  fail(key, "expected true or false");
}

std::vector<std::string> Config::get_strings(const std::string& key,
                                             const std::vector<std::string>& fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  if (it->second.value.front() != '[') return {it->second.value};
  std::vector<Element> els;
  bool nested = false;
  std::string why;
  if (!parse_list(it->second.value, els, nested, why)) fail(key, why);
  if (nested) fail(key, "expected a flat list");
  std::vector<std::string> out;
  for (auto& e : els) out.push_back(e.front());
  return out;
}

std::vector<double> Config::get_doubles(const std::string& key,
                                        const std::vector<double>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<double> out;
  for (const auto& tok : get_strings(key, {})) {
    double v = 0.0;
    if (!to_double(tok, v)) fail(key, "'" + tok + "' is not a number");
    out.push_back(v);
  }
  return out;
}

std::vector<int> Config::get_ints(const std::string& key, const std::vector<int>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<int> out;
  for (const auto& tok : get_strings(key, {})) {
    int v = 0;
    if (!to_int(tok, v)) fail(key, "'" + tok + "' is not an integer");
    out.push_back(v);
  }
  return out;
}

std::vector<std::vector<double>> Config::get_tuples(const std::string& key, int dim) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return {};
  if (it->second.value.front() != '[') fail(key, "expected a list of points");
  std::vector<Element> els;
  bool nested = false;
  std::string why;
  if (!parse_list(it->second.value, els, nested, why)) fail(key, why);
  std::vector<double> flat;
  for (const auto& e : els) {
    if (nested && static_cast<int>(e.size()) != dim) {
      fail(key, "each point needs " + std::to_string(dim) + " coordinates");
    }
    for (const auto& tok : e) {
      double v = 0.0;
      if (!to_double(tok, v)) fail(key, "'" + tok + "' is not a number");
      flat.push_back(v);
    }
  }
  if (flat.size() % static_cast<std::size_t>(dim) != 0) {
    fail(key, "number of coordinates is not a multiple of " + std::to_string(dim));
  }
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < flat.size(); i += static_cast<std::size_t>(dim)) {
    out.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(i),
                     flat.begin() + static_cast<std::ptrdiff_t>(i) + dim);
  }
  return out;
}

}  // namespace volpot::cli

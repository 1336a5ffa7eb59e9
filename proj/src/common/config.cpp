#include "common/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "common/rng.hpp"

namespace hynoma {

static std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

static std::string dir_of(const std::string& path) {
  std::size_t pos = path.find_last_of('/');
  return pos == std::string::npos ? std::string(".") : path.substr(0, pos);
}

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  Config c;
  c.parse_text(ss.str(), dir_of(path), 0);
  return c;
}

Config Config::from_string(const std::string& text, const std::string& include_dir) {
  Config c;
  c.parse_text(text, include_dir, 0);
  return c;
}

void Config::parse_text(const std::string& text, const std::string& include_dir, int depth) {
  if (depth > 8) throw std::runtime_error("config: include depth exceeded");
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.rfind("include", 0) == 0 && (line.size() == 7 || line[7] == ' ' || line[7] == '\t')) {
      std::string inc = trim(line.substr(7));
      if (inc.empty()) throw std::runtime_error("config: empty include path");
      std::string full = inc[0] == '/' ? inc : include_dir + "/" + inc;
      std::ifstream f(full);
      if (!f) throw std::runtime_error("config: cannot open include " + full);
      std::stringstream ss;
      ss << f.rdbuf();
      parse_text(ss.str(), dir_of(full), depth + 1);
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: line " + std::to_string(lineno) + " has no '='");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw std::runtime_error("config: empty key on line " + std::to_string(lineno));
    values_[key] = value;
  }
}

void Config::set(const std::string& key, const std::string& value) { values_[key] = value; }

bool Config::has(const std::string& key) const { return values_.count(key) != 0; }

std::string Config::get_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw std::runtime_error("config: missing key '" + key + "'");
  return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const {
  std::string v = get_string(key);
  if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
  if (v == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double d = std::stod(v, &used);
  if (used != v.size()) throw std::runtime_error("config: key '" + key + "' is not a number: " + v);
  return d;
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long long Config::get_int(const std::string& key) const {
  std::string v = get_string(key);
  std::size_t used = 0;
  long long i = std::stoll(v, &used);
  if (used != v.size()) throw std::runtime_error("config: key '" + key + "' is not an integer: " + v);
  return i;
}

long long Config::get_int(const std::string& key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  std::string v = get_string(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::runtime_error("config: key '" + key + "' is not a boolean: " + v);
}

std::vector<std::string> Config::keys() const {
  std::vector<std::string> out;
  out.reserve(values_.size());
  for (const auto& kv : values_) out.push_back(kv.first);
  return out;
}

std::string Config::canonical_string() const {
  std::string out;
  for (const auto& kv : values_) {
    out += kv.first;
    out += " = ";
    out += kv.second;
    out += '\n';
  }
  return out;
}

std::string Config::hash_hex() const {
  std::string canon = canonical_string();
  std::uint64_t h = fnv1a(canon.data(), canon.size());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

} // namespace hynoma

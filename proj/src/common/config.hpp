#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hynoma {

// Flat key = value configuration with `include <path>` support.
//
//   # scenario preset
//   include base.cfg
//   rings = 1
//   ho_margin_db = 3.0
//
// Later assignments win, so an including file overrides what it included.
// Doubles accept `inf` for unbounded margins. The canonical string (sorted
// key=value lines) feeds the provenance hash stamped into every output file.
class Config {
public:
  Config() = default;

  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text, const std::string& include_dir = ".");

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  std::vector<std::string> keys() const;

  // sorted "key = value" lines; stable across runs
  std::string canonical_string() const;
  // 16 hex digits of FNV-1a over the canonical string
  std::string hash_hex() const;

private:
  void parse_text(const std::string& text, const std::string& include_dir, int depth);
  std::map<std::string, std::string> values_;
};

} // namespace hynoma

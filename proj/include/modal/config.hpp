#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace modal {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

std::uint64_t fnv1a64(const std::string& text);

// Flat key-value configuration. Sections group keys: a key `lr` under
// `[train]` is addressed as `train.lr`. Overrides use the same dotted form.
class Config {
 public:
  static Config parse_text(const std::string& text);
  static Config parse_file(const std::string& path);

  void apply_override(const std::string& assignment);  // "section.key=value"
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<int> get_int_list(const std::string& key,
                                const std::vector<int>& fallback) const;
  std::vector<long> get_long_list(const std::string& key,
                                  const std::vector<long>& fallback) const;
  std::vector<std::string> get_string_list(
      const std::string& key, const std::vector<std::string>& fallback) const;

  // Sorted key=value lines; the basis for the config hash.
  std::string canonical_text() const;
  std::uint64_t hash() const { return fnv1a64(canonical_text()); }
  std::string hash_hex() const;

 private:
  std::map<std::string, std::string> kv_;
};

}  // namespace modal

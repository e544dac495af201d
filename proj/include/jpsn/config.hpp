#ifndef JPSN_CONFIG_HPP
#define JPSN_CONFIG_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace jpsn {

/// Flat key-value configuration: one `key = value` per line, `#` comments.
/// Every key read is tracked; finish() rejects unknown keys so typos fail
/// loudly instead of silently using a default.
class KeyValueConfig {
 public:
  static KeyValueConfig from_file(const std::string& path);
  static KeyValueConfig from_string(const std::string& text,
                                    const std::string& label = "<string>");

  bool has(const std::string& key) const;

  std::string get_string(const std::string& key);
  std::string get_string(const std::string& key, const std::string& fallback);
  double get_double(const std::string& key);
  double get_double(const std::string& key, double fallback);
  std::int64_t get_int(const std::string& key);
  std::int64_t get_int(const std::string& key, std::int64_t fallback);
  std::vector<double> get_doubles(const std::string& key);  // space-separated
  std::vector<double> get_doubles(const std::string& key,
                                  const std::vector<double>& fallback);

  /// Throws listing any key that was never requested.
  void finish() const;

  /// Canonical text of the parsed config (sorted keys), used for hashing.
  std::string canonical() const;

 private:
  std::string label_;
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> seen_;
};

/// FNV-1a hash of a string, for config fingerprints in manifests.
std::uint64_t fnv1a(const std::string& text);

}  // namespace jpsn

#endif  // JPSN_CONFIG_HPP

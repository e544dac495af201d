#include "jpsn/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace jpsn {

namespace {
std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}
}  // namespace

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str(), path);
}

KeyValueConfig KeyValueConfig::from_string(const std::string& text,
                                           const std::string& label) {
  KeyValueConfig cfg;
  cfg.label_ = label;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(label + ":" + std::to_string(line_no) +
                                  ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument(label + ":" + std::to_string(line_no) +
                                  ": empty key");
    if (!cfg.values_.emplace(key, value).second)
      throw std::invalid_argument(label + ":" + std::to_string(line_no) +
                                  ": duplicate key '" + key + "'");
  }
  return cfg;
}

bool KeyValueConfig::has(const std::string& key) const {
  if (values_.count(key)) {
    seen_.insert(key);
    return true;
  }
  return false;
}

std::string KeyValueConfig::get_string(const std::string& key) {
  auto it = values_.find(key);
  if (it == values_.end())
    throw std::invalid_argument(label_ + ": missing required key '" + key + "'");
  seen_.insert(key);
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) {
  seen_.insert(key);
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key) {
  const std::string s = get_string(key);
  try {
    std::size_t used;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing chars");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(label_ + ": key '" + key +
                                "': cannot parse number '" + s + "'");
  }
}

double KeyValueConfig::get_double(const std::string& key, double fallback) {
  seen_.insert(key);
  return values_.count(key) ? get_double(key) : fallback;
}

std::int64_t KeyValueConfig::get_int(const std::string& key) {
  const std::string s = get_string(key);
  try {
    std::size_t used;
    auto v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing chars");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(label_ + ": key '" + key +
                                "': cannot parse integer '" + s + "'");
  }
}

std::int64_t KeyValueConfig::get_int(const std::string& key,
                                     std::int64_t fallback) {
  seen_.insert(key);
  return values_.count(key) ? get_int(key) : fallback;
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key) {
  std::istringstream in(get_string(key));
  std::vector<double> out;
  double v;
  while (in >> v) out.push_back(v);
  if (!in.eof())
    throw std::invalid_argument(label_ + ": key '" + key +
                                "': expected space-separated numbers");
  return out;
}

std::vector<double> KeyValueConfig::get_doubles(
    const std::string& key, const std::vector<double>& fallback) {
  seen_.insert(key);
  return values_.count(key) ? get_doubles(key) : fallback;
}

void KeyValueConfig::finish() const {
  std::string unknown;
  for (const auto& [key, value] : values_) {
    if (!seen_.count(key)) unknown += (unknown.empty() ? "" : ", ") + key;
  }
  if (!unknown.empty())
    throw std::invalid_argument(label_ + ": unknown keys: " + unknown);
}

std::string KeyValueConfig::canonical() const {
  std::string out;
  for (const auto& [key, value] : values_) out += key + " = " + value + "\n";
  return out;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace jpsn

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ffseq/errors.hpp"

namespace ffseq {

// Flat "section.key = value" configuration text. '#' starts a comment, blank
// lines are ignored, duplicate keys are rejected.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  std::string get_string_or(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int_or(const std::string& key, long long fallback) const;
  bool get_bool_or(const std::string& key, bool fallback) const;
  std::uint64_t get_seed(const std::string& key) const;  // required, no default
  std::vector<double> get_double_list(const std::string& key) const;
  std::vector<std::string> get_string_list(const std::string& key) const;

  int line_of(const std::string& key) const;
  const std::string& text() const { return text_; }
  const std::string& origin() const { return origin_; }

  // CLI override, replaces or adds a key
  void set(const std::string& key, const std::string& value);

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::map<std::string, Entry> entries_;
  std::string text_;
  std::string origin_;
};

// FNV-1a 64-bit, used to fingerprint config text in run manifests.
std::uint64_t fnv1a64(const std::string& data);

}  // namespace ffseq

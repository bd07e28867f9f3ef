#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace lipstream {

// Flat dotted-key config ("vad.silence_ms = 500"). '#' starts a comment.
// Unset keys fall back to the caller's default, so an empty file reproduces
// the built-in configuration.
class Config {
 public:
  Config() = default;

  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  bool has(const std::string& key) const;
  void set(const std::string& key, const std::string& value);

  std::string get_str(const std::string& key, const std::string& dflt) const;
  std::int64_t get_int(const std::string& key, std::int64_t dflt) const;
  double get_double(const std::string& key, double dflt) const;
  bool get_bool(const std::string& key, bool dflt) const;

  // Stable digest of the normalized key/value set, for run manifests.
  std::uint64_t fingerprint() const;

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

}  // namespace lipstream

#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "itex/linear_denoiser.hpp"
#include "itex/metrics.hpp"
#include "itex/quilting.hpp"
#include "itex/sampler.hpp"

namespace itex {

inline constexpr std::string_view kVersion = "0.1.0";

/// Validation failure in configuration input; maps to the usage exit code.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ValueKind { kInt, kUInt64, kDouble, kBool, kChoice };

struct KeySpec {
  std::string_view key;
  ValueKind kind;
  std::string_view default_value;
  double min_value = 0.0;  // inclusive, numeric kinds
  std::vector<std::string_view> choices;
  std::string_view help;
};

/// Closed schema of every configuration key, in canonical order.
const std::vector<KeySpec>& config_schema();

/// Flat `key = value` configuration. Every key in the schema is always
/// present (defaults fill the gaps); unknown keys and malformed values are
/// rejected with ConfigError.
class RunConfig {
 public:
  RunConfig();

  void set(std::string_view key, std::string_view value);
  /// Applies "key=value".
  void set_assignment(std::string_view assignment);

  /// Parses config text: one `key = value` per line, `#` starts a comment.
  static RunConfig parse(std::string_view text);
  static RunConfig load(const std::string& path);
  /// Overlays the entries of `text` onto this config.
  void merge_text(std::string_view text);

  /// Canonical text, schema order, parseable by parse().
  std::string serialize() const;
  /// FNV-1a 64 of serialize().
  std::uint64_t hash() const;

  const std::string& raw(std::string_view key) const;
  int get_int(std::string_view key) const;
  std::uint64_t get_u64(std::string_view key) const;
  double get_double(std::string_view key) const;
  bool get_bool(std::string_view key) const;
  const std::string& get_string(std::string_view key) const { return raw(key); }

  SamplerConfig sampler() const;
  TrainConfig train() const;
  QuiltConfig quilt() const;
  MetricsOptions metrics(int image_width) const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

 private:
  std::map<std::string, std::string, std::less<>> values_;
};

}  // namespace itex

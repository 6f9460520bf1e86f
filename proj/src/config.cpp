#include "itex/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace itex {

const std::vector<KeySpec>& config_schema() {
  static const std::vector<KeySpec> schema = {
      {"seed", ValueKind::kUInt64, "0", 0, {}, "root seed for every random stream"},
      {"threads", ValueKind::kInt, "1", 1, {}, "worker threads for crop denoising"},
      {"steps", ValueKind::kInt, "50", 2, {}, "DDIM schedule length"},
      {"out_height", ValueKind::kInt, "256", 1, {}, "synthesized height"},
      {"out_width", ValueKind::kInt, "256", 1, {}, "synthesized width"},
      {"crop_size", ValueKind::kInt, "64", 1, {}, "crop side length"},
      {"crops_per_step", ValueKind::kInt, "0", 0, {}, "crops per step (0: mean coverage 10)"},
      {"crop_mode", ValueKind::kChoice, "hybrid", 0, {"hybrid", "random", "grid", "dense"}, "crop planning mode"},
      {"batch_size", ValueKind::kInt, "32", 1, {}, "crops held in memory at once"},
      {"fixed_crops", ValueKind::kBool, "false", 0, {}, "reuse one crop plan for all steps"},
      {"averaging", ValueKind::kChoice, "signal", 0, {"signal", "noise"}, "average x0 or noise estimates"},
      {"backend", ValueKind::kChoice, "gaussian", 0, {"gaussian", "patchbank", "linear"}, "denoiser backend"},
      {"gf_size", ValueKind::kInt, "0", 0, {}, "gaussian: spectrum side at fit time (0: reference size)"},
      {"patch_size", ValueKind::kInt, "8", 1, {}, "patchbank: patch side"},
      {"patch_stride", ValueKind::kInt, "2", 1, {}, "patchbank: stride between bank patches"},
      {"subwindow_stride", ValueKind::kInt, "4", 1, {}, "patchbank: stride between denoised sub-windows"},
      {"kernel_size", ValueKind::kInt, "5", 1, {}, "linear: convolution kernel side (odd)"},
      {"time_bins", ValueKind::kInt, "8", 1, {}, "linear: number of time bins"},
      {"iterations", ValueKind::kInt, "1000", 0, {}, "linear: SGD iterations"},
      {"learning_rate", ValueKind::kDouble, "0.005", 0, {}, "linear: SGD step size"},
      {"train_batch", ValueKind::kInt, "1", 1, {}, "linear: crops per SGD step"},
      {"train_crop", ValueKind::kInt, "64", 1, {}, "linear: training crop side"},
      {"block_size", ValueKind::kInt, "64", 2, {}, "quilt: block side"},
      {"overlap", ValueKind::kInt, "8", 1, {}, "quilt: overlap width"},
      {"grid_n", ValueKind::kInt, "5", 1, {}, "quilt: blocks per side"},
      {"tolerance", ValueKind::kDouble, "0.1", 0, {}, "quilt: candidate tolerance over the best match"},
      {"bands", ValueKind::kInt, "8", 2, {}, "evaluate: radial spectrum bands"},
      {"gram_seed", ValueKind::kUInt64, "0", 0, {}, "evaluate: random filter bank seed"},
      {"seam_period", ValueKind::kInt, "64", 0, {}, "evaluate: seam columns at multiples of this (0: none)"},
      {"nn_patch", ValueKind::kInt, "8", 1, {}, "evaluate: patch side for nearest-neighbour stats"},
      {"nn_samples", ValueKind::kInt, "256", 1, {}, "evaluate: sampled output patches"},
  };
  return schema;
}

namespace {

const KeySpec& spec_for(std::string_view key) {
  const auto& schema = config_schema();
  auto it = std::find_if(schema.begin(), schema.end(), [&](const KeySpec& s) { return s.key == key; });
  if (it == schema.end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
  return *it;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_double(std::string_view s, double& out) {
  // from_chars for double needs GCC 11+; istringstream keeps this portable.
  std::istringstream in{std::string(s)};
  in >> out;
  return !in.fail() && in.eof() && std::isfinite(out);
}

std::string normalize(const KeySpec& spec, std::string_view value) {
  const std::string where = "config key '" + std::string(spec.key) + "'";
  switch (spec.kind) {
    case ValueKind::kInt: {
      long long v = 0;
      if (!parse_number(value, v) || v > 1'000'000'000LL)
        throw ConfigError(where + ": expected an integer, got '" + std::string(value) + "'");
      if (static_cast<double>(v) < spec.min_value)
        throw ConfigError(where + ": must be >= " + std::to_string(static_cast<long long>(spec.min_value)));
      return std::to_string(v);
    }
    case ValueKind::kUInt64: {
      std::uint64_t v = 0;
      if (!parse_number(value, v))
        throw ConfigError(where + ": expected an unsigned integer, got '" + std::string(value) + "'");
      return std::to_string(v);
    }
    case ValueKind::kDouble: {
      double v = 0;
      if (!parse_double(value, v)) throw ConfigError(where + ": expected a number, got '" + std::string(value) + "'");
      if (v < spec.min_value) throw ConfigError(where + ": must be >= " + std::to_string(spec.min_value));
      std::ostringstream os;
      os.precision(17);
      os << v;
      return os.str();
    }
    case ValueKind::kBool: {
      if (value == "true" || value == "1" || value == "yes" || value == "on") return "true";
      if (value == "false" || value == "0" || value == "no" || value == "off") return "false";
      throw ConfigError(where + ": expected true or false, got '" + std::string(value) + "'");
    }
    case ValueKind::kChoice: {
      if (std::find(spec.choices.begin(), spec.choices.end(), value) == spec.choices.end()) {
        std::string opts;
        for (auto c : spec.choices) opts += (opts.empty() ? "" : ", ") + std::string(c);
        throw ConfigError(where + ": '" + std::string(value) + "' is not one of " + opts);
      }
      return std::string(value);
    }
  }
  return std::string(value);
}

}  // namespace

RunConfig::RunConfig() {
  for (const KeySpec& s : config_schema()) values_.emplace(std::string(s.key), normalize(s, s.default_value));
}

void RunConfig::set(std::string_view key, std::string_view value) {
  const KeySpec& spec = spec_for(trim(key));
  values_[std::string(spec.key)] = normalize(spec, trim(value));
}

void RunConfig::set_assignment(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
  set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

void RunConfig::merge_text(std::string_view text) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    try {
      set_assignment(line);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

RunConfig RunConfig::parse(std::string_view text) {
  RunConfig cfg;
  cfg.merge_text(text);
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string RunConfig::serialize() const {
  std::string out;
  for (const KeySpec& s : config_schema()) {
    out += s.key;
    out += " = ";
    out += raw(s.key);
    out += '\n';
  }
  return out;
}

std::uint64_t RunConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

const std::string& RunConfig::raw(std::string_view key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
  return it->second;
}

int RunConfig::get_int(std::string_view key) const { return std::stoi(raw(key)); }
std::uint64_t RunConfig::get_u64(std::string_view key) const { return std::stoull(raw(key)); }
double RunConfig::get_double(std::string_view key) const { return std::stod(raw(key)); }
bool RunConfig::get_bool(std::string_view key) const { return raw(key) == "true"; }

SamplerConfig RunConfig::sampler() const {
  SamplerConfig s;
  s.out_height = get_int("out_height");
  s.out_width = get_int("out_width");
  s.steps = get_int("steps");
  s.crop_size = get_int("crop_size");
  s.crops_per_step = get_int("crops_per_step");
  s.crop_mode = parse_crop_mode(raw("crop_mode"));
  s.seed = get_u64("seed");
  s.batch_size = get_int("batch_size");
  s.threads = get_int("threads");
  s.fixed_crops = get_bool("fixed_crops");
  s.averaging = raw("averaging") == "noise" ? Averaging::kNoise : Averaging::kSignal;
  return s;
}

TrainConfig RunConfig::train() const {
  TrainConfig t;
  t.iterations = get_int("iterations");
  t.learning_rate = get_double("learning_rate");
  t.batch = get_int("train_batch");
  t.crop_size = get_int("train_crop");
  t.kernel_size = get_int("kernel_size");
  t.bins = get_int("time_bins");
  return t;
}

QuiltConfig RunConfig::quilt() const {
  QuiltConfig q;
  q.block_size = get_int("block_size");
  q.overlap = get_int("overlap");
  q.grid_n = get_int("grid_n");
  q.tolerance = get_double("tolerance");
  q.seed = get_u64("seed");
  return q;
}

MetricsOptions RunConfig::metrics(int image_width) const {
  MetricsOptions m;
  m.bands = get_int("bands");
  m.gram_seed = get_u64("gram_seed");
  m.nn_patch = get_int("nn_patch");
  m.nn_samples = get_int("nn_samples");
  m.seed = get_u64("seed");
  const int period = get_int("seam_period");
  if (period > 0)
    for (int c = period; c < image_width; c += period) m.seam_columns.push_back(c);
  return m;
}

}  // namespace itex

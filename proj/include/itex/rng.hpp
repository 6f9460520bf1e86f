#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace itex {

/// splitmix64 finalizer (Steele, Lea, Flood 2014):
///   z += 0x9e3779b97f4a7c15
///   z  = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
///   z  = (z ^ (z >> 27)) * 0x94d049bb133111eb
///   z ^= z >> 31
std::uint64_t splitmix64(std::uint64_t z) noexcept;

/// PCG32 (XSH-RR output, 64-bit LCG state).
///
/// State transition: state = state * 6364136223846793005 + inc, with
/// inc = (stream_id << 1) | 1. Seeding follows the reference pcg32_srandom_r:
/// state = 0, step, state += seed, step.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

  std::uint32_t next_u32() noexcept;

  /// Uniform in the open interval (0, 1); consumes one 32-bit draw.
  double uniform() noexcept;

  /// Uniform integer in [0, bound) via Lemire's multiply-shift with rejection.
  std::uint32_t below(std::uint32_t bound) noexcept;

  std::uint64_t state() const noexcept { return state_; }
  std::uint64_t increment() const noexcept { return inc_; }

  friend bool operator==(const RngStream&, const RngStream&) = default;

 private:
  std::uint64_t state_ = 0;
  std::uint64_t inc_ = 1;
};

/// Fixed purpose tags used as the first label of derived streams.
enum class StreamPurpose : std::uint64_t {
  kInitNoise = 0x494e4954,  // "INIT"
  kCrops = 0x43524f50,      // "CROP"
  kTrain = 0x5452414e,      // "TRAN"
  kQuilt = 0x5155494c,      // "QUIL"
  kMetrics = 0x4d455452,    // "METR"
};

constexpr std::uint64_t tag(StreamPurpose p) noexcept { return static_cast<std::uint64_t>(p); }

/// Hash chain: acc = splitmix64(root_seed); for each label l:
/// acc = splitmix64(acc ^ splitmix64(l)). The stream is seeded with acc and
/// its stream id is splitmix64(acc ^ 0x5851f42d4c957f2d).
RngStream derive_stream(std::uint64_t root_seed, std::span<const std::uint64_t> labels);
RngStream derive_stream(std::uint64_t root_seed, std::initializer_list<std::uint64_t> labels);

/// n standard normals via Box-Muller; consumes ceil(n/2)*2 uniforms and
/// drops the trailing variate when n is odd.
std::vector<float> gaussian(RngStream& stream, std::size_t n);

}  // namespace itex

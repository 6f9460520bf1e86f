#include "itex/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace itex {

std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {
constexpr std::uint64_t kPcgMultiplier = 6364136223846793005ULL;
constexpr std::uint64_t kStreamSalt = 0x5851f42d4c957f2dULL;
}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
    : state_(0), inc_((stream_id << 1u) | 1u) {
  next_u32();
  state_ += seed;
  next_u32();
}

std::uint32_t RngStream::next_u32() noexcept {
  const std::uint64_t old = state_;
  state_ = old * kPcgMultiplier + inc_;
  const auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
  const auto rot = static_cast<std::uint32_t>(old >> 59u);
  return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
}

double RngStream::uniform() noexcept {
  return (static_cast<double>(next_u32()) + 0.5) * 0x1.0p-32;
}

std::uint32_t RngStream::below(std::uint32_t bound) noexcept {
  if (bound <= 1) return 0;
  std::uint64_t m = static_cast<std::uint64_t>(next_u32()) * bound;
  auto low = static_cast<std::uint32_t>(m);
  if (low < bound) {
    const std::uint32_t threshold = (0u - bound) % bound;
    while (low < threshold) {
      m = static_cast<std::uint64_t>(next_u32()) * bound;
      low = static_cast<std::uint32_t>(m);
    }
  }
  return static_cast<std::uint32_t>(m >> 32u);
}

RngStream derive_stream(std::uint64_t root_seed, std::span<const std::uint64_t> labels) {
  if (labels.empty()) throw std::invalid_argument("derive_stream: labels must be non-empty");
  std::uint64_t acc = splitmix64(root_seed);
  for (std::uint64_t label : labels) acc = splitmix64(acc ^ splitmix64(label));
  return RngStream(acc, splitmix64(acc ^ kStreamSalt));
}

RngStream derive_stream(std::uint64_t root_seed, std::initializer_list<std::uint64_t> labels) {
  return derive_stream(root_seed, std::span<const std::uint64_t>(labels.begin(), labels.size()));
}

std::vector<float> gaussian(RngStream& stream, std::size_t n) {
  std::vector<float> out(n);
  for (std::size_t i = 0; i < n; i += 2) {
    const double u1 = stream.uniform();
    const double u2 = stream.uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    out[i] = static_cast<float>(r * std::cos(theta));
    if (i + 1 < n) out[i + 1] = static_cast<float>(r * std::sin(theta));
  }
  return out;
}

}  // namespace itex

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "itex/image.hpp"

namespace itex {

/// 8-bit code for a canvas value: round((v + 1) * 127.5), clamped to [0, 255].
std::uint8_t to_pixel_code(float v) noexcept;
float from_pixel_code(std::uint8_t code) noexcept;

/// Grayscale files load as 1 channel, everything else as RGB (alpha dropped).
ImageGrid read_png(const std::string& path);

/// 3-channel grids write 8-bit RGB, 1-channel grids 8-bit grayscale.
void write_png(const std::string& path, const ImageGrid& image);

/// Encoded PNG bytes, for hashing and comparisons.
std::vector<std::uint8_t> encode_png(const ImageGrid& image);

}  // namespace itex

#include "itex/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace itex {

std::uint8_t to_pixel_code(float v) noexcept {
  if (!(v == v)) return 0;
  const double code = std::round((static_cast<double>(v) + 1.0) * 127.5);
  return static_cast<std::uint8_t>(std::clamp(code, 0.0, 255.0));
}

float from_pixel_code(std::uint8_t code) noexcept { return static_cast<float>(code / 127.5 - 1.0); }

ImageGrid read_png(const std::string& path) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.c_str()))
    throw std::runtime_error("cannot read PNG '" + path + "': " + img.message);
  const bool gray = (img.format & PNG_FORMAT_FLAG_COLOR) == 0;
  img.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  const int channels = gray ? 1 : 3;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, buf.data(), 0, nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw std::runtime_error("cannot decode PNG '" + path + "': " + msg);
  }
  ImageGrid out(static_cast<int>(img.height), static_cast<int>(img.width), channels);
  std::transform(buf.begin(), buf.end(), out.data().begin(), from_pixel_code);
  return out;
}

namespace {
std::vector<std::uint8_t> to_codes(const ImageGrid& image) {
  if (image.empty()) throw std::invalid_argument("write_png: empty image");
  std::vector<std::uint8_t> codes(image.size());
  std::transform(image.data().begin(), image.data().end(), codes.begin(), to_pixel_code);
  return codes;
}

png_image describe(const ImageGrid& image) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width());
  img.height = static_cast<png_uint_32>(image.height());
  img.format = image.channels() == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  return img;
}
}  // namespace

std::vector<std::uint8_t> encode_png(const ImageGrid& image) {
  const auto codes = to_codes(image);
  png_image img = describe(image);
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&img, nullptr, &size, 0, codes.data(), 0, nullptr))
    throw std::runtime_error(std::string("PNG encode failed: ") + img.message);
  std::vector<std::uint8_t> bytes(size);
  if (!png_image_write_to_memory(&img, bytes.data(), &size, 0, codes.data(), 0, nullptr))
    throw std::runtime_error(std::string("PNG encode failed: ") + img.message);
  bytes.resize(size);
  return bytes;
}

void write_png(const std::string& path, const ImageGrid& image) {
  const auto bytes = encode_png(image);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace itex

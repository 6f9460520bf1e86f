#include "itex/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace itex {

namespace {
void check_dims(int height, int width, int channels) {
  if (height < 0 || width < 0) throw std::invalid_argument("ImageGrid: negative dimension");
  if (channels != 1 && channels != 3)
    throw std::invalid_argument("ImageGrid: channels must be 1 or 3, got " + std::to_string(channels));
}
}  // namespace

ImageGrid::ImageGrid(int height, int width, int channels, float fill)
    : height_(height), width_(width), channels_(channels) {
  check_dims(height, width, channels);
  data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

ImageGrid::ImageGrid(int height, int width, int channels, std::vector<float> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
  check_dims(height, width, channels);
  if (data_.size() != static_cast<std::size_t>(height) * width * channels)
    throw std::invalid_argument("ImageGrid: data size does not match dimensions");
}

bool ImageGrid::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](float v) { return std::isfinite(v); });
}

ImageGrid ImageGrid::channel(int ch) const {
  if (ch < 0 || ch >= channels_) throw std::invalid_argument("ImageGrid::channel: index out of range");
  ImageGrid out(height_, width_, 1);
  for (std::size_t p = 0; p < pixel_count(); ++p) out.data_[p] = data_[p * channels_ + ch];
  return out;
}

void require_same_shape(const ImageGrid& a, const ImageGrid& b, const char* what) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument(std::string(what) + ": shape mismatch (" + std::to_string(a.height()) +
                                "x" + std::to_string(a.width()) + "x" + std::to_string(a.channels()) +
                                " vs " + std::to_string(b.height()) + "x" + std::to_string(b.width()) +
                                "x" + std::to_string(b.channels()) + ")");
  }
}

double max_abs_diff(const ImageGrid& a, const ImageGrid& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(static_cast<double>(a.data()[i]) - b.data()[i]));
  return m;
}

}  // namespace itex

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace itex {

/// Row-major, channel-interleaved float image. Synthesis works in [-1, 1]
/// with 0 as the data mean; values outside that range are allowed in flight.
class ImageGrid {
 public:
  ImageGrid() = default;
  ImageGrid(int height, int width, int channels, float fill = 0.0f);
  ImageGrid(int height, int width, int channels, std::vector<float> data);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  int channels() const noexcept { return channels_; }
  std::size_t size() const noexcept { return data_.size(); }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }
  bool empty() const noexcept { return data_.empty(); }

  std::size_t index(int row, int col, int ch = 0) const noexcept {
    return (static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(col)) *
               static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(ch);
  }
  float& at(int row, int col, int ch = 0) noexcept { return data_[index(row, col, ch)]; }
  float at(int row, int col, int ch = 0) const noexcept { return data_[index(row, col, ch)]; }

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }
  std::vector<float>& storage() noexcept { return data_; }

  bool same_shape(const ImageGrid& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
  }
  bool all_finite() const noexcept;

  /// Single channel copy.
  ImageGrid channel(int ch) const;

  friend bool operator==(const ImageGrid&, const ImageGrid&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

/// Throws std::invalid_argument naming `what` when shapes differ.
void require_same_shape(const ImageGrid& a, const ImageGrid& b, const char* what);

double max_abs_diff(const ImageGrid& a, const ImageGrid& b);

}  // namespace itex

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "itex/image.hpp"
#include "itex/rng.hpp"

namespace itex {

struct CropWindow {
  int row = 0;
  int col = 0;
  int size = 0;

  bool fits(int height, int width) const noexcept {
    return size > 0 && row >= 0 && col >= 0 && row + size <= height && col + size <= width;
  }
  bool contains(int r, int c) const noexcept {
    return r >= row && r < row + size && c >= col && c < col + size;
  }
  friend bool operator==(const CropWindow&, const CropWindow&) = default;
};

struct CanvasShape {
  int height = 0;
  int width = 0;
  int channels = 1;
};

/// hybrid: covering grid plus random windows (default).
/// random: uniform random offsets only; pixels may go uncovered.
/// grid:   covering grid with stride = crop size, last row/col clamped.
/// dense:  fixed overlapping grid with stride = crop size / 16, the
///         fixed-crop baseline.
enum class CropMode { kHybrid, kRandom, kGrid, kDense };

CropMode parse_crop_mode(std::string_view name);
std::string_view to_string(CropMode mode) noexcept;

struct CropPlan {
  int height = 0;
  int width = 0;
  std::vector<CropWindow> windows;
  std::vector<std::uint32_t> coverage;  // height * width, row-major

  std::uint32_t coverage_at(int r, int c) const { return coverage[static_cast<std::size_t>(r) * width + c]; }
  std::uint32_t min_coverage() const;
  double mean_coverage() const;
};

/// Offsets 0, stride, 2*stride, ... with the last window clamped to the
/// boundary so the extent is fully covered. Duplicates are removed.
std::vector<int> covering_offsets(int extent, int size, int stride);

/// Stride used by CropMode::kDense.
int dense_stride(int crop_size) noexcept;

std::size_t grid_window_count(int height, int width, int crop_size, CropMode mode);

CropPlan plan_crops(CanvasShape shape, int crop_size, int n_random, CropMode mode, RngStream& stream);

ImageGrid extract_crop(const ImageGrid& x, const CropWindow& w);

/// Streaming form of the least-squares merge: per-pixel sums in double and
/// coverage counts. Predictions are committed in call order.
class Aggregator {
 public:
  explicit Aggregator(CanvasShape shape);

  void add(const CropWindow& w, const ImageGrid& prediction);
  /// Prediction given as w.size * w.size * channels doubles, HWC.
  void add(const CropWindow& w, std::span<const double> prediction);

  /// Per-pixel mean of committed predictions; uncovered pixels copy `fallback`.
  ImageGrid finish(const ImageGrid& fallback) const;
  /// Same, with a constant value for uncovered pixels.
  ImageGrid finish(float fallback) const;
  /// Per-pixel means in double precision, HWC.
  std::vector<double> finish_values(std::span<const double> fallback) const;

  std::uint32_t count_at(int r, int c) const { return counts_[static_cast<std::size_t>(r) * shape_.width + c]; }
  CanvasShape shape() const noexcept { return shape_; }

 private:
  template <typename Fallback>
  ImageGrid finish_impl(Fallback&& fallback) const;
  template <typename T>
  void add_impl(const CropWindow& w, const T* prediction);

  CanvasShape shape_;
  std::vector<double> sums_;
  std::vector<std::uint32_t> counts_;
};

/// Closed-form minimizer of sum_i ||F_i(x) - P_i||^2: the mean of every
/// prediction covering a pixel, or `fallback` where nothing covers it.
ImageGrid aggregate(std::span<const std::pair<CropWindow, ImageGrid>> predictions, CanvasShape shape,
                    const ImageGrid& fallback);

}  // namespace itex

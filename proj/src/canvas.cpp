#include "itex/canvas.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace itex {

CropMode parse_crop_mode(std::string_view name) {
  if (name == "hybrid") return CropMode::kHybrid;
  if (name == "random") return CropMode::kRandom;
  if (name == "grid") return CropMode::kGrid;
  if (name == "dense") return CropMode::kDense;
  throw std::invalid_argument("unknown crop mode '" + std::string(name) + "'");
}

std::string_view to_string(CropMode mode) noexcept {
  switch (mode) {
    case CropMode::kHybrid: return "hybrid";
    case CropMode::kRandom: return "random";
    case CropMode::kGrid: return "grid";
    case CropMode::kDense: return "dense";
  }
  return "hybrid";
}

std::uint32_t CropPlan::min_coverage() const {
  return coverage.empty() ? 0u : *std::min_element(coverage.begin(), coverage.end());
}

double CropPlan::mean_coverage() const {
  if (coverage.empty()) return 0.0;
  const double total = std::accumulate(coverage.begin(), coverage.end(), 0.0);
  return total / static_cast<double>(coverage.size());
}

std::vector<int> covering_offsets(int extent, int size, int stride) {
  if (size > extent || size <= 0 || stride <= 0) throw std::invalid_argument("covering_offsets: bad geometry");
  std::vector<int> out;
  const int last = extent - size;
  for (int o = 0; o < last; o += stride) out.push_back(o);
  out.push_back(last);
  return out;
}

int dense_stride(int crop_size) noexcept { return std::max(1, crop_size / 16); }

namespace {

int stride_for(CropMode mode, int crop_size) {
  return mode == CropMode::kDense ? dense_stride(crop_size) : crop_size;
}

void check_crop(int height, int width, int crop_size) {
  if (crop_size <= 0 || crop_size > height || crop_size > width) {
    throw std::invalid_argument("crop size " + std::to_string(crop_size) + " does not fit canvas " +
                                std::to_string(height) + "x" + std::to_string(width));
  }
}

}  // namespace

std::size_t grid_window_count(int height, int width, int crop_size, CropMode mode) {
  check_crop(height, width, crop_size);
  if (mode == CropMode::kRandom) return 0;
  const int stride = stride_for(mode, crop_size);
  return covering_offsets(height, crop_size, stride).size() * covering_offsets(width, crop_size, stride).size();
}

CropPlan plan_crops(CanvasShape shape, int crop_size, int n_random, CropMode mode, RngStream& stream) {
  check_crop(shape.height, shape.width, crop_size);
  if (n_random < 0) throw std::invalid_argument("plan_crops: negative random crop count");

  CropPlan plan;
  plan.height = shape.height;
  plan.width = shape.width;
  if (mode != CropMode::kRandom) {
    const int stride = stride_for(mode, crop_size);
    const auto rows = covering_offsets(shape.height, crop_size, stride);
    const auto cols = covering_offsets(shape.width, crop_size, stride);
    for (int r : rows)
      for (int c : cols) plan.windows.push_back({r, c, crop_size});
  }
  if (mode == CropMode::kHybrid || mode == CropMode::kRandom) {
    const auto row_choices = static_cast<std::uint32_t>(shape.height - crop_size + 1);
    const auto col_choices = static_cast<std::uint32_t>(shape.width - crop_size + 1);
    for (int i = 0; i < n_random; ++i) {
      const int r = static_cast<int>(stream.below(row_choices));
      const int c = static_cast<int>(stream.below(col_choices));
      plan.windows.push_back({r, c, crop_size});
    }
  }

  plan.coverage.assign(static_cast<std::size_t>(shape.height) * shape.width, 0u);
  for (const CropWindow& w : plan.windows) {
    for (int r = w.row; r < w.row + w.size; ++r) {
      auto* row = plan.coverage.data() + static_cast<std::size_t>(r) * shape.width;
      for (int c = w.col; c < w.col + w.size; ++c) ++row[c];
    }
  }
  return plan;
}

ImageGrid extract_crop(const ImageGrid& x, const CropWindow& w) {
  if (!w.fits(x.height(), x.width())) {
    throw std::invalid_argument("extract_crop: window (" + std::to_string(w.row) + "," + std::to_string(w.col) +
                                "," + std::to_string(w.size) + ") outside " + std::to_string(x.height()) + "x" +
                                std::to_string(x.width()));
  }
  ImageGrid out(w.size, w.size, x.channels());
  const std::size_t row_len = static_cast<std::size_t>(w.size) * x.channels();
  for (int r = 0; r < w.size; ++r) {
    const float* src = x.data().data() + x.index(w.row + r, w.col);
    std::copy(src, src + row_len, out.data().data() + out.index(r, 0));
  }
  return out;
}

Aggregator::Aggregator(CanvasShape shape)
    : shape_(shape),
      sums_(static_cast<std::size_t>(shape.height) * shape.width * shape.channels, 0.0),
      counts_(static_cast<std::size_t>(shape.height) * shape.width, 0u) {}

template <typename T>
void Aggregator::add_impl(const CropWindow& w, const T* prediction) {
  const int ch = shape_.channels;
  const std::size_t row_len = static_cast<std::size_t>(w.size) * ch;
  for (int r = 0; r < w.size; ++r) {
    const std::size_t pix0 = static_cast<std::size_t>(w.row + r) * shape_.width + w.col;
    double* dst = sums_.data() + pix0 * ch;
    const T* src = prediction + static_cast<std::size_t>(r) * row_len;
    for (std::size_t i = 0; i < row_len; ++i) dst[i] += src[i];
    std::uint32_t* cnt = counts_.data() + pix0;
    for (int c = 0; c < w.size; ++c) ++cnt[c];
  }
}

void Aggregator::add(const CropWindow& w, const ImageGrid& prediction) {
  if (!w.fits(shape_.height, shape_.width)) throw std::invalid_argument("aggregate: window outside canvas");
  if (prediction.height() != w.size || prediction.width() != w.size || prediction.channels() != shape_.channels)
    throw std::invalid_argument("aggregate: prediction shape does not match its window");
  add_impl(w, prediction.data().data());
}

void Aggregator::add(const CropWindow& w, std::span<const double> prediction) {
  if (!w.fits(shape_.height, shape_.width)) throw std::invalid_argument("aggregate: window outside canvas");
  if (prediction.size() != static_cast<std::size_t>(w.size) * w.size * shape_.channels)
    throw std::invalid_argument("aggregate: prediction shape does not match its window");
  add_impl(w, prediction.data());
}

template <typename Fallback>
ImageGrid Aggregator::finish_impl(Fallback&& fallback) const {
  ImageGrid out(shape_.height, shape_.width, shape_.channels);
  auto od = out.data();
  const int ch = shape_.channels;
  for (std::size_t p = 0; p < counts_.size(); ++p) {
    const std::uint32_t n = counts_[p];
    for (int c = 0; c < ch; ++c) {
      const std::size_t i = p * ch + c;
      od[i] = n == 0 ? fallback(i) : static_cast<float>(sums_[i] / n);
    }
  }
  return out;
}

ImageGrid Aggregator::finish(const ImageGrid& fallback) const {
  if (fallback.height() != shape_.height || fallback.width() != shape_.width || fallback.channels() != shape_.channels)
    throw std::invalid_argument("aggregate: fallback shape does not match canvas");
  auto fd = fallback.data();
  return finish_impl([fd](std::size_t i) { return fd[i]; });
}

ImageGrid Aggregator::finish(float fallback) const {
  return finish_impl([fallback](std::size_t) { return fallback; });
}

std::vector<double> Aggregator::finish_values(std::span<const double> fallback) const {
  if (fallback.size() != sums_.size()) throw std::invalid_argument("aggregate: fallback shape does not match canvas");
  std::vector<double> out(sums_.size());
  const int ch = shape_.channels;
  for (std::size_t p = 0; p < counts_.size(); ++p) {
    const std::uint32_t n = counts_[p];
    for (int c = 0; c < ch; ++c) {
      const std::size_t i = p * ch + c;
      out[i] = n == 0 ? fallback[i] : sums_[i] / n;
    }
  }
  return out;
}

ImageGrid aggregate(std::span<const std::pair<CropWindow, ImageGrid>> predictions, CanvasShape shape,
                    const ImageGrid& fallback) {
  Aggregator agg(shape);
  for (const auto& [w, p] : predictions) agg.add(w, p);
  return agg.finish(fallback);
}

}  // namespace itex

#pragma once

#include <complex>
#include <span>
#include <vector>

namespace itex {

/// Real 2-D DFT of fixed size backed by FFTW. Plans are cached per size and
/// shared; transforms are safe to run concurrently.
class RealFft2d {
 public:
  RealFft2d(int height, int width);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  /// Columns of the half spectrum, width / 2 + 1.
  int half_width() const noexcept { return width_ / 2 + 1; }

  /// Unnormalized forward transform of a row-major height x width array.
  std::vector<std::complex<double>> forward(std::span<const double> in) const;
  /// Unnormalized inverse; divide by height * width for a round trip.
  std::vector<double> inverse(std::span<const std::complex<double>> in) const;

 private:
  int height_;
  int width_;
  const void* plans_;
};

/// |DFT(x - mean(x))|^2 / N over the full height x width grid, row-major,
/// with frequency (0, 0) at index 0. White noise of variance v has
/// expectation v at every nonzero frequency.
std::vector<double> periodogram(std::span<const double> values, int height, int width);

}  // namespace itex

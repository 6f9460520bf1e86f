#include "itex/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace itex {

namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwDeleter {
  void operator()(void* p) const noexcept { fftw_free(p); }
};
using RealBuffer = std::unique_ptr<double, FftwDeleter>;
using ComplexBuffer = std::unique_ptr<fftw_complex, FftwDeleter>;

RealBuffer alloc_real(std::size_t n) { return RealBuffer(fftw_alloc_real(n)); }
ComplexBuffer alloc_complex(std::size_t n) { return ComplexBuffer(fftw_alloc_complex(n)); }

const PlanPair* plans_for(int height, int width) {
  static std::map<std::pair<int, int>, PlanPair> cache;
  std::lock_guard lock(planner_mutex());
  auto it = cache.find({height, width});
  if (it != cache.end()) return &it->second;
  const std::size_t n_real = static_cast<std::size_t>(height) * width;
  const std::size_t n_cplx = static_cast<std::size_t>(height) * (width / 2 + 1);
  RealBuffer r = alloc_real(n_real);
  ComplexBuffer c = alloc_complex(n_cplx);
  PlanPair p;
  p.forward = fftw_plan_dft_r2c_2d(height, width, r.get(), c.get(), FFTW_ESTIMATE);
  p.inverse = fftw_plan_dft_c2r_2d(height, width, c.get(), r.get(), FFTW_ESTIMATE);
  if (!p.forward || !p.inverse) throw std::runtime_error("fftw: plan creation failed");
  return &cache.emplace(std::make_pair(height, width), p).first->second;
}

}  // namespace

RealFft2d::RealFft2d(int height, int width) : height_(height), width_(width) {
  if (height <= 0 || width <= 0) throw std::invalid_argument("RealFft2d: empty size");
  plans_ = plans_for(height, width);
}

std::vector<std::complex<double>> RealFft2d::forward(std::span<const double> in) const {
  const std::size_t n_real = static_cast<std::size_t>(height_) * width_;
  const std::size_t n_cplx = static_cast<std::size_t>(height_) * half_width();
  if (in.size() != n_real) throw std::invalid_argument("RealFft2d::forward: size mismatch");
  RealBuffer r = alloc_real(n_real);
  ComplexBuffer c = alloc_complex(n_cplx);
  std::memcpy(r.get(), in.data(), n_real * sizeof(double));
  fftw_execute_dft_r2c(static_cast<const PlanPair*>(plans_)->forward, r.get(), c.get());
  std::vector<std::complex<double>> out(n_cplx);
  std::memcpy(static_cast<void*>(out.data()), c.get(), n_cplx * sizeof(fftw_complex));
  return out;
}

std::vector<double> RealFft2d::inverse(std::span<const std::complex<double>> in) const {
  const std::size_t n_real = static_cast<std::size_t>(height_) * width_;
  const std::size_t n_cplx = static_cast<std::size_t>(height_) * half_width();
  if (in.size() != n_cplx) throw std::invalid_argument("RealFft2d::inverse: size mismatch");
  RealBuffer r = alloc_real(n_real);
  ComplexBuffer c = alloc_complex(n_cplx);
  std::memcpy(c.get(), in.data(), n_cplx * sizeof(fftw_complex));
  // c2r destroys its input; the buffer is scratch.
  fftw_execute_dft_c2r(static_cast<const PlanPair*>(plans_)->inverse, c.get(), r.get());
  return std::vector<double>(r.get(), r.get() + n_real);
}

std::vector<double> periodogram(std::span<const double> values, int height, int width) {
  const std::size_t n = static_cast<std::size_t>(height) * width;
  if (values.size() != n) throw std::invalid_argument("periodogram: size mismatch");
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  std::vector<double> centered(values.begin(), values.end());
  for (double& v : centered) v -= mean;
  RealFft2d fft(height, width);
  const auto half = fft.forward(centered);
  const int hw = fft.half_width();
  std::vector<double> power(n);
  for (int ky = 0; ky < height; ++ky) {
    for (int kx = 0; kx < width; ++kx) {
      std::complex<double> v;
      if (kx < hw) {
        v = half[static_cast<std::size_t>(ky) * hw + kx];
      } else {
        const int my = (height - ky) % height;
        v = std::conj(half[static_cast<std::size_t>(my) * hw + (width - kx)]);
      }
      power[static_cast<std::size_t>(ky) * width + kx] = std::norm(v) / static_cast<double>(n);
    }
  }
  return power;
}

}  // namespace itex

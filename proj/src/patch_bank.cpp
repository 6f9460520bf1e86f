#include "itex/patch_bank.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "itex/canvas.hpp"

namespace itex {

void PatchBank::refresh_norms() {
  const std::size_t d = dim();
  const std::size_t n = d == 0 ? 0 : patches.size() / d;
  norms.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    const float* p = patch(i);
    for (std::size_t j = 0; j < d; ++j) s += static_cast<double>(p[j]) * p[j];
    norms[i] = s;
  }
}

std::vector<float> PatchBank::mean_patch() const {
  const std::size_t d = dim();
  std::vector<double> acc(d, 0.0);
  for (std::size_t i = 0; i < count(); ++i) {
    const float* p = patch(i);
    for (std::size_t j = 0; j < d; ++j) acc[j] += p[j];
  }
  std::vector<float> out(d);
  for (std::size_t j = 0; j < d; ++j) out[j] = static_cast<float>(acc[j] / static_cast<double>(count()));
  return out;
}

PatchBank build_patch_bank(const ImageGrid& reference, int patch_size, int stride) {
  if (patch_size <= 0 || patch_size > reference.height() || patch_size > reference.width())
    throw std::invalid_argument("build_patch_bank: patch size " + std::to_string(patch_size) +
                                " does not fit reference");
  if (stride < 1) throw std::invalid_argument("build_patch_bank: stride must be >= 1");

  PatchBank bank;
  bank.patch_size = patch_size;
  bank.stride = stride;
  bank.channels = reference.channels();
  const std::size_t row_len = static_cast<std::size_t>(patch_size) * bank.channels;
  for (int r = 0; r + patch_size <= reference.height(); r += stride) {
    for (int c = 0; c + patch_size <= reference.width(); c += stride) {
      for (int y = 0; y < patch_size; ++y) {
        const float* src = reference.data().data() + reference.index(r + y, c);
        bank.patches.insert(bank.patches.end(), src, src + row_len);
      }
    }
  }
  bank.refresh_norms();
  return bank;
}

void posterior_patch(const PatchBank& bank, const float* z_w, double alpha, double sigma, float* out) {
  const std::size_t d = bank.dim();
  const std::size_t n = bank.count();
  if (n == 1 || alpha == 0.0) {
    // Uniform or single-atom posterior.
    if (n == 1) {
      std::copy(bank.patch(0), bank.patch(0) + d, out);
    } else {
      const auto m = bank.mean_patch();
      std::copy(m.begin(), m.end(), out);
    }
    return;
  }

  std::vector<double> logw(n);
  const double inv_two_var = 1.0 / (2.0 * sigma * sigma);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const float* x = bank.patch(i);
    double dist = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = z_w[j] - alpha * x[j];
      dist += diff * diff;
    }
    logw[i] = -dist * inv_two_var;
    best = std::max(best, logw[i]);
  }
  std::vector<double> acc(d, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = std::exp(logw[i] - best);
    if (w == 0.0) continue;
    total += w;
    const float* x = bank.patch(i);
    for (std::size_t j = 0; j < d; ++j) acc[j] += w * x[j];
  }
  for (std::size_t j = 0; j < d; ++j) out[j] = static_cast<float>(acc[j] / total);
}

ImageGrid mmse_denoise(const PatchBank& bank, const ImageGrid& z_crop, int k, const NoiseSchedule& sched,
                       int subwindow_stride) {
  const int p = bank.patch_size;
  if (bank.count() == 0) throw std::invalid_argument("mmse_denoise: empty patch bank");
  if (z_crop.channels() != bank.channels) throw std::invalid_argument("mmse_denoise: channel mismatch");
  if (z_crop.height() < p || z_crop.width() < p)
    throw std::invalid_argument("mmse_denoise: crop smaller than patch size");
  if (subwindow_stride < 1) throw std::invalid_argument("mmse_denoise: sub-window stride must be >= 1");

  const double alpha = sched.alpha(k);
  const double sigma = sched.sigma(k);
  if (sigma == 0.0) return z_crop;

  const auto rows = covering_offsets(z_crop.height(), p, subwindow_stride);
  const auto cols = covering_offsets(z_crop.width(), p, subwindow_stride);
  Aggregator agg({z_crop.height(), z_crop.width(), z_crop.channels()});
  ImageGrid posterior(p, p, bank.channels);
  for (int r : rows) {
    for (int c : cols) {
      const CropWindow w{r, c, p};
      const ImageGrid z_w = extract_crop(z_crop, w);
      posterior_patch(bank, z_w.data().data(), alpha, sigma, posterior.data().data());
      agg.add(w, posterior);
    }
  }
  return agg.finish(0.0f);
}

PatchMmseDenoiser::PatchMmseDenoiser(PatchBank bank, int subwindow_stride)
    : bank_(std::move(bank)), subwindow_stride_(subwindow_stride) {
  if (bank_.count() == 0) throw std::invalid_argument("PatchMmseDenoiser: empty bank");
  if (subwindow_stride_ < 1) throw std::invalid_argument("PatchMmseDenoiser: sub-window stride must be >= 1");
}

ImageGrid PatchMmseDenoiser::denoise(const ImageGrid& z_crop, int k, const NoiseSchedule& sched) const {
  return mmse_denoise(bank_, z_crop, k, sched, subwindow_stride_);
}

}  // namespace itex

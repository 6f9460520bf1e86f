#pragma once

#include <vector>

#include "itex/denoiser.hpp"

namespace itex {

/// Every stride-spaced p x p patch of a reference, flattened (row-major,
/// channel-interleaved) with cached squared norms.
struct PatchBank {
  int patch_size = 0;
  int stride = 1;
  int channels = 0;
  std::vector<float> patches;  // count() x dim()
  std::vector<double> norms;   // count()

  std::size_t dim() const noexcept {
    return static_cast<std::size_t>(patch_size) * patch_size * channels;
  }
  std::size_t count() const noexcept { return norms.size(); }
  const float* patch(std::size_t i) const noexcept { return patches.data() + i * dim(); }

  /// Recomputes norms from patches.
  void refresh_norms();
  std::vector<float> mean_patch() const;
};

PatchBank build_patch_bank(const ImageGrid& reference, int patch_size, int stride);

/// Exact posterior mean under the empirical patch distribution, per p x p
/// sub-window of the crop (sub-window offsets stride-spaced and clamped to
/// the crop boundary); overlapping sub-window posteriors are averaged.
ImageGrid mmse_denoise(const PatchBank& bank, const ImageGrid& z_crop, int k, const NoiseSchedule& sched,
                       int subwindow_stride);

/// Posterior mean of a single patch observation z_w = alpha x + sigma eps,
/// written into `out` (dim() floats). Weights go through log-sum-exp.
void posterior_patch(const PatchBank& bank, const float* z_w, double alpha, double sigma, float* out);

class PatchMmseDenoiser final : public Denoiser {
 public:
  PatchMmseDenoiser(PatchBank bank, int subwindow_stride);

  ImageGrid denoise(const ImageGrid& z_crop, int k, const NoiseSchedule& sched) const override;
  int receptive_field() const noexcept override { return bank_.patch_size; }
  int channels() const noexcept override { return bank_.channels; }
  int min_crop_size() const noexcept override { return bank_.patch_size; }

  const PatchBank& bank() const noexcept { return bank_; }
  int subwindow_stride() const noexcept { return subwindow_stride_; }

 private:
  PatchBank bank_;
  int subwindow_stride_;
};

}  // namespace itex

#pragma once

#include <vector>

#include "itex/denoiser.hpp"
#include "itex/rng.hpp"

namespace itex {

/// Periodic stationary Gaussian field: per-channel mean plus a per-channel
/// power spectrum on a height x width frequency grid (row-major, DC first),
/// in the same units as periodogram().
struct GaussianFieldModel {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<double> means;                 // channels
  std::vector<std::vector<double>> spectra;  // channels x (height * width)
};

inline constexpr double kSpectrumFloor = 1e-8;

/// Channel means and the floored periodogram of the mean-removed reference.
GaussianFieldModel fit_gaussian_field(const ImageGrid& reference);

/// Re-expresses the model on another periodic grid by carrying the
/// autocovariance over for every lag representable on the new grid, under a
/// Hann lag window (zero lag, and so total variance, untouched). A same-size
/// request returns the model unchanged.
GaussianFieldModel resample_spectrum(const GaussianFieldModel& model, int height, int width);

/// Posterior mean E[x | z] per frequency:
///   x0(f) = mu(f) + alpha S / (alpha^2 S + sigma^2) * (z(f) - alpha mu(f)).
ImageGrid gf_denoise(const GaussianFieldModel& model, const ImageGrid& z_crop, int k, const NoiseSchedule& sched);

/// One exact draw from the model.
ImageGrid gf_sample(const GaussianFieldModel& model, RngStream& stream);

class GaussianFieldDenoiser final : public Denoiser {
 public:
  explicit GaussianFieldDenoiser(GaussianFieldModel model);

  ImageGrid denoise(const ImageGrid& z_crop, int k, const NoiseSchedule& sched) const override;
  int receptive_field() const noexcept override;
  int channels() const noexcept override { return model_.channels; }
  int fixed_crop_size() const noexcept override { return model_.height; }
  int min_crop_size() const noexcept override { return model_.height; }

  const GaussianFieldModel& model() const noexcept { return model_; }

 private:
  GaussianFieldModel model_;
};

}  // namespace itex

#pragma once

#include "itex/image.hpp"
#include "itex/schedule.hpp"

namespace itex {

/// Maps a noisy crop at schedule step k to its clean (x0) prediction.
/// Implementations are immutable after construction and must tolerate
/// concurrent denoise() calls.
class Denoiser {
 public:
  virtual ~Denoiser() = default;

  virtual ImageGrid denoise(const ImageGrid& z_crop, int k, const NoiseSchedule& sched) const = 0;

  /// Radius of spatial dependence in pixels.
  virtual int receptive_field() const noexcept = 0;
  virtual int channels() const noexcept = 0;
  /// Crop side the backend is bound to, or 0 when any size works.
  virtual int fixed_crop_size() const noexcept { return 0; }
  /// Smallest crop side accepted.
  virtual int min_crop_size() const noexcept { return 1; }
};

}  // namespace itex

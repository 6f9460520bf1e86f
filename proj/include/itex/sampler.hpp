#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "itex/canvas.hpp"
#include "itex/denoiser.hpp"

namespace itex {

/// Where overlapping crop estimates are averaged before the DDIM update.
/// kSignal averages x0 predictions; kNoise averages the per-crop noise
/// estimates (z_crop - alpha x0_i) / sigma and steps from those.
enum class Averaging { kSignal, kNoise };

inline constexpr double kDefaultMeanCoverage = 10.0;

struct SamplerConfig {
  int out_height = 256;
  int out_width = 256;
  int steps = 50;
  int crop_size = 64;
  /// Total crops per step; 0 selects enough for kDefaultMeanCoverage.
  int crops_per_step = 0;
  CropMode crop_mode = CropMode::kHybrid;
  std::uint64_t seed = 0;
  /// Crops denoised before their predictions are committed.
  int batch_size = 32;
  int threads = 1;
  /// Reuse one crop plan for every step instead of redrawing per step.
  bool fixed_crops = false;
  Averaging averaging = Averaging::kSignal;

  void validate() const;
};

/// ceil(coverage * H * W / crop^2).
int crops_for_coverage(int height, int width, int crop_size, double coverage);

/// Total crops the sampler denoises at one step.
std::size_t crops_per_step(const SamplerConfig& cfg);

/// Number of random windows passed to plan_crops at each step.
int random_crops_per_step(const SamplerConfig& cfg);

/// (T - 1) * crops_per_step(cfg).
std::size_t count_denoiser_calls(const SamplerConfig& cfg);

struct SynthesisResult {
  ImageGrid image;
  std::size_t denoiser_calls = 0;
  std::vector<double> step_seconds;
};

/// Tiled DDIM: at every step, denoise the planned crops of the canvas,
/// merge the predictions by per-pixel averaging (uncovered pixels predict
/// 0), and advance the whole canvas one DDIM step. Returns the final x0
/// prediction. Holds at most batch_size crop predictions at a time.
SynthesisResult synthesize(const SamplerConfig& cfg, const Denoiser& denoiser);

}  // namespace itex

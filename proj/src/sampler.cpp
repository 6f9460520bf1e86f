#include "itex/sampler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>

#include "itex/schedule.hpp"

namespace itex {

void SamplerConfig::validate() const {
  if (steps < 2) throw std::invalid_argument("sampler: steps must be >= 2");
  if (crop_size < 1) throw std::invalid_argument("sampler: crop size must be >= 1");
  if (out_height < crop_size || out_width < crop_size) {
    throw std::invalid_argument("sampler: output " + std::to_string(out_height) + "x" + std::to_string(out_width) +
                                " is smaller than crop size " + std::to_string(crop_size));
  }
  if (crops_per_step < 0) throw std::invalid_argument("sampler: crops_per_step must be >= 0");
  if (batch_size < 1) throw std::invalid_argument("sampler: batch size must be >= 1");
  if (threads < 1) throw std::invalid_argument("sampler: threads must be >= 1");
}

int crops_for_coverage(int height, int width, int crop_size, double coverage) {
  const double area = static_cast<double>(height) * width;
  const double crop_area = static_cast<double>(crop_size) * crop_size;
  return static_cast<int>(std::ceil(coverage * area / crop_area - 1e-9));
}

namespace {
int requested_total(const SamplerConfig& cfg) {
  return cfg.crops_per_step > 0 ? cfg.crops_per_step
                                : crops_for_coverage(cfg.out_height, cfg.out_width, cfg.crop_size, kDefaultMeanCoverage);
}
}  // namespace

int random_crops_per_step(const SamplerConfig& cfg) {
  switch (cfg.crop_mode) {
    case CropMode::kRandom: return requested_total(cfg);
    case CropMode::kHybrid: {
      const auto grid = static_cast<int>(grid_window_count(cfg.out_height, cfg.out_width, cfg.crop_size, cfg.crop_mode));
      return std::max(0, requested_total(cfg) - grid);
    }
    default: return 0;
  }
}

std::size_t crops_per_step(const SamplerConfig& cfg) {
  return grid_window_count(cfg.out_height, cfg.out_width, cfg.crop_size, cfg.crop_mode) +
         static_cast<std::size_t>(random_crops_per_step(cfg));
}

std::size_t count_denoiser_calls(const SamplerConfig& cfg) {
  cfg.validate();
  return static_cast<std::size_t>(cfg.steps - 1) * crops_per_step(cfg);
}

namespace {

// (z_crop - alpha x0) / sigma in double, HWC, written into `out`.
std::span<const double> crop_noise_estimate(const ImageGrid& z, const CropWindow& w, const ImageGrid& x0, double alpha,
                                            double sigma, std::vector<double>& out) {
  const int ch = z.channels();
  out.resize(static_cast<std::size_t>(w.size) * w.size * ch);
  std::size_t i = 0;
  for (int r = 0; r < w.size; ++r)
    for (int c = 0; c < w.size; ++c)
      for (int q = 0; q < ch; ++q, ++i) out[i] = (z.at(w.row + r, w.col + c, q) - alpha * x0.data()[i]) / sigma;
  return out;
}

// Denoises crops [begin, end) of the plan into `out`, spread over threads.
void denoise_batch(const Denoiser& denoiser, const ImageGrid& z, const std::vector<CropWindow>& windows,
                   std::size_t begin, std::size_t end, int k, const NoiseSchedule& sched, int threads,
                   std::vector<ImageGrid>& out) {
  const std::size_t n = end - begin;
  out.resize(n);
  auto work = [&](std::size_t i) {
    const ImageGrid crop = extract_crop(z, windows[begin + i]);
    ImageGrid pred = denoiser.denoise(crop, k, sched);
    if (!pred.same_shape(crop)) throw std::runtime_error("denoiser returned a prediction of the wrong shape");
    out[i] = std::move(pred);
  };
  const auto workers = static_cast<std::size_t>(std::min<std::size_t>(static_cast<std::size_t>(threads), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) work(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += workers) work(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void require_finite(const ImageGrid& g, const char* what, int k, const NoiseSchedule& sched) {
  if (g.all_finite()) return;
  std::ostringstream msg;
  msg << "synthesize: non-finite " << what << " at step " << k << " (t=" << sched.t(k) << ", alpha=" << sched.alpha(k)
      << ", sigma=" << sched.sigma(k) << ")";
  throw std::runtime_error(msg.str());
}

}  // namespace

SynthesisResult synthesize(const SamplerConfig& cfg, const Denoiser& denoiser) {
  cfg.validate();
  if (denoiser.fixed_crop_size() != 0 && denoiser.fixed_crop_size() != cfg.crop_size) {
    throw std::invalid_argument("synthesize: denoiser is bound to crop size " +
                                std::to_string(denoiser.fixed_crop_size()) + ", config asks for " +
                                std::to_string(cfg.crop_size));
  }
  if (cfg.crop_size < denoiser.min_crop_size())
    throw std::invalid_argument("synthesize: crop size below the denoiser minimum " +
                                std::to_string(denoiser.min_crop_size()));

  const NoiseSchedule sched = build_schedule(cfg.steps);
  const CanvasShape shape{cfg.out_height, cfg.out_width, denoiser.channels()};
  const int n_random = random_crops_per_step(cfg);

  RngStream init = derive_stream(cfg.seed, {tag(StreamPurpose::kInitNoise)});
  ImageGrid z(shape.height, shape.width, shape.channels,
              gaussian(init, static_cast<std::size_t>(shape.height) * shape.width * shape.channels));

  SynthesisResult result;
  ImageGrid x0_hat;
  std::vector<ImageGrid> batch;
  for (int k = 0; k + 1 < sched.steps(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    RngStream crop_stream = cfg.fixed_crops ? derive_stream(cfg.seed, {tag(StreamPurpose::kCrops)})
                                            : derive_stream(cfg.seed, {tag(StreamPurpose::kCrops),
                                                                       static_cast<std::uint64_t>(k)});
    const CropPlan plan = plan_crops(shape, cfg.crop_size, n_random, cfg.crop_mode, crop_stream);

    const double alpha = sched.alpha(k);
    const double sigma = sched.sigma(k);
    const bool noise_route = cfg.averaging == Averaging::kNoise && alpha > 0.0;
    Aggregator agg(shape);
    std::vector<double> eps_crop;
    for (std::size_t begin = 0; begin < plan.windows.size(); begin += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(plan.windows.size(), begin + static_cast<std::size_t>(cfg.batch_size));
      denoise_batch(denoiser, z, plan.windows, begin, end, k, sched, cfg.threads, batch);
      for (std::size_t i = 0; i < batch.size(); ++i) {
        const CropWindow& w = plan.windows[begin + i];
        if (noise_route) {
          agg.add(w, crop_noise_estimate(z, w, batch[i], alpha, sigma, eps_crop));
        } else {
          agg.add(w, batch[i]);
        }
      }
      result.denoiser_calls += end - begin;
    }
    batch.clear();

    if (noise_route) {
      // Uncovered pixels carry the noise estimate of a zero prediction, z / sigma.
      std::vector<double> fallback(z.size());
      for (std::size_t i = 0; i < z.size(); ++i) fallback[i] = z.data()[i] / sigma;
      const std::vector<double> eps_bar = agg.finish_values(fallback);
      const double a_next = sched.alpha(k + 1);
      const double s_next = sched.sigma(k + 1);
      x0_hat = ImageGrid(shape.height, shape.width, shape.channels);
      ImageGrid z_next(shape.height, shape.width, shape.channels);
      for (std::size_t i = 0; i < z.size(); ++i) {
        const double e = eps_bar[i];
        const double x = (z.data()[i] - sigma * e) / alpha;
        x0_hat.data()[i] = static_cast<float>(x);
        z_next.data()[i] = s_next == 0.0 ? static_cast<float>(x) : static_cast<float>(a_next * x + s_next * e);
      }
      require_finite(x0_hat, "x0 from noise estimate", k, sched);
      z = std::move(z_next);
    } else {
      x0_hat = agg.finish(0.0f);
      require_finite(x0_hat, "x0 prediction", k, sched);
      z = ddim_step(z, x0_hat, k, sched);
    }
    require_finite(z, "canvas", k, sched);
    result.step_seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  result.image = std::move(x0_hat);
  return result;
}

}  // namespace itex

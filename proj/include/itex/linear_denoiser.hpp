#pragma once

#include <span>
#include <vector>

#include "itex/denoiser.hpp"
#include "itex/rng.hpp"

namespace itex {

/// Per-time-bin same-padded convolution plus bias:
///   x0 = conv(K_b, z) + b_b,   b = bin containing t_k.
/// Weights are laid out [bin][out_ch][in_ch][ky][kx]; biases [bin][out_ch].
struct LinearConvDenoiser {
  int kernel_size = 1;
  int channels = 1;
  int bins = 1;
  std::vector<float> weights;
  std::vector<float> biases;

  std::size_t weights_per_bin() const noexcept {
    return static_cast<std::size_t>(channels) * channels * kernel_size * kernel_size;
  }
  float& weight(int bin, int out_ch, int in_ch, int ky, int kx) noexcept {
    return weights[weight_index(bin, out_ch, in_ch, ky, kx)];
  }
  float weight(int bin, int out_ch, int in_ch, int ky, int kx) const noexcept {
    return weights[weight_index(bin, out_ch, in_ch, ky, kx)];
  }
  std::size_t weight_index(int bin, int out_ch, int in_ch, int ky, int kx) const noexcept {
    return static_cast<std::size_t>(bin) * weights_per_bin() +
           ((static_cast<std::size_t>(out_ch) * channels + in_ch) * kernel_size + ky) * kernel_size + kx;
  }
  float& bias(int bin, int out_ch) noexcept { return biases[static_cast<std::size_t>(bin) * channels + out_ch]; }
  float bias(int bin, int out_ch) const noexcept { return biases[static_cast<std::size_t>(bin) * channels + out_ch]; }

  /// Nearest bin for diffusion time t in [0, 1]: floor(t * bins), clamped.
  int bin_for_time(double t) const noexcept;
  int receptive_field() const noexcept { return (kernel_size - 1) / 2; }
  bool parameters_finite() const noexcept;
};

/// Center tap 1 on matching channels, zero elsewhere, zero bias.
LinearConvDenoiser make_identity_denoiser(int kernel_size, int channels, int bins);

/// Applies bin `bin` to z.
ImageGrid apply_bin(const LinearConvDenoiser& model, int bin, const ImageGrid& z);

ImageGrid lin_denoise(const LinearConvDenoiser& model, const ImageGrid& z_crop, int k, const NoiseSchedule& sched);

struct TrainConfig {
  int iterations = 1000;
  double learning_rate = 0.005;
  int batch = 1;
  int crop_size = 64;
  int kernel_size = 5;
  int bins = 8;
  // w_t is fixed at 1.

  void validate() const;
};

struct BinGradient {
  double loss = 0.0;
  std::vector<double> d_weights;  // weights_per_bin()
  std::vector<double> d_biases;   // channels
};

/// L = mean((apply_bin(z) - x)^2) over every pixel and channel, with its
/// exact gradient for the parameters of `bin`:
///   dL/dK[o][i][dy][dx] = 2/M sum_p r_o(p) z_i(p + d),   dL/db_o = 2/M sum_p r_o(p)
BinGradient loss_and_gradient(const LinearConvDenoiser& model, int bin, const ImageGrid& z, const ImageGrid& x);

/// p -= learning_rate * grad over all bins. A zero rate leaves the model untouched.
void sgd_update(LinearConvDenoiser& model, std::span<const double> d_weights, std::span<const double> d_biases,
                double learning_rate);

struct TrainResult {
  LinearConvDenoiser model;
  std::vector<double> losses;  // per iteration (batch mean)

  /// Mean loss over the first / last `window` iterations.
  double initial_running_loss(std::size_t window = 20) const;
  double final_running_loss(std::size_t window = 20) const;
};

/// Plain SGD on random crops of the reference: draw crop x, step k, noise
/// eps; z = forward_diffuse(x, k, eps); descend the bin of k.
TrainResult train_linear_denoiser(const ImageGrid& reference, const TrainConfig& cfg, const NoiseSchedule& sched,
                                  RngStream& stream);

class LinearDenoiser final : public Denoiser {
 public:
  explicit LinearDenoiser(LinearConvDenoiser model);

  ImageGrid denoise(const ImageGrid& z_crop, int k, const NoiseSchedule& sched) const override;
  int receptive_field() const noexcept override { return model_.receptive_field(); }
  int channels() const noexcept override { return model_.channels; }

  const LinearConvDenoiser& model() const noexcept { return model_; }

 private:
  LinearConvDenoiser model_;
};

}  // namespace itex

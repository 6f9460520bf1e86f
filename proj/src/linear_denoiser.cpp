#include "itex/linear_denoiser.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

#include "itex/canvas.hpp"

namespace itex {

int LinearConvDenoiser::bin_for_time(double t) const noexcept {
  const int b = static_cast<int>(std::floor(t * bins));
  return std::clamp(b, 0, bins - 1);
}

bool LinearConvDenoiser::parameters_finite() const noexcept {
  auto finite = [](float v) { return std::isfinite(v); };
  return std::all_of(weights.begin(), weights.end(), finite) && std::all_of(biases.begin(), biases.end(), finite);
}

LinearConvDenoiser make_identity_denoiser(int kernel_size, int channels, int bins) {
  if (kernel_size < 1 || kernel_size % 2 == 0) throw std::invalid_argument("linear denoiser: kernel size must be odd");
  if (bins < 1) throw std::invalid_argument("linear denoiser: need at least one time bin");
  if (channels != 1 && channels != 3) throw std::invalid_argument("linear denoiser: channels must be 1 or 3");
  LinearConvDenoiser m;
  m.kernel_size = kernel_size;
  m.channels = channels;
  m.bins = bins;
  m.weights.assign(m.weights_per_bin() * bins, 0.0f);
  m.biases.assign(static_cast<std::size_t>(bins) * channels, 0.0f);
  const int center = kernel_size / 2;
  for (int b = 0; b < bins; ++b)
    for (int c = 0; c < channels; ++c) m.weight(b, c, c, center, center) = 1.0f;
  return m;
}

ImageGrid apply_bin(const LinearConvDenoiser& model, int bin, const ImageGrid& z) {
  if (z.channels() != model.channels) throw std::invalid_argument("linear denoiser: channel mismatch");
  const int h = z.height();
  const int w = z.width();
  const int kc = model.kernel_size;
  const int half = kc / 2;
  const int ch = model.channels;
  ImageGrid out(h, w, ch);
  std::vector<double> acc(static_cast<std::size_t>(h) * w);
  for (int o = 0; o < ch; ++o) {
    std::fill(acc.begin(), acc.end(), static_cast<double>(model.bias(bin, o)));
    for (int i = 0; i < ch; ++i) {
      for (int ky = 0; ky < kc; ++ky) {
        const int dy = ky - half;
        const int r0 = std::max(0, -dy);
        const int r1 = std::min(h, h - dy);
        for (int kx = 0; kx < kc; ++kx) {
          const int dx = kx - half;
          const double wgt = model.weight(bin, o, i, ky, kx);
          if (wgt == 0.0) continue;
          const int c0 = std::max(0, -dx);
          const int c1 = std::min(w, w - dx);
          for (int r = r0; r < r1; ++r) {
            double* a = acc.data() + static_cast<std::size_t>(r) * w;
            for (int c = c0; c < c1; ++c) a[c] += wgt * z.at(r + dy, c + dx, i);
          }
        }
      }
    }
    for (std::size_t p = 0; p < acc.size(); ++p) out.data()[p * ch + o] = static_cast<float>(acc[p]);
  }
  return out;
}

ImageGrid lin_denoise(const LinearConvDenoiser& model, const ImageGrid& z_crop, int k, const NoiseSchedule& sched) {
  return apply_bin(model, model.bin_for_time(sched.t(k)), z_crop);
}

void TrainConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("train: iterations must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw std::invalid_argument("train: learning rate must be > 0");
  if (batch < 1) throw std::invalid_argument("train: batch must be >= 1");
  if (crop_size < 1) throw std::invalid_argument("train: crop size must be >= 1");
  if (kernel_size < 1 || kernel_size % 2 == 0) throw std::invalid_argument("train: kernel size must be odd");
  if (bins < 1) throw std::invalid_argument("train: need at least one time bin");
}

BinGradient loss_and_gradient(const LinearConvDenoiser& model, int bin, const ImageGrid& z, const ImageGrid& x) {
  require_same_shape(z, x, "loss_and_gradient");
  const ImageGrid pred = apply_bin(model, bin, z);
  const int h = z.height();
  const int w = z.width();
  const int ch = model.channels;
  const int kc = model.kernel_size;
  const int half = kc / 2;
  const double m = static_cast<double>(z.size());

  std::vector<double> residual(z.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < residual.size(); ++i) {
    residual[i] = static_cast<double>(pred.data()[i]) - x.data()[i];
    loss += residual[i] * residual[i];
  }

  BinGradient g;
  g.loss = loss / m;
  g.d_weights.assign(model.weights_per_bin(), 0.0);
  g.d_biases.assign(static_cast<std::size_t>(ch), 0.0);
  const double scale = 2.0 / m;
  for (int o = 0; o < ch; ++o) {
    double rsum = 0.0;
    for (std::size_t p = 0; p < z.pixel_count(); ++p) rsum += residual[p * ch + o];
    g.d_biases[o] = scale * rsum;
    for (int i = 0; i < ch; ++i) {
      for (int ky = 0; ky < kc; ++ky) {
        const int dy = ky - half;
        for (int kx = 0; kx < kc; ++kx) {
          const int dx = kx - half;
          double s = 0.0;
          for (int r = std::max(0, -dy); r < std::min(h, h - dy); ++r)
            for (int c = std::max(0, -dx); c < std::min(w, w - dx); ++c)
              s += residual[z.index(r, c, o)] * z.at(r + dy, c + dx, i);
          g.d_weights[((static_cast<std::size_t>(o) * ch + i) * kc + ky) * kc + kx] = scale * s;
        }
      }
    }
  }
  return g;
}

void sgd_update(LinearConvDenoiser& model, std::span<const double> d_weights, std::span<const double> d_biases,
                double learning_rate) {
  if (d_weights.size() != model.weights.size() || d_biases.size() != model.biases.size())
    throw std::invalid_argument("sgd_update: gradient size mismatch");
  if (learning_rate == 0.0) return;
  for (std::size_t j = 0; j < d_weights.size(); ++j)
    model.weights[j] = static_cast<float>(model.weights[j] - learning_rate * d_weights[j]);
  for (std::size_t j = 0; j < d_biases.size(); ++j)
    model.biases[j] = static_cast<float>(model.biases[j] - learning_rate * d_biases[j]);
}

namespace {
double mean_of(const std::vector<double>& v, std::size_t begin, std::size_t end) {
  if (begin >= end) return 0.0;
  return std::accumulate(v.begin() + static_cast<std::ptrdiff_t>(begin), v.begin() + static_cast<std::ptrdiff_t>(end),
                         0.0) /
         static_cast<double>(end - begin);
}
}  // namespace

double TrainResult::initial_running_loss(std::size_t window) const {
  return mean_of(losses, 0, std::min(window, losses.size()));
}

double TrainResult::final_running_loss(std::size_t window) const {
  return mean_of(losses, losses.size() - std::min(window, losses.size()), losses.size());
}

TrainResult train_linear_denoiser(const ImageGrid& reference, const TrainConfig& cfg, const NoiseSchedule& sched,
                                  RngStream& stream) {
  cfg.validate();
  if (reference.height() < cfg.crop_size || reference.width() < cfg.crop_size)
    throw std::invalid_argument("train: reference smaller than training crop " + std::to_string(cfg.crop_size));

  TrainResult result{make_identity_denoiser(cfg.kernel_size, reference.channels(), cfg.bins), {}};
  LinearConvDenoiser& model = result.model;
  const std::size_t per_bin = model.weights_per_bin();
  const auto row_choices = static_cast<std::uint32_t>(reference.height() - cfg.crop_size + 1);
  const auto col_choices = static_cast<std::uint32_t>(reference.width() - cfg.crop_size + 1);
  const auto step_choices = static_cast<std::uint32_t>(sched.steps());
  result.losses.reserve(static_cast<std::size_t>(cfg.iterations));

  for (int it = 0; it < cfg.iterations; ++it) {
    // Samples of one batch may land in different bins; gradients are summed per bin.
    std::vector<double> d_weights(per_bin * model.bins, 0.0);
    std::vector<double> d_biases(static_cast<std::size_t>(model.bins) * model.channels, 0.0);
    double batch_loss = 0.0;
    for (int b = 0; b < cfg.batch; ++b) {
      const CropWindow win{static_cast<int>(stream.below(row_choices)), static_cast<int>(stream.below(col_choices)),
                           cfg.crop_size};
      const int k = static_cast<int>(stream.below(step_choices));
      const ImageGrid x = extract_crop(reference, win);
      const ImageGrid eps(x.height(), x.width(), x.channels(), gaussian(stream, x.size()));
      const ImageGrid z = forward_diffuse(x, k, eps, sched);
      const int bin = model.bin_for_time(sched.t(k));
      const BinGradient g = loss_and_gradient(model, bin, z, x);
      if (!std::isfinite(g.loss)) {
        std::ostringstream msg;
        msg << "train: non-finite loss at iteration " << it << " (step " << k << ", t=" << sched.t(k)
            << ", bin " << bin << ", crop " << win.row << "," << win.col << ")";
        throw std::runtime_error(msg.str());
      }
      batch_loss += g.loss;
      for (std::size_t j = 0; j < per_bin; ++j) d_weights[static_cast<std::size_t>(bin) * per_bin + j] += g.d_weights[j];
      for (int o = 0; o < model.channels; ++o)
        d_biases[static_cast<std::size_t>(bin) * model.channels + o] += g.d_biases[o];
    }
    sgd_update(model, d_weights, d_biases, cfg.learning_rate / cfg.batch);
    result.losses.push_back(batch_loss / cfg.batch);
  }
  if (!model.parameters_finite()) throw std::runtime_error("train: parameters diverged to non-finite values");
  return result;
}

LinearDenoiser::LinearDenoiser(LinearConvDenoiser model) : model_(std::move(model)) {
  if (model_.weights.size() != model_.weights_per_bin() * model_.bins ||
      model_.biases.size() != static_cast<std::size_t>(model_.bins) * model_.channels)
    throw std::invalid_argument("LinearDenoiser: parameter sizes do not match header");
}

ImageGrid LinearDenoiser::denoise(const ImageGrid& z_crop, int k, const NoiseSchedule& sched) const {
  return lin_denoise(model_, z_crop, k, sched);
}

}  // namespace itex

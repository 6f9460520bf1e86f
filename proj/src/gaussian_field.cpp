#include "itex/gaussian_field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "itex/fft.hpp"

namespace itex {

namespace {

std::vector<double> channel_values(const ImageGrid& img, int ch) {
  std::vector<double> v(img.pixel_count());
  auto d = img.data();
  for (std::size_t p = 0; p < v.size(); ++p) v[p] = d[p * img.channels() + ch];
  return v;
}

void validate(const GaussianFieldModel& m) {
  if (m.height <= 0 || m.width <= 0 || (m.channels != 1 && m.channels != 3))
    throw std::invalid_argument("gaussian field: bad model dimensions");
  if (m.means.size() != static_cast<std::size_t>(m.channels) || m.spectra.size() != m.means.size())
    throw std::invalid_argument("gaussian field: channel count mismatch");
  for (const auto& s : m.spectra) {
    if (s.size() != static_cast<std::size_t>(m.height) * m.width)
      throw std::invalid_argument("gaussian field: spectrum size mismatch");
    for (double v : s)
      if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("gaussian field: invalid spectrum value");
  }
}

// Signed lag in [-n/2, n/2) for index i of an n-periodic axis.
int signed_lag(int i, int n) { return i < (n + 1) / 2 ? i : i - n; }

// Hann lag window reaching zero just past the largest lag of an n-grid.
double hann_lag(int d, int n) {
  return 0.5 * (1.0 + std::cos(std::numbers::pi * std::abs(d) / (0.5 * n + 1.0)));
}

}  // namespace

GaussianFieldModel fit_gaussian_field(const ImageGrid& reference) {
  if (reference.height() < 16 || reference.width() < 16)
    throw std::invalid_argument("fit_gaussian_field: reference must be at least 16x16");
  GaussianFieldModel m;
  m.height = reference.height();
  m.width = reference.width();
  m.channels = reference.channels();
  for (int ch = 0; ch < m.channels; ++ch) {
    const auto values = channel_values(reference, ch);
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    auto power = periodogram(values, m.height, m.width);
    for (double& p : power) p = std::max(p, kSpectrumFloor);
    m.means.push_back(mean);
    m.spectra.push_back(std::move(power));
  }
  return m;
}

GaussianFieldModel resample_spectrum(const GaussianFieldModel& model, int height, int width) {
  validate(model);
  if (height <= 0 || width <= 0) throw std::invalid_argument("resample_spectrum: empty target");
  if (height == model.height && width == model.width) return model;

  const RealFft2d src_fft(model.height, model.width);
  const RealFft2d dst_fft(height, width);
  const int src_hw = src_fft.half_width();
  const double src_n = static_cast<double>(model.height) * model.width;

  GaussianFieldModel out;
  out.height = height;
  out.width = width;
  out.channels = model.channels;
  out.means = model.means;
  for (const auto& spectrum : model.spectra) {
    std::vector<std::complex<double>> half(static_cast<std::size_t>(model.height) * src_hw);
    for (int ky = 0; ky < model.height; ++ky)
      for (int kx = 0; kx < src_hw; ++kx)
        half[static_cast<std::size_t>(ky) * src_hw + kx] = spectrum[static_cast<std::size_t>(ky) * model.width + kx];
    auto cov = src_fft.inverse(half);
    for (double& c : cov) c /= src_n;

    std::vector<double> lagged(static_cast<std::size_t>(height) * width, 0.0);
    for (int y = 0; y < height; ++y) {
      const int dy = signed_lag(y, height);
      if (2 * std::abs(dy) >= model.height && dy != 0) continue;
      const int sy = (dy + model.height) % model.height;
      for (int x = 0; x < width; ++x) {
        const int dx = signed_lag(x, width);
        if (2 * std::abs(dx) >= model.width && dx != 0) continue;
        const int sx = (dx + model.width) % model.width;
        lagged[static_cast<std::size_t>(y) * width + x] =
            cov[static_cast<std::size_t>(sy) * model.width + sx] * hann_lag(dy, height) * hann_lag(dx, width);
      }
    }
    const auto s_half = dst_fft.forward(lagged);
    const int dst_hw = dst_fft.half_width();
    std::vector<double> s(static_cast<std::size_t>(height) * width);
    for (int ky = 0; ky < height; ++ky) {
      for (int kx = 0; kx < width; ++kx) {
        double v;
        if (kx < dst_hw) {
          v = s_half[static_cast<std::size_t>(ky) * dst_hw + kx].real();
        } else {
          v = s_half[static_cast<std::size_t>((height - ky) % height) * dst_hw + (width - kx)].real();
        }
        s[static_cast<std::size_t>(ky) * width + kx] = std::max(v, kSpectrumFloor);
      }
    }
    out.spectra.push_back(std::move(s));
  }
  return out;
}

ImageGrid gf_denoise(const GaussianFieldModel& model, const ImageGrid& z_crop, int k, const NoiseSchedule& sched) {
  if (z_crop.height() != model.height || z_crop.width() != model.width || z_crop.channels() != model.channels) {
    throw std::invalid_argument("gf_denoise: crop " + std::to_string(z_crop.height()) + "x" +
                                std::to_string(z_crop.width()) + " does not match model " +
                                std::to_string(model.height) + "x" + std::to_string(model.width));
  }
  const double alpha = sched.alpha(k);
  const double sigma = sched.sigma(k);
  if (sigma == 0.0) return z_crop;

  ImageGrid out(model.height, model.width, model.channels);
  const double n = static_cast<double>(model.height) * model.width;
  const int ch_count = model.channels;
  if (alpha == 0.0) {
    for (std::size_t p = 0; p < out.pixel_count(); ++p)
      for (int ch = 0; ch < ch_count; ++ch) out.data()[p * ch_count + ch] = static_cast<float>(model.means[ch]);
    return out;
  }

  const RealFft2d fft(model.height, model.width);
  const int hw = fft.half_width();
  const double a2 = alpha * alpha;
  const double s2 = sigma * sigma;
  for (int ch = 0; ch < ch_count; ++ch) {
    const double mu = model.means[ch];
    auto residual = channel_values(z_crop, ch);
    for (double& v : residual) v -= alpha * mu;
    auto spec = fft.forward(residual);
    const auto& S = model.spectra[ch];
    for (int ky = 0; ky < model.height; ++ky) {
      for (int kx = 0; kx < hw; ++kx) {
        const double s = S[static_cast<std::size_t>(ky) * model.width + kx];
        spec[static_cast<std::size_t>(ky) * hw + kx] *= alpha * s / (a2 * s + s2);
      }
    }
    const auto x = fft.inverse(spec);
    for (std::size_t p = 0; p < x.size(); ++p) out.data()[p * ch_count + ch] = static_cast<float>(mu + x[p] / n);
  }
  return out;
}

ImageGrid gf_sample(const GaussianFieldModel& model, RngStream& stream) {
  validate(model);
  const RealFft2d fft(model.height, model.width);
  const int hw = fft.half_width();
  const double n = static_cast<double>(model.height) * model.width;
  ImageGrid out(model.height, model.width, model.channels);
  for (int ch = 0; ch < model.channels; ++ch) {
    const auto white = gaussian(stream, static_cast<std::size_t>(n));
    std::vector<double> w(white.begin(), white.end());
    auto spec = fft.forward(w);
    const auto& S = model.spectra[ch];
    for (int ky = 0; ky < model.height; ++ky)
      for (int kx = 0; kx < hw; ++kx)
        spec[static_cast<std::size_t>(ky) * hw + kx] *= std::sqrt(S[static_cast<std::size_t>(ky) * model.width + kx]);
    const auto x = fft.inverse(spec);
    for (std::size_t p = 0; p < x.size(); ++p)
      out.data()[p * model.channels + ch] = static_cast<float>(model.means[ch] + x[p] / n);
  }
  return out;
}

GaussianFieldDenoiser::GaussianFieldDenoiser(GaussianFieldModel model) : model_(std::move(model)) {
  validate(model_);
}

ImageGrid GaussianFieldDenoiser::denoise(const ImageGrid& z_crop, int k, const NoiseSchedule& sched) const {
  return gf_denoise(model_, z_crop, k, sched);
}

int GaussianFieldDenoiser::receptive_field() const noexcept { return std::max(model_.height, model_.width) / 2; }

}  // namespace itex

#include "itex/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>

#include "itex/fft.hpp"

namespace itex {

namespace {

constexpr double kLogFloor = 1e-12;
constexpr int kGramFilters = 16;
constexpr int kGramSupport = 5;

int signed_freq(int k, int n) { return k <= n / 2 ? k : k - n; }

void require_channels(const ImageGrid& a, const ImageGrid& b, const char* what) {
  if (a.channels() != b.channels())
    throw std::invalid_argument(std::string(what) + ": channel counts differ (" + std::to_string(a.channels()) +
                                " vs " + std::to_string(b.channels()) + ")");
}

}  // namespace

std::vector<double> radial_band_power(const std::vector<double>& spectrum, int height, int width, int bands) {
  if (bands < 2) throw std::invalid_argument("radial spectrum: need at least 2 bands");
  if (spectrum.size() != static_cast<std::size_t>(height) * width)
    throw std::invalid_argument("radial spectrum: size mismatch");
  std::vector<double> sum(static_cast<std::size_t>(bands), 0.0);
  std::vector<std::size_t> count(static_cast<std::size_t>(bands), 0);
  for (int ky = 0; ky < height; ++ky) {
    const double fy = static_cast<double>(signed_freq(ky, height)) / height;
    for (int kx = 0; kx < width; ++kx) {
      if (ky == 0 && kx == 0) continue;
      const double fx = static_cast<double>(signed_freq(kx, width)) / width;
      const double r = std::sqrt(fy * fy + fx * fx);
      const int b = std::min(bands - 1, static_cast<int>(r / 0.5 * bands));
      sum[static_cast<std::size_t>(b)] += spectrum[static_cast<std::size_t>(ky) * width + kx];
      ++count[static_cast<std::size_t>(b)];
    }
  }
  for (std::size_t b = 0; b < sum.size(); ++b) sum[b] = count[b] ? sum[b] / static_cast<double>(count[b]) : 0.0;
  return sum;
}

std::vector<double> radial_band_power(const ImageGrid& image, int bands) {
  if (image.empty()) throw std::invalid_argument("radial spectrum: empty image");
  std::vector<double> avg(image.pixel_count(), 0.0);
  for (int c = 0; c < image.channels(); ++c) {
    std::vector<double> v(image.pixel_count());
    for (std::size_t p = 0; p < v.size(); ++p) v[p] = image.data()[p * image.channels() + c];
    const auto pw = periodogram(v, image.height(), image.width());
    for (std::size_t p = 0; p < avg.size(); ++p) avg[p] += pw[p] / image.channels();
  }
  return radial_band_power(avg, image.height(), image.width(), bands);
}

double radial_spectrum_distance(const ImageGrid& a, const ImageGrid& b, int bands) {
  require_channels(a, b, "radial_spectrum_distance");
  if (a.height() < 32 || a.width() < 32 || b.height() < 32 || b.width() < 32)
    throw std::invalid_argument("radial_spectrum_distance: images must be at least 32x32");
  const auto pa = radial_band_power(a, bands);
  const auto pb = radial_band_power(b, bands);
  double d = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i)
    d += std::abs(std::log(std::max(pa[i], kLogFloor)) - std::log(std::max(pb[i], kLogFloor)));
  return d / static_cast<double>(pa.size());
}

namespace {

std::vector<double> gram_matrix(const ImageGrid& img, const std::vector<float>& filters) {
  const int ch = img.channels();
  const int out_h = img.height() - kGramSupport + 1;
  const int out_w = img.width() - kGramSupport + 1;
  if (out_h < 1 || out_w < 1) throw std::invalid_argument("gram_distance: image smaller than filter support");
  const std::size_t taps = static_cast<std::size_t>(kGramSupport) * kGramSupport * ch;
  const std::size_t npix = static_cast<std::size_t>(out_h) * out_w;
  std::vector<double> resp(static_cast<std::size_t>(kGramFilters) * npix);
  std::vector<float> window(taps);
  for (int r = 0; r < out_h; ++r) {
    for (int c = 0; c < out_w; ++c) {
      for (int y = 0; y < kGramSupport; ++y) {
        const float* src = img.data().data() + img.index(r + y, c);
        std::copy(src, src + kGramSupport * ch, window.begin() + static_cast<std::ptrdiff_t>(y) * kGramSupport * ch);
      }
      const std::size_t p = static_cast<std::size_t>(r) * out_w + c;
      for (int f = 0; f < kGramFilters; ++f) {
        const float* w = filters.data() + static_cast<std::size_t>(f) * taps;
        double s = 0.0;
        for (std::size_t t = 0; t < taps; ++t) s += static_cast<double>(w[t]) * window[t];
        resp[static_cast<std::size_t>(f) * npix + p] = s;
      }
    }
  }
  std::vector<double> gram(static_cast<std::size_t>(kGramFilters) * kGramFilters);
  for (int i = 0; i < kGramFilters; ++i) {
    for (int j = i; j < kGramFilters; ++j) {
      const double* ri = resp.data() + static_cast<std::size_t>(i) * npix;
      const double* rj = resp.data() + static_cast<std::size_t>(j) * npix;
      double s = 0.0;
      for (std::size_t p = 0; p < npix; ++p) s += ri[p] * rj[p];
      s /= static_cast<double>(npix);
      gram[static_cast<std::size_t>(i) * kGramFilters + j] = s;
      gram[static_cast<std::size_t>(j) * kGramFilters + i] = s;
    }
  }
  return gram;
}

}  // namespace

double gram_distance(const ImageGrid& a, const ImageGrid& b, std::uint64_t filter_seed) {
  require_channels(a, b, "gram_distance");
  RngStream stream = derive_stream(filter_seed, {tag(StreamPurpose::kMetrics), 0x4752414dULL});
  const std::size_t taps = static_cast<std::size_t>(kGramSupport) * kGramSupport * a.channels();
  auto filters = gaussian(stream, taps * kGramFilters);
  const float scale = static_cast<float>(1.0 / std::sqrt(static_cast<double>(taps)));
  for (float& f : filters) f *= scale;
  const auto ga = gram_matrix(a, filters);
  const auto gb = gram_matrix(b, filters);
  double s = 0.0;
  for (std::size_t i = 0; i < ga.size(); ++i) s += (ga[i] - gb[i]) * (ga[i] - gb[i]);
  return std::sqrt(s);
}

double seam_energy_ratio(const ImageGrid& x, const std::vector<int>& boundary_columns) {
  if (x.width() < 2) throw std::invalid_argument("seam_energy_ratio: image must be at least 2 wide");
  if (boundary_columns.empty()) throw std::invalid_argument("seam_energy_ratio: no boundary columns");
  for (int c : boundary_columns)
    if (c < 1 || c >= x.width())
      throw std::invalid_argument("seam_energy_ratio: column " + std::to_string(c) + " out of range");
  auto column_energy = [&](int c) {
    double s = 0.0;
    for (int r = 0; r < x.height(); ++r)
      for (int ch = 0; ch < x.channels(); ++ch) {
        const double d = static_cast<double>(x.at(r, c, ch)) - x.at(r, c - 1, ch);
        s += d * d;
      }
    return s;
  };
  double global = 0.0;
  for (int c = 1; c < x.width(); ++c) global += column_energy(c);
  global /= static_cast<double>(x.width() - 1);
  double listed = 0.0;
  for (int c : boundary_columns) listed += column_energy(c);
  listed /= static_cast<double>(boundary_columns.size());
  if (global == 0.0) return listed == 0.0 ? 1.0 : std::numeric_limits<double>::max();
  return listed / global;
}

PatchStats patch_nn_stats(const ImageGrid& output, const ImageGrid& reference, int patch_size, int samples,
                          RngStream& stream) {
  require_channels(output, reference, "patch_nn_stats");
  const int p = patch_size;
  if (p < 1 || output.height() < p || output.width() < p || reference.height() < p || reference.width() < p)
    throw std::invalid_argument("patch_nn_stats: patch size does not fit both images");
  if (samples < 1) throw std::invalid_argument("patch_nn_stats: need at least one sample");

  const int ch = output.channels();
  const std::size_t row_len = static_cast<std::size_t>(p) * ch;
  const int ref_rows = reference.height() - p + 1;
  const int ref_cols = reference.width() - p + 1;
  std::vector<float> query(row_len * p);
  std::set<int> distinct;
  double total = 0.0;
  for (int s = 0; s < samples; ++s) {
    const int r0 = static_cast<int>(stream.below(static_cast<std::uint32_t>(output.height() - p + 1)));
    const int c0 = static_cast<int>(stream.below(static_cast<std::uint32_t>(output.width() - p + 1)));
    for (int y = 0; y < p; ++y) {
      const float* src = output.data().data() + output.index(r0 + y, c0);
      std::copy(src, src + row_len, query.begin() + static_cast<std::ptrdiff_t>(y * row_len));
    }
    double best = std::numeric_limits<double>::infinity();
    int best_index = 0;
    for (int r = 0; r < ref_rows; ++r) {
      for (int c = 0; c < ref_cols; ++c) {
        double d = 0.0;
        for (int y = 0; y < p && d < best; ++y) {
          const float* ref = reference.data().data() + reference.index(r + y, c);
          const float* q = query.data() + static_cast<std::size_t>(y) * row_len;
          for (std::size_t i = 0; i < row_len; ++i) {
            const double diff = static_cast<double>(q[i]) - ref[i];
            d += diff * diff;
          }
        }
        if (d < best) {
          best = d;
          best_index = r * ref_cols + c;
        }
      }
    }
    total += std::sqrt(best);
    distinct.insert(best_index);
  }
  return {total / samples, static_cast<double>(distinct.size()) / samples};
}

std::vector<std::pair<std::string, double>> MetricsReport::fields() const {
  return {{"spectrum_distance", spectrum_distance},
          {"gram_distance", gram_distance},
          {"seam_energy_ratio", seam_energy_ratio},
          {"patch_nn_mean", patch_nn_mean},
          {"patch_diversity", patch_diversity}};
}

MetricsReport evaluate_metrics(const ImageGrid& output, const ImageGrid& reference, const MetricsOptions& opts) {
  require_channels(output, reference, "evaluate");
  MetricsReport m;
  m.spectrum_distance = radial_spectrum_distance(output, reference, opts.bands);
  m.gram_distance = gram_distance(output, reference, opts.gram_seed);
  m.seam_energy_ratio = opts.seam_columns.empty() ? 1.0 : seam_energy_ratio(output, opts.seam_columns);
  RngStream stream = derive_stream(opts.seed, {tag(StreamPurpose::kMetrics)});
  const PatchStats ps = patch_nn_stats(output, reference, opts.nn_patch, opts.nn_samples, stream);
  m.patch_nn_mean = ps.nn_mean;
  m.patch_diversity = ps.diversity;
  return m;
}

}  // namespace itex

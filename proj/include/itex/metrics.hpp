#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "itex/image.hpp"
#include "itex/rng.hpp"

namespace itex {

/// Radially binned mean periodogram power (channel-averaged, mean removed,
/// DC excluded). Band b holds frequencies with |f| in [b, b+1) * 0.5 / bands
/// cycles per pixel; corner frequencies past 0.5 fold into the last band.
std::vector<double> radial_band_power(const ImageGrid& image, int bands);

/// The same binning applied to a spectrum defined on a height x width grid.
std::vector<double> radial_band_power(const std::vector<double>& spectrum, int height, int width, int bands);

/// Mean over bands of |log Pa - log Pb| for the band powers above.
double radial_spectrum_distance(const ImageGrid& a, const ImageGrid& b, int bands = 8);

/// Frobenius distance between Gram matrices of 16 seeded random 5x5 filter
/// responses (valid convolution, normalized by response pixel count).
double gram_distance(const ImageGrid& a, const ImageGrid& b, std::uint64_t filter_seed = 0);

/// Mean squared horizontal difference x(r, c) - x(r, c - 1) over the listed
/// columns, divided by the same over all columns. 1 when the image has no
/// horizontal variation.
double seam_energy_ratio(const ImageGrid& x, const std::vector<int>& boundary_columns);

struct PatchStats {
  double nn_mean = 0.0;
  double diversity = 0.0;
};

/// For `samples` uniformly drawn p x p output patches: mean L2 distance to
/// the nearest reference patch, and the fraction of distinct nearest
/// reference patches among the samples.
PatchStats patch_nn_stats(const ImageGrid& output, const ImageGrid& reference, int patch_size, int samples,
                          RngStream& stream);

struct MetricsOptions {
  int bands = 8;
  std::uint64_t gram_seed = 0;
  std::vector<int> seam_columns;
  int nn_patch = 8;
  int nn_samples = 256;
  std::uint64_t seed = 0;
};

struct MetricsReport {
  double spectrum_distance = 0.0;
  double gram_distance = 0.0;
  double seam_energy_ratio = 1.0;
  double patch_nn_mean = 0.0;
  double patch_diversity = 0.0;

  /// Ordered (key, value) pairs shared by the text and JSON printers.
  std::vector<std::pair<std::string, double>> fields() const;
};

MetricsReport evaluate_metrics(const ImageGrid& output, const ImageGrid& reference, const MetricsOptions& opts);

}  // namespace itex

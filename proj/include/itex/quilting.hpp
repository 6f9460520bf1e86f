#pragma once

#include <cstdint>
#include <vector>

#include "itex/image.hpp"

namespace itex {

struct QuiltConfig {
  int block_size = 64;
  int overlap = 8;
  int grid_n = 5;
  double tolerance = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
  /// grid_n * block_size - (grid_n - 1) * overlap.
  int output_side() const noexcept { return grid_n * block_size - (grid_n - 1) * overlap; }
};

/// kVertical: a top-to-bottom seam, one column index per row.
/// kHorizontal: a left-to-right seam, one row index per column.
enum class SeamOrientation { kVertical, kHorizontal };

/// Minimal-cost 8-connected monotone path through a single-channel error
/// surface by dynamic programming:
///   E(0, j) = e(0, j),  E(i, j) = e(i, j) + min(E(i-1, j-1), E(i-1, j), E(i-1, j+1))
/// Ties go to the smaller index, both in the DP and in the final argmin.
std::vector<int> min_cut_seam(const ImageGrid& error_surface, SeamOrientation orientation);

/// Sum of surface values along a path produced by min_cut_seam.
double seam_cost(const ImageGrid& error_surface, const std::vector<int>& path, SeamOrientation orientation);

/// Image Quilting in raster order. The first block is drawn uniformly; every
/// later block is drawn uniformly from reference positions whose overlap SSD
/// is within (1 + tolerance) of the best, then stitched along the minimum
/// error boundary cut of its left and/or top overlap.
ImageGrid quilt_synthesize(const ImageGrid& reference, const QuiltConfig& cfg);

/// Same grid of uniformly drawn blocks pasted over each other with no
/// matching and no cut. Baseline for seam measurements.
ImageGrid naive_tile(const ImageGrid& reference, const QuiltConfig& cfg);

}  // namespace itex

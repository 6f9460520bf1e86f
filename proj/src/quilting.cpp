#include "itex/quilting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "itex/rng.hpp"

namespace itex {

void QuiltConfig::validate() const {
  if (block_size < 2) throw std::invalid_argument("quilt: block size must be >= 2");
  if (overlap <= 0 || overlap >= block_size) throw std::invalid_argument("quilt: overlap must satisfy 0 < o < B");
  if (grid_n < 1) throw std::invalid_argument("quilt: grid size must be >= 1");
  if (!(tolerance >= 0.0)) throw std::invalid_argument("quilt: tolerance must be >= 0");
}

std::vector<int> min_cut_seam(const ImageGrid& error_surface, SeamOrientation orientation) {
  if (error_surface.empty()) throw std::invalid_argument("min_cut_seam: empty surface");
  if (error_surface.channels() != 1) throw std::invalid_argument("min_cut_seam: surface must be single-channel");
  const bool vertical = orientation == SeamOrientation::kVertical;
  const int rows = vertical ? error_surface.height() : error_surface.width();
  const int cols = vertical ? error_surface.width() : error_surface.height();
  auto e = [&](int i, int j) -> double { return vertical ? error_surface.at(i, j) : error_surface.at(j, i); };

  std::vector<double> cost(static_cast<std::size_t>(rows) * cols);
  std::vector<int> from(cost.size(), 0);
  for (int j = 0; j < cols; ++j) cost[static_cast<std::size_t>(j)] = e(0, j);
  for (int i = 1; i < rows; ++i) {
    const double* prev = cost.data() + static_cast<std::size_t>(i - 1) * cols;
    for (int j = 0; j < cols; ++j) {
      int best = std::max(0, j - 1);
      for (int jj = best + 1; jj <= std::min(cols - 1, j + 1); ++jj)
        if (prev[jj] < prev[best]) best = jj;
      cost[static_cast<std::size_t>(i) * cols + j] = e(i, j) + prev[best];
      from[static_cast<std::size_t>(i) * cols + j] = best;
    }
  }
  std::vector<int> path(static_cast<std::size_t>(rows));
  const double* last = cost.data() + static_cast<std::size_t>(rows - 1) * cols;
  path[static_cast<std::size_t>(rows - 1)] = static_cast<int>(std::min_element(last, last + cols) - last);
  for (int i = rows - 1; i > 0; --i)
    path[static_cast<std::size_t>(i - 1)] = from[static_cast<std::size_t>(i) * cols + path[static_cast<std::size_t>(i)]];
  return path;
}

double seam_cost(const ImageGrid& error_surface, const std::vector<int>& path, SeamOrientation orientation) {
  double total = 0.0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const int a = static_cast<int>(i);
    total += orientation == SeamOrientation::kVertical ? error_surface.at(a, path[i]) : error_surface.at(path[i], a);
  }
  return total;
}

namespace {

struct Position {
  int row;
  int col;
};

double overlap_ssd(const ImageGrid& out, const ImageGrid& ref, int y0, int x0, Position src, int block, int overlap,
                   bool left, bool top, double limit) {
  const int ch = ref.channels();
  double s = 0.0;
  for (int i = 0; i < block; ++i) {
    const int j_end = (top && i < overlap) ? block : (left ? overlap : 0);
    const float* o = out.data().data() + out.index(y0 + i, x0);
    const float* r = ref.data().data() + ref.index(src.row + i, src.col);
    for (int q = 0; q < j_end * ch; ++q) {
      const double d = static_cast<double>(o[q]) - r[q];
      s += d * d;
    }
    if (s > limit) return s;
  }
  return s;
}

ImageGrid error_surface(const ImageGrid& out, const ImageGrid& ref, int y0, int x0, Position src, int rows, int cols) {
  ImageGrid e(rows, cols, 1);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      double s = 0.0;
      for (int c = 0; c < ref.channels(); ++c) {
        const double d = static_cast<double>(out.at(y0 + i, x0 + j, c)) - ref.at(src.row + i, src.col + j, c);
        s += d * d;
      }
      e.at(i, j) = static_cast<float>(s);
    }
  }
  return e;
}

void check_reference(const ImageGrid& reference, const QuiltConfig& cfg) {
  cfg.validate();
  if (reference.height() < cfg.block_size || reference.width() < cfg.block_size)
    throw std::invalid_argument("quilt: block size " + std::to_string(cfg.block_size) + " exceeds reference");
}

Position random_position(const ImageGrid& ref, int block, RngStream& stream) {
  const int r = static_cast<int>(stream.below(static_cast<std::uint32_t>(ref.height() - block + 1)));
  const int c = static_cast<int>(stream.below(static_cast<std::uint32_t>(ref.width() - block + 1)));
  return {r, c};
}

}  // namespace

ImageGrid quilt_synthesize(const ImageGrid& reference, const QuiltConfig& cfg) {
  check_reference(reference, cfg);
  const int B = cfg.block_size;
  const int o = cfg.overlap;
  const int side = cfg.output_side();
  const int step = B - o;
  ImageGrid out(side, side, reference.channels());
  RngStream stream = derive_stream(cfg.seed, {tag(StreamPurpose::kQuilt)});

  const int pos_rows = reference.height() - B + 1;
  const int pos_cols = reference.width() - B + 1;
  std::vector<double> ssd(static_cast<std::size_t>(pos_rows) * pos_cols);
  std::vector<int> candidates;
  for (int bi = 0; bi < cfg.grid_n; ++bi) {
    for (int bj = 0; bj < cfg.grid_n; ++bj) {
      const int y0 = bi * step;
      const int x0 = bj * step;
      const bool left = bj > 0;
      const bool top = bi > 0;
      Position src{};
      if (!left && !top) {
        src = random_position(reference, B, stream);
      } else {
        double best = std::numeric_limits<double>::infinity();
        for (int r = 0; r < pos_rows; ++r) {
          for (int c = 0; c < pos_cols; ++c) {
            const double limit = (1.0 + cfg.tolerance) * best;
            const double s = overlap_ssd(out, reference, y0, x0, {r, c}, B, o, left, top, limit);
            ssd[static_cast<std::size_t>(r) * pos_cols + c] = s;
            best = std::min(best, s);
          }
        }
        const double threshold = (1.0 + cfg.tolerance) * best;
        candidates.clear();
        for (std::size_t i = 0; i < ssd.size(); ++i)
          if (ssd[i] <= threshold) candidates.push_back(static_cast<int>(i));
        const int pick = candidates[stream.below(static_cast<std::uint32_t>(candidates.size()))];
        src = {pick / pos_cols, pick % pos_cols};
      }

      // take[i][j]: pixel comes from the new block.
      std::vector<char> take(static_cast<std::size_t>(B) * B, 1);
      if (left) {
        const auto path = min_cut_seam(error_surface(out, reference, y0, x0, src, B, o), SeamOrientation::kVertical);
        for (int i = 0; i < B; ++i)
          for (int j = 0; j < path[static_cast<std::size_t>(i)]; ++j) take[static_cast<std::size_t>(i) * B + j] = 0;
      }
      if (top) {
        const auto path = min_cut_seam(error_surface(out, reference, y0, x0, src, o, B), SeamOrientation::kHorizontal);
        for (int j = 0; j < B; ++j)
          for (int i = 0; i < path[static_cast<std::size_t>(j)]; ++i) take[static_cast<std::size_t>(i) * B + j] = 0;
      }
      for (int i = 0; i < B; ++i)
        for (int j = 0; j < B; ++j)
          if (take[static_cast<std::size_t>(i) * B + j])
            for (int c = 0; c < reference.channels(); ++c)
              out.at(y0 + i, x0 + j, c) = reference.at(src.row + i, src.col + j, c);
    }
  }
  return out;
}

ImageGrid naive_tile(const ImageGrid& reference, const QuiltConfig& cfg) {
  check_reference(reference, cfg);
  const int B = cfg.block_size;
  const int step = B - cfg.overlap;
  ImageGrid out(cfg.output_side(), cfg.output_side(), reference.channels());
  RngStream stream = derive_stream(cfg.seed, {tag(StreamPurpose::kQuilt)});
  for (int bi = 0; bi < cfg.grid_n; ++bi) {
    for (int bj = 0; bj < cfg.grid_n; ++bj) {
      const Position src = random_position(reference, B, stream);
      for (int i = 0; i < B; ++i)
        for (int j = 0; j < B; ++j)
          for (int c = 0; c < reference.channels(); ++c)
            out.at(bi * step + i, bj * step + j, c) = reference.at(src.row + i, src.col + j, c);
    }
  }
  return out;
}

}  // namespace itex

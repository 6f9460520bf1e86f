#include <gtest/gtest.h>

#include <cmath>

#include "itex/quilting.hpp"
#include "oracles.hpp"

namespace itex {
namespace {

ImageGrid random_surface(int h, int w, RngStream& r) {
  ImageGrid e(h, w, 1);
  for (float& v : e.data()) v = static_cast<float>(r.uniform());
  return e;
}

bool eight_connected(const std::vector<int>& path, int width) {
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path[i] < 0 || path[i] >= width) return false;
    if (i > 0 && std::abs(path[i] - path[i - 1]) > 1) return false;
  }
  return true;
}

TEST(MinCutSeam, MatchesBruteForce) {
  RngStream r = derive_stream(1, {7});
  for (int trial = 0; trial < 40; ++trial) {
    const int h = 2 + static_cast<int>(r.below(6));
    const int w = 1 + static_cast<int>(r.below(5));
    const ImageGrid e = random_surface(h, w, r);
    const auto path = min_cut_seam(e, SeamOrientation::kVertical);
    ASSERT_EQ(path.size(), static_cast<std::size_t>(h));
    EXPECT_TRUE(eight_connected(path, w));
    EXPECT_NEAR(seam_cost(e, path, SeamOrientation::kVertical), oracle::brute_force_min_path(e), 1e-9);
  }
}

TEST(MinCutSeam, HorizontalIsTransposedVertical) {
  RngStream r = derive_stream(2, {7});
  const ImageGrid e = random_surface(5, 9, r);
  ImageGrid t(9, 5, 1);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 9; ++j) t.at(j, i) = e.at(i, j);
  EXPECT_EQ(min_cut_seam(e, SeamOrientation::kHorizontal), min_cut_seam(t, SeamOrientation::kVertical));
}

TEST(MinCutSeam, FollowsZeroColumn) {
  ImageGrid e(6, 5, 1, 1.0f);
  for (int i = 0; i < 6; ++i) e.at(i, 3) = 0.0f;
  EXPECT_EQ(min_cut_seam(e, SeamOrientation::kVertical), std::vector<int>(6, 3));
}

TEST(MinCutSeam, TiesGoLeft) {
  const ImageGrid e(4, 6, 1, 0.5f);
  EXPECT_EQ(min_cut_seam(e, SeamOrientation::kVertical), std::vector<int>(4, 0));
}

TEST(Quilt, OutputSide) {
  QuiltConfig c;
  c.block_size = 64;
  c.overlap = 8;
  c.grid_n = 5;
  EXPECT_EQ(c.output_side(), 288);
  c.block_size = 512;
  c.overlap = 60;
  EXPECT_EQ(c.output_side(), 2320);
}

TEST(Quilt, ConstantReferenceIsConstant) {
  QuiltConfig c;
  c.block_size = 16;
  c.overlap = 4;
  c.grid_n = 3;
  const ImageGrid out = quilt_synthesize(ImageGrid(32, 32, 3, 0.25f), c);
  EXPECT_EQ(out.height(), 40);
  EXPECT_EQ(out.width(), 40);
  for (float v : out.data()) EXPECT_EQ(v, 0.25f);
}

TEST(Quilt, DeterministicAndSeedSensitive) {
  RngStream r = derive_stream(3, {7});
  const ImageGrid ref = oracle::random_grid(48, 48, 1, r);
  QuiltConfig c;
  c.block_size = 16;
  c.overlap = 4;
  c.grid_n = 4;
  c.seed = 5;
  const ImageGrid a = quilt_synthesize(ref, c);
  EXPECT_EQ(a, quilt_synthesize(ref, c));
  c.seed = 6;
  EXPECT_NE(a, quilt_synthesize(ref, c));
}

TEST(Quilt, BlocksComeFromReference) {
  // With one block, the output is a reference crop.
  RngStream r = derive_stream(4, {7});
  const ImageGrid ref = oracle::random_grid(20, 20, 1, r);
  QuiltConfig c;
  c.block_size = 8;
  c.overlap = 2;
  c.grid_n = 1;
  const ImageGrid out = quilt_synthesize(ref, c);
  bool found = false;
  for (int y = 0; y + 8 <= 20 && !found; ++y)
    for (int x = 0; x + 8 <= 20 && !found; ++x) found = extract_crop(ref, CropWindow{y, x, 8}) == out;
  EXPECT_TRUE(found);
}

TEST(Quilt, RejectsBadInput) {
  QuiltConfig c;
  c.overlap = 64;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = QuiltConfig{};
  EXPECT_THROW(quilt_synthesize(ImageGrid(32, 32, 1), c), std::invalid_argument);
}

TEST(NaiveTile, Size) {
  RngStream r = derive_stream(5, {7});
  QuiltConfig c;
  c.block_size = 16;
  c.overlap = 4;
  c.grid_n = 3;
  const ImageGrid out = naive_tile(oracle::random_grid(32, 32, 3, r), c);
  EXPECT_EQ(out.height(), 40);
  EXPECT_EQ(out.channels(), 3);
}

}  // namespace
}  // namespace itex

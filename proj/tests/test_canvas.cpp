#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "itex/canvas.hpp"
#include "oracles.hpp"

namespace itex {
namespace {

ImageGrid iota_grid(int h, int w, int c) {
  ImageGrid g(h, w, c);
  for (std::size_t i = 0; i < g.size(); ++i) g.data()[i] = static_cast<float>(i);
  return g;
}

TEST(ExtractCrop, FullWindowIsCopy) {
  const ImageGrid x = iota_grid(5, 7, 3);
  EXPECT_THROW(extract_crop(x, {0, 0, 7}), std::invalid_argument);
  const ImageGrid sq = iota_grid(6, 6, 3);
  EXPECT_EQ(extract_crop(sq, {0, 0, 6}), sq);
}

TEST(ExtractCrop, InteriorBlock) {
  const ImageGrid x = iota_grid(4, 4, 1);
  const ImageGrid c = extract_crop(x, {1, 1, 2});
  // Row-major 4x4 values: interior 2x2 is {5, 6, 9, 10}.
  EXPECT_EQ(c.at(0, 0), 5.0f);
  EXPECT_EQ(c.at(0, 1), 6.0f);
  EXPECT_EQ(c.at(1, 0), 9.0f);
  EXPECT_EQ(c.at(1, 1), 10.0f);
}

TEST(ExtractCrop, DisjointWindowsShareNoValues) {
  const ImageGrid x = iota_grid(8, 8, 3);
  const ImageGrid a = extract_crop(x, {0, 0, 4});
  const ImageGrid b = extract_crop(x, {4, 4, 4});
  std::set<float> va(a.data().begin(), a.data().end());
  for (float v : b.data()) EXPECT_FALSE(va.count(v));
}

TEST(ExtractCrop, OutOfBounds) {
  const ImageGrid x(8, 8, 1);
  EXPECT_THROW(extract_crop(x, {5, 0, 4}), std::invalid_argument);
  EXPECT_THROW(extract_crop(x, {-1, 0, 4}), std::invalid_argument);
}

TEST(Aggregate, SingleFullPredictionIsIdentity) {
  RngStream r = derive_stream(1, {1});
  const ImageGrid p = oracle::random_grid(9, 9, 3, r);
  std::vector<std::pair<CropWindow, ImageGrid>> preds{{{0, 0, 9}, p}};
  EXPECT_EQ(aggregate(preds, {9, 9, 3}, ImageGrid(9, 9, 3)), p);
}

TEST(Aggregate, TwoHalfOverlappingConstants) {
  std::vector<std::pair<CropWindow, ImageGrid>> preds{{{0, 0, 4}, ImageGrid(4, 4, 1, 0.0f)},
                                                      {{0, 2, 4}, ImageGrid(4, 4, 1, 1.0f)}};
  const ImageGrid out = aggregate(preds, {4, 6, 1}, ImageGrid(4, 6, 1, -9.0f));
  for (int r = 0; r < 4; ++r) {
    EXPECT_EQ(out.at(r, 0), 0.0f);
    EXPECT_EQ(out.at(r, 1), 0.0f);
    EXPECT_EQ(out.at(r, 2), 0.5f);
    EXPECT_EQ(out.at(r, 3), 0.5f);
    EXPECT_EQ(out.at(r, 4), 1.0f);
    EXPECT_EQ(out.at(r, 5), 1.0f);
  }
}

TEST(Aggregate, UncoveredPixelsTakeFallback) {
  std::vector<std::pair<CropWindow, ImageGrid>> preds{{{0, 0, 2}, ImageGrid(2, 2, 1, 3.0f)}};
  const ImageGrid out = aggregate(preds, {3, 3, 1}, ImageGrid(3, 3, 1, -1.0f));
  EXPECT_EQ(out.at(0, 0), 3.0f);
  EXPECT_EQ(out.at(2, 2), -1.0f);
  EXPECT_EQ(out.at(0, 2), -1.0f);
}

TEST(Aggregate, ShapeMismatch) {
  std::vector<std::pair<CropWindow, ImageGrid>> preds{{{0, 0, 3}, ImageGrid(2, 2, 1)}};
  EXPECT_THROW(aggregate(preds, {4, 4, 1}, ImageGrid(4, 4, 1)), std::invalid_argument);
  std::vector<std::pair<CropWindow, ImageGrid>> chans{{{0, 0, 2}, ImageGrid(2, 2, 3)}};
  EXPECT_THROW(aggregate(chans, {4, 4, 1}, ImageGrid(4, 4, 1)), std::invalid_argument);
  std::vector<std::pair<CropWindow, ImageGrid>> outside{{{3, 3, 2}, ImageGrid(2, 2, 1)}};
  EXPECT_THROW(aggregate(outside, {4, 4, 1}, ImageGrid(4, 4, 1)), std::invalid_argument);
}

class AggregateProperty : public ::testing::TestWithParam<int> {};

TEST_P(AggregateProperty, MatchesNormalEquationsAndIsIdempotent) {
  RngStream r = derive_stream(1000, {static_cast<std::uint64_t>(GetParam())});
  const int h = 4 + static_cast<int>(r.below(9));
  const int w = 4 + static_cast<int>(r.below(9));
  const int c = r.below(2) ? 3 : 1;
  const int n = 1 + static_cast<int>(r.below(8));
  std::vector<std::pair<CropWindow, ImageGrid>> preds;
  for (int i = 0; i < n; ++i) {
    const int s = 1 + static_cast<int>(r.below(static_cast<std::uint32_t>(std::min(h, w))));
    const CropWindow win{static_cast<int>(r.below(static_cast<std::uint32_t>(h - s + 1))),
                         static_cast<int>(r.below(static_cast<std::uint32_t>(w - s + 1))), s};
    preds.emplace_back(win, oracle::random_grid(s, s, c, r));
  }
  const ImageGrid fallback = oracle::random_grid(h, w, c, r);
  const ImageGrid got = aggregate(preds, {h, w, c}, fallback);
  EXPECT_LE(max_abs_diff(got, oracle::least_squares_merge(preds, h, w, c, fallback)), 1e-5);

  if (h == w) {
    std::vector<std::pair<CropWindow, ImageGrid>> again{{{0, 0, h}, got}};
    EXPECT_EQ(aggregate(again, {h, w, c}, fallback), got);
  }

  auto shuffled = preds;
  std::reverse(shuffled.begin(), shuffled.end());
  EXPECT_LE(max_abs_diff(aggregate(shuffled, {h, w, c}, fallback), got), 1e-6);
}

INSTANTIATE_TEST_SUITE_P(RandomInstances, AggregateProperty, ::testing::Range(0, 40));

TEST(PlanCrops, GridModeClampedOffsets) {
  RngStream r = derive_stream(0, {0});
  const CropPlan p = plan_crops({100, 100, 1}, 64, 0, CropMode::kGrid, r);
  ASSERT_EQ(p.windows.size(), 4u);
  std::set<std::pair<int, int>> offsets;
  for (const auto& w : p.windows) offsets.insert({w.row, w.col});
  EXPECT_EQ(offsets, (std::set<std::pair<int, int>>{{0, 0}, {0, 36}, {36, 0}, {36, 36}}));
}

TEST(PlanCrops, HybridAlwaysCovers) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RngStream r = derive_stream(seed, {1});
    const int n = static_cast<int>(r.below(20));
    const CropPlan p = plan_crops({70 + static_cast<int>(seed), 90, 1}, 32, n, CropMode::kHybrid, r);
    EXPECT_GE(p.min_coverage(), 1u);
  }
}

TEST(PlanCrops, MeanCoverageIsTenAt288With96Crops) {
  RngStream r = derive_stream(0, {2});
  const CropPlan p = plan_crops({288, 288, 1}, 96, 90, CropMode::kRandom, r);
  EXPECT_EQ(p.windows.size(), 90u);
  EXPECT_DOUBLE_EQ(p.mean_coverage(), 10.0);
}

TEST(PlanCrops, CoverageCountsWindows) {
  RngStream r = derive_stream(3, {3});
  const CropPlan p = plan_crops({40, 50, 1}, 16, 12, CropMode::kHybrid, r);
  for (int y = 0; y < 40; y += 3)
    for (int x = 0; x < 50; x += 7) {
      const auto n = std::count_if(p.windows.begin(), p.windows.end(), [&](const CropWindow& w) { return w.contains(y, x); });
      EXPECT_EQ(p.coverage_at(y, x), static_cast<std::uint32_t>(n));
    }
  for (const auto& w : p.windows) EXPECT_TRUE(w.fits(40, 50));
}

TEST(PlanCrops, RandomCoverageLaw) {
  // Mean coverage over many seeds approaches n s^2 / (H W) with uniform offsets
  // (exact per plan since every window lies inside the canvas).
  double total = 0.0;
  const int seeds = 200;
  for (int s = 0; s < seeds; ++s) {
    RngStream r = derive_stream(static_cast<std::uint64_t>(s), {4});
    total += plan_crops({60, 80, 1}, 20, 7, CropMode::kRandom, r).mean_coverage();
  }
  EXPECT_NEAR(total / seeds, 7.0 * 400 / 4800, 0.01 * 7.0 * 400 / 4800);
}

TEST(PlanCrops, DenseStrideAt288With96Crops) {
  EXPECT_EQ(dense_stride(96), 6);
  EXPECT_EQ(grid_window_count(288, 288, 96, CropMode::kDense), 1089u);
}

TEST(PlanCrops, CropLargerThanCanvas) {
  RngStream r = derive_stream(0, {0});
  EXPECT_THROW(plan_crops({32, 64, 1}, 48, 1, CropMode::kHybrid, r), std::invalid_argument);
}

}  // namespace
}  // namespace itex

namespace itex {
namespace {

TEST(Aggregator, DoublePathMatchesFloatPath) {
  RngStream r = derive_stream(77, {1});
  const CanvasShape shape{10, 12, 3};
  Aggregator a(shape);
  Aggregator b(shape);
  for (const CropWindow w : {CropWindow{0, 0, 6}, CropWindow{3, 4, 6}, CropWindow{4, 6, 5}}) {
    const ImageGrid p = oracle::random_grid(w.size, w.size, 3, r);
    a.add(w, p);
    const std::vector<double> pd(p.data().begin(), p.data().end());
    b.add(w, pd);
  }
  const ImageGrid fb = oracle::random_grid(10, 12, 3, r);
  const std::vector<double> fbd(fb.data().begin(), fb.data().end());
  const ImageGrid fa = a.finish(fb);
  const auto vb = b.finish_values(fbd);
  for (std::size_t i = 0; i < vb.size(); ++i) EXPECT_EQ(fa.data()[i], static_cast<float>(vb[i]));
  EXPECT_THROW(b.add(CropWindow{0, 0, 2}, std::vector<double>(5)), std::invalid_argument);
  EXPECT_THROW(b.finish_values(std::vector<double>(3)), std::invalid_argument);
}

}  // namespace
}  // namespace itex

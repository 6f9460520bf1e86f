#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "itex/schedule.hpp"
#include "oracles.hpp"

namespace itex {
namespace {

TEST(Schedule, FiftyStepsEndpoints) {
  const NoiseSchedule s = build_schedule(50);
  ASSERT_EQ(s.steps(), 50);
  EXPECT_EQ(s.t(0), 1.0);
  EXPECT_EQ(s.t(49), 0.0);
}

TEST(Schedule, TwoStepsAreExactEndpoints) {
  const NoiseSchedule s = build_schedule(2);
  EXPECT_EQ(s[0].alpha, 0.0);
  EXPECT_EQ(s[0].sigma, 1.0);
  EXPECT_EQ(s[1].alpha, 1.0);
  EXPECT_EQ(s[1].sigma, 0.0);
}

TEST(Schedule, MidpointAlpha) {
  const NoiseSchedule s = build_schedule(5);
  EXPECT_DOUBLE_EQ(s.t(2), 0.5);
  EXPECT_NEAR(s.alpha(2), 0.70710678118654752, 1e-15);
}

TEST(Schedule, RejectsTooFewSteps) {
  EXPECT_THROW(build_schedule(1), std::invalid_argument);
  EXPECT_THROW(build_schedule(0), std::invalid_argument);
}

TEST(Schedule, VariancePreservingAndMonotone) {
  for (int T : {2, 3, 10, 50, 1000}) {
    const NoiseSchedule s = build_schedule(T);
    for (int k = 0; k < T; ++k) {
      EXPECT_NEAR(s.alpha(k) * s.alpha(k) + s.sigma(k) * s.sigma(k), 1.0, 1e-6);
      if (k > 0) {
        EXPECT_GT(s.alpha(k), s.alpha(k - 1));
        EXPECT_LT(s.sigma(k), s.sigma(k - 1));
        EXPECT_LT(s.t(k), s.t(k - 1));
      }
    }
  }
}

TEST(ForwardDiffuse, Endpoints) {
  RngStream r = derive_stream(1, {1});
  const ImageGrid x = oracle::random_grid(8, 8, 3, r);
  const ImageGrid eps = oracle::random_grid(8, 8, 3, r);
  const NoiseSchedule s = build_schedule(10);
  EXPECT_EQ(forward_diffuse(x, 9, eps, s), x);
  EXPECT_EQ(forward_diffuse(x, 0, eps, s), eps);
}

TEST(ForwardDiffuse, SymmetricCancellation) {
  const NoiseSchedule s = build_schedule(5);
  const ImageGrid z = forward_diffuse(ImageGrid(4, 4, 1, 0.5f), 2, ImageGrid(4, 4, 1, -0.5f), s);
  for (float v : z.data()) EXPECT_NEAR(v, 0.0f, 1e-7);
}

TEST(ForwardDiffuse, ShapeMismatch) {
  const NoiseSchedule s = build_schedule(5);
  EXPECT_THROW(forward_diffuse(ImageGrid(4, 4, 1), 1, ImageGrid(4, 5, 1), s), std::invalid_argument);
}

TEST(ForwardDiffuse, PreservesUnitVariance) {
  const NoiseSchedule s = build_schedule(50);
  RngStream r = derive_stream(2, {2});
  const ImageGrid x = oracle::random_grid(128, 128, 1, r);
  const ImageGrid eps = oracle::random_grid(128, 128, 1, r);
  for (int k : {0, 10, 25, 40, 49}) {
    const ImageGrid z = forward_diffuse(x, k, eps, s);
    double m = 0, v = 0;
    for (float a : z.data()) m += a;
    m /= z.size();
    for (float a : z.data()) v += (a - m) * (a - m);
    v /= z.size();
    EXPECT_NEAR(v, 1.0, 0.05) << "k=" << k;
  }
}

TEST(DdimStep, RoundTripIdentity) {
  const NoiseSchedule s = build_schedule(50);
  RngStream r = derive_stream(3, {3});
  for (int trial = 0; trial < 5; ++trial) {
    const ImageGrid x = oracle::random_grid(16, 16, 3, r);
    const ImageGrid eps = oracle::random_grid(16, 16, 3, r);
    for (int k = 0; k < 49; ++k) {
      const ImageGrid z = forward_diffuse(x, k, eps, s);
      EXPECT_LE(max_abs_diff(ddim_step(z, x, k, s), forward_diffuse(x, k + 1, eps, s)), 1e-6) << "k=" << k;
    }
  }
}

TEST(DdimStep, FinalStepReturnsPrediction) {
  const NoiseSchedule s = build_schedule(6);
  RngStream r = derive_stream(4, {4});
  const ImageGrid z = oracle::random_grid(5, 5, 1, r);
  const ImageGrid x0 = oracle::random_grid(5, 5, 1, r);
  EXPECT_EQ(ddim_step(z, x0, 4, s), x0);
}

TEST(DdimStep, ConstantGridsMatchScalarArithmetic) {
  const NoiseSchedule s = build_schedule(7);
  const double c1 = 0.3, c2 = -0.8;
  for (int k = 0; k < 5; ++k) {
    const ImageGrid out = ddim_step(ImageGrid(3, 3, 1, static_cast<float>(c1)), ImageGrid(3, 3, 1, static_cast<float>(c2)), k, s);
    const double expected =
        s.alpha(k + 1) * static_cast<float>(c2) +
        s.sigma(k + 1) * (static_cast<float>(c1) - s.alpha(k) * static_cast<float>(c2)) / s.sigma(k);
    for (float v : out.data()) EXPECT_NEAR(v, expected, 1e-6);
  }
}

TEST(DdimStep, TerminalStepRejected) {
  const NoiseSchedule s = build_schedule(5);
  EXPECT_THROW(ddim_step(ImageGrid(2, 2, 1), ImageGrid(2, 2, 1), 4, s), std::invalid_argument);
}

TEST(DdimStep, NoiseAveragingIsAffine) {
  // Mean of per-prediction noise estimates equals the noise estimate of the
  // mean prediction.
  const NoiseSchedule s = build_schedule(20);
  RngStream r = derive_stream(5, {5});
  const ImageGrid z = oracle::random_grid(6, 6, 1, r);
  std::vector<ImageGrid> preds;
  for (int i = 0; i < 4; ++i) preds.push_back(oracle::random_grid(6, 6, 1, r));
  for (int k = 1; k < 19; ++k) {
    ImageGrid mean_x(6, 6, 1);
    ImageGrid mean_eps(6, 6, 1);
    for (const auto& p : preds) {
      const ImageGrid e = noise_estimate(z, p, k, s);
      for (std::size_t i = 0; i < z.size(); ++i) {
        mean_x.data()[i] += p.data()[i] / 4.0f;
        mean_eps.data()[i] += e.data()[i] / 4.0f;
      }
    }
    EXPECT_LE(max_abs_diff(mean_eps, noise_estimate(z, mean_x, k, s)), 1e-5);
  }
}

}  // namespace
}  // namespace itex

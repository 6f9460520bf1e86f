#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the code path it checks.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "itex/canvas.hpp"
#include "itex/image.hpp"
#include "itex/linear_denoiser.hpp"
#include "itex/rng.hpp"

namespace itex::oracle {

inline ImageGrid random_grid(int h, int w, int c, RngStream& s, float scale = 1.0f) {
  auto v = gaussian(s, static_cast<std::size_t>(h) * w * c);
  for (float& x : v) x *= scale;
  return ImageGrid(h, w, c, std::move(v));
}

/// argmin_x sum_i ||F_i(x) - P_i||^2 by forming and solving the normal
/// equations (A^T A) x = A^T b over the covered pixels, one channel at a time.
inline ImageGrid least_squares_merge(const std::vector<std::pair<CropWindow, ImageGrid>>& preds, int h, int w, int c,
                                     const ImageGrid& fallback) {
  std::vector<int> column(static_cast<std::size_t>(h) * w, -1);
  int unknowns = 0;
  int rows = 0;
  for (const auto& [win, p] : preds) {
    rows += win.size * win.size;
    for (int r = 0; r < win.size; ++r)
      for (int q = 0; q < win.size; ++q) {
        int& col = column[static_cast<std::size_t>(win.row + r) * w + win.col + q];
        if (col < 0) col = unknowns++;
      }
  }
  ImageGrid out = fallback;
  if (unknowns == 0) return out;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, unknowns);
  int row = 0;
  for (const auto& [win, p] : preds)
    for (int r = 0; r < win.size; ++r)
      for (int q = 0; q < win.size; ++q)
        A(row++, column[static_cast<std::size_t>(win.row + r) * w + win.col + q]) = 1.0;
  const Eigen::MatrixXd AtA = A.transpose() * A;
  const auto solver = AtA.ldlt();
  for (int ch = 0; ch < c; ++ch) {
    Eigen::VectorXd b(rows);
    row = 0;
    for (const auto& [win, p] : preds)
      for (int r = 0; r < win.size; ++r)
        for (int q = 0; q < win.size; ++q) b(row++) = p.at(r, q, ch);
    const Eigen::VectorXd x = solver.solve(A.transpose() * b);
    for (int r = 0; r < h; ++r)
      for (int q = 0; q < w; ++q) {
        const int col = column[static_cast<std::size_t>(r) * w + q];
        if (col >= 0) out.at(r, q, ch) = static_cast<float>(x(col));
      }
  }
  return out;
}

/// Circular autocovariance c(dy, dx) = 1/N sum_f S(f) exp(2 pi i f.d) by
/// direct summation.
inline std::vector<double> autocovariance(const std::vector<double>& S, int h, int w) {
  std::vector<double> c(static_cast<std::size_t>(h) * w, 0.0);
  const double n = static_cast<double>(h) * w;
  for (int dy = 0; dy < h; ++dy)
    for (int dx = 0; dx < w; ++dx) {
      std::complex<double> acc = 0.0;
      for (int ky = 0; ky < h; ++ky)
        for (int kx = 0; kx < w; ++kx) {
          const double ph = 2.0 * std::numbers::pi * (static_cast<double>(ky) * dy / h + static_cast<double>(kx) * dx / w);
          acc += S[static_cast<std::size_t>(ky) * w + kx] * std::polar(1.0, ph);
        }
      c[static_cast<std::size_t>(dy) * w + dx] = acc.real() / n;
    }
  return c;
}

/// E[x | z] = mu + alpha Sigma (alpha^2 Sigma + sigma^2 I)^{-1} (z - alpha mu)
/// with the explicit circulant covariance of spectrum S.
inline std::vector<double> dense_posterior_mean(const std::vector<double>& S, int h, int w, double mu,
                                                const std::vector<double>& z, double alpha, double sigma) {
  const int n = h * w;
  const auto c = autocovariance(S, h, w);
  Eigen::MatrixXd cov(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int dy = ((i / w - j / w) % h + h) % h;
      const int dx = ((i % w - j % w) % w + w) % w;
      cov(i, j) = c[static_cast<std::size_t>(dy) * w + dx];
    }
  Eigen::VectorXd zv(n);
  for (int i = 0; i < n; ++i) zv(i) = z[static_cast<std::size_t>(i)] - alpha * mu;
  const Eigen::MatrixXd m = alpha * alpha * cov + sigma * sigma * Eigen::MatrixXd::Identity(n, n);
  const Eigen::VectorXd x = alpha * cov * m.fullPivLu().solve(zv);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = mu + x(i);
  return out;
}

/// Minimum cost over every 8-connected top-to-bottom path, enumerated.
inline double brute_force_min_path(const ImageGrid& e) {
  const int h = e.height();
  const int w = e.width();
  double best = std::numeric_limits<double>::infinity();
  std::function<void(int, int, double)> walk = [&](int row, int col, double acc) {
    acc += e.at(row, col);
    if (row == h - 1) {
      best = std::min(best, acc);
      return;
    }
    for (int d = -1; d <= 1; ++d) {
      const int next = col + d;
      if (next >= 0 && next < w) walk(row + 1, next, acc);
    }
  };
  for (int c = 0; c < w; ++c) walk(0, c, 0.0);
  return best;
}

/// Denoising loss of one bin with parameters in double, by direct
/// zero-padded correlation.
inline double direct_loss(const std::vector<double>& weights, const std::vector<double>& biases, int kc, int ch,
                          const ImageGrid& z, const ImageGrid& x) {
  const int h = z.height();
  const int w = z.width();
  const int half = kc / 2;
  double loss = 0.0;
  for (int o = 0; o < ch; ++o)
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        double v = biases[static_cast<std::size_t>(o)];
        for (int i = 0; i < ch; ++i)
          for (int ky = 0; ky < kc; ++ky)
            for (int kx = 0; kx < kc; ++kx) {
              const int rr = r + ky - half;
              const int cc = c + kx - half;
              if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
              v += weights[((static_cast<std::size_t>(o) * ch + i) * kc + ky) * kc + kx] * z.at(rr, cc, i);
            }
        const double d = v - x.at(r, c, o);
        loss += d * d;
      }
  return loss / static_cast<double>(z.size());
}

struct GradientCheck {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
};

/// Central finite differences (step h) of direct_loss against the analytic
/// gradient of `bin`. Relative error uses max(|a|, |n|, floor) as the scale.
inline GradientCheck check_gradient(const LinearConvDenoiser& model, int bin, const ImageGrid& z, const ImageGrid& x,
                                    const std::vector<double>& d_weights, const std::vector<double>& d_biases,
                                    double h = 1e-3, double floor = 1e-6) {
  const std::size_t per_bin = model.weights_per_bin();
  std::vector<double> wts(per_bin);
  std::vector<double> bs(static_cast<std::size_t>(model.channels));
  for (std::size_t j = 0; j < per_bin; ++j) wts[j] = model.weights[static_cast<std::size_t>(bin) * per_bin + j];
  for (int o = 0; o < model.channels; ++o) bs[static_cast<std::size_t>(o)] = model.bias(bin, o);
  GradientCheck out;
  auto rel = [&](double a, double n) { return std::abs(a - n) / std::max({std::abs(a), std::abs(n), floor}); };
  for (std::size_t j = 0; j < per_bin; ++j) {
    const double saved = wts[j];
    wts[j] = saved + h;
    const double up = direct_loss(wts, bs, model.kernel_size, model.channels, z, x);
    wts[j] = saved - h;
    const double down = direct_loss(wts, bs, model.kernel_size, model.channels, z, x);
    wts[j] = saved;
    out.max_rel_error = std::max(out.max_rel_error, rel(d_weights[j], (up - down) / (2 * h)));
    ++out.checked;
  }
  for (std::size_t o = 0; o < bs.size(); ++o) {
    const double saved = bs[o];
    bs[o] = saved + h;
    const double up = direct_loss(wts, bs, model.kernel_size, model.channels, z, x);
    bs[o] = saved - h;
    const double down = direct_loss(wts, bs, model.kernel_size, model.channels, z, x);
    bs[o] = saved;
    out.max_rel_error = std::max(out.max_rel_error, rel(d_biases[o], (up - down) / (2 * h)));
    ++out.checked;
  }
  return out;
}

}  // namespace itex::oracle

#pragma once

#include <cstddef>
#include <vector>

#include "itex/image.hpp"

namespace itex {

struct ScheduleStep {
  double t;
  double alpha;
  double sigma;
};

/// Variance-preserving cosine schedule, indexed from 0 (t = 1, pure noise)
/// to steps()-1 (t = 0, clean signal).
class NoiseSchedule {
 public:
  explicit NoiseSchedule(int steps);

  int steps() const noexcept { return static_cast<int>(steps_.size()); }
  const ScheduleStep& operator[](int k) const;
  double t(int k) const { return (*this)[k].t; }
  double alpha(int k) const { return (*this)[k].alpha; }
  double sigma(int k) const { return (*this)[k].sigma; }
  bool is_terminal(int k) const noexcept { return k == steps() - 1; }

 private:
  std::vector<ScheduleStep> steps_;
};

/// t_k uniform on [1, 0]; alpha = cos(pi t / 2), sigma = sin(pi t / 2).
/// Endpoints are exact. Throws std::invalid_argument for steps < 2.
NoiseSchedule build_schedule(int steps);

/// alpha_k * x + sigma_k * eps.
ImageGrid forward_diffuse(const ImageGrid& x, int k, const ImageGrid& eps, const NoiseSchedule& sched);

/// Deterministic DDIM update from step k to k+1 (eta = 0):
///   eps_hat = (z - alpha_k x0_hat) / sigma_k
///   z'      = alpha_{k+1} x0_hat + sigma_{k+1} eps_hat
ImageGrid ddim_step(const ImageGrid& z, const ImageGrid& x0_hat, int k, const NoiseSchedule& sched);

/// (z - alpha_k x0_hat) / sigma_k, elementwise.
ImageGrid noise_estimate(const ImageGrid& z, const ImageGrid& x0_hat, int k, const NoiseSchedule& sched);

}  // namespace itex

#include "itex/schedule.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace itex {

NoiseSchedule::NoiseSchedule(int steps) {
  if (steps < 2) throw std::invalid_argument("schedule: need at least 2 steps, got " + std::to_string(steps));
  steps_.resize(static_cast<std::size_t>(steps));
  const int last = steps - 1;
  for (int k = 0; k <= last; ++k) {
    ScheduleStep& s = steps_[static_cast<std::size_t>(k)];
    if (k == 0) {
      s = {1.0, 0.0, 1.0};
    } else if (k == last) {
      s = {0.0, 1.0, 0.0};
    } else {
      s.t = 1.0 - static_cast<double>(k) / last;
      s.alpha = std::cos(0.5 * std::numbers::pi * s.t);
      s.sigma = std::sin(0.5 * std::numbers::pi * s.t);
    }
  }
}

const ScheduleStep& NoiseSchedule::operator[](int k) const {
  if (k < 0 || k >= steps()) throw std::invalid_argument("schedule: step index " + std::to_string(k) + " out of range");
  return steps_[static_cast<std::size_t>(k)];
}

NoiseSchedule build_schedule(int steps) { return NoiseSchedule(steps); }

ImageGrid forward_diffuse(const ImageGrid& x, int k, const ImageGrid& eps, const NoiseSchedule& sched) {
  require_same_shape(x, eps, "forward_diffuse");
  const double a = sched.alpha(k);
  const double s = sched.sigma(k);
  ImageGrid out(x.height(), x.width(), x.channels());
  auto xd = x.data();
  auto ed = eps.data();
  auto od = out.data();
  for (std::size_t i = 0; i < od.size(); ++i) od[i] = static_cast<float>(a * xd[i] + s * ed[i]);
  return out;
}

ImageGrid noise_estimate(const ImageGrid& z, const ImageGrid& x0_hat, int k, const NoiseSchedule& sched) {
  require_same_shape(z, x0_hat, "noise_estimate");
  const double a = sched.alpha(k);
  const double s = sched.sigma(k);
  if (!(s > 0.0)) throw std::invalid_argument("noise_estimate: sigma is zero at step " + std::to_string(k));
  ImageGrid out(z.height(), z.width(), z.channels());
  auto zd = z.data();
  auto xd = x0_hat.data();
  auto od = out.data();
  for (std::size_t i = 0; i < od.size(); ++i) od[i] = static_cast<float>((zd[i] - a * xd[i]) / s);
  return out;
}

ImageGrid ddim_step(const ImageGrid& z, const ImageGrid& x0_hat, int k, const NoiseSchedule& sched) {
  require_same_shape(z, x0_hat, "ddim_step");
  if (k < 0 || k >= sched.steps() - 1)
    throw std::invalid_argument("ddim_step: step " + std::to_string(k) + " has no successor");
  const double a = sched.alpha(k);
  const double s = sched.sigma(k);
  const double a_next = sched.alpha(k + 1);
  const double s_next = sched.sigma(k + 1);
  ImageGrid out(z.height(), z.width(), z.channels());
  auto zd = z.data();
  auto xd = x0_hat.data();
  auto od = out.data();
  if (s_next == 0.0) {
    std::copy(xd.begin(), xd.end(), od.begin());
    return out;
  }
  for (std::size_t i = 0; i < od.size(); ++i) {
    const double eps_hat = (zd[i] - a * xd[i]) / s;
    od[i] = static_cast<float>(a_next * xd[i] + s_next * eps_hat);
  }
  return out;
}

}  // namespace itex

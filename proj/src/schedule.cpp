#include "repaint/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "repaint/error.hpp"

namespace repaint {

std::string_view to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::Linear:
      return "linear";
    case ScheduleKind::Cosine:
      return "cosine";
  }
  return "unknown";
}

ScheduleKind parse_schedule_kind(std::string_view text) {
  if (text == "linear") return ScheduleKind::Linear;
  if (text == "cosine") return ScheduleKind::Cosine;
  throw ValueError("unknown schedule kind '" + std::string(text) + "' (expected linear or cosine)");
}

NoiseSchedule::NoiseSchedule(std::vector<double> betas, ScheduleKind kind) : kind_(kind) {
  if (betas.empty()) throw ValueError("noise schedule needs at least one step");
  const std::size_t T = betas.size();
  betas_.assign(T + 1, 0.0);
  alphas_.assign(T + 1, 1.0);
  alpha_bars_.assign(T + 1, 1.0);
  for (std::size_t t = 1; t <= T; ++t) {
    const double b = betas[t - 1];
    if (!(b > 0.0 && b < 1.0)) {
      throw ValueError("beta_" + std::to_string(t) + " = " + std::to_string(b) + " outside (0, 1)");
    }
    betas_[t] = b;
    alphas_[t] = 1.0 - b;
    alpha_bars_[t] = alpha_bars_[t - 1] * alphas_[t];
  }
}

void NoiseSchedule::check_time(int t, int lo) const {
  if (t < lo || t > steps()) {
    throw RangeError("diffusion time " + std::to_string(t) + " outside [" + std::to_string(lo) + ", " +
                     std::to_string(steps()) + "]");
  }
}

NoiseSchedule build_linear_schedule(int steps, double beta_start, double beta_end, bool rescale) {
  if (steps < 1) throw ValueError("schedule needs T >= 1");
  if (beta_start > beta_end) throw ValueError("beta_start must not exceed beta_end");
  const double scale = rescale ? 1000.0 / steps : 1.0;
  const double lo = beta_start * scale;
  const double hi = beta_end * scale;
  if (!(lo > 0.0 && hi < 1.0)) {
    throw ValueError("scaled beta endpoints [" + std::to_string(lo) + ", " + std::to_string(hi) +
                     "] outside (0, 1)");
  }
  std::vector<double> betas(static_cast<std::size_t>(steps));
  if (steps == 1) {
    betas[0] = lo;
  } else {
    const double step = (hi - lo) / (steps - 1);
    for (int i = 0; i < steps; ++i) betas[i] = lo + step * i;
    betas.back() = hi;
  }
  return NoiseSchedule(std::move(betas), ScheduleKind::Linear);
}

NoiseSchedule build_cosine_schedule(int steps) {
  if (steps < 1) throw ValueError("schedule needs T >= 1");
  constexpr double offset = 0.008;
  const auto profile = [&](double t) {
    const double c = std::cos((t / steps + offset) / (1.0 + offset) * std::numbers::pi / 2.0);
    return c * c;
  };
  std::vector<double> betas(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    betas[i] = std::min(1.0 - profile(i + 1) / profile(i), 0.999);
  }
  return NoiseSchedule(std::move(betas), ScheduleKind::Cosine);
}

Tensor forward_step(const Tensor& x_prev, int t, const Tensor& noise, const NoiseSchedule& sched) {
  require_same_shape(x_prev, noise, "forward_step");
  sched.check_time(t);
  const double keep = std::sqrt(sched.alpha(t));
  const double add = std::sqrt(sched.beta(t));
  Tensor out(x_prev.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = keep * x_prev[i] + add * noise[i];
  return out;
}

Tensor forward_sample(const Tensor& x0, int t, const Tensor& noise, const NoiseSchedule& sched) {
  require_same_shape(x0, noise, "forward_sample");
  sched.check_time(t, 0);
  const double keep = std::sqrt(sched.alpha_bar(t));
  const double add = std::sqrt(1.0 - sched.alpha_bar(t));
  Tensor out(x0.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = keep * x0[i] + add * noise[i];
  return out;
}

}  // namespace repaint

#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "repaint/tensor.hpp"

namespace repaint {

enum class ScheduleKind { Linear, Cosine };

std::string_view to_string(ScheduleKind kind);
ScheduleKind parse_schedule_kind(std::string_view text);

/// Per-step noise variances beta_t with the derived alpha_t = 1 - beta_t and
/// cumulative products alpha_bar_t, for diffusion times t = 1..T.
///
/// alpha_bar(0) is the empty product 1, so t = 0 denotes clean data. All
/// arrays are computed once at construction; queries are lookups. Immutable
/// and safe to share between sampling threads.
class NoiseSchedule {
 public:
  // Validates 0 < beta < 1 for every entry.
  NoiseSchedule(std::vector<double> betas, ScheduleKind kind);

  int steps() const { return static_cast<int>(betas_.size()) - 1; }
  ScheduleKind kind() const { return kind_; }

  // 1 <= t <= T. Unchecked in release builds; see check_time().
  double beta(int t) const { return betas_[t]; }
  double alpha(int t) const { return alphas_[t]; }
  // 0 <= t <= T.
  double alpha_bar(int t) const { return alpha_bars_[t]; }

  // Index 0 holds t = 1.
  std::span<const double> betas() const { return std::span(betas_).subspan(1); }
  std::span<const double> alphas() const { return std::span(alphas_).subspan(1); }
  // Index 0 holds t = 0.
  std::span<const double> alpha_bars() const { return alpha_bars_; }

  // Throws RangeError unless lo <= t <= T.
  void check_time(int t, int lo = 1) const;

 private:
  ScheduleKind kind_;
  std::vector<double> betas_;       // [0] unused
  std::vector<double> alphas_;      // [0] unused
  std::vector<double> alpha_bars_;  // [0] = 1
};

/// Linear betas between beta_start and beta_end, endpoints inclusive.
///
/// The endpoints are quoted for a 1000-step reference schedule; with
/// `rescale` they are multiplied by 1000/T so shorter schedules reach a
/// comparable terminal noise level.
NoiseSchedule build_linear_schedule(int steps, double beta_start = 1e-4, double beta_end = 0.02,
                                    bool rescale = true);

/// Squared-cosine alpha_bar profile (offset s = 0.008), betas clipped to 0.999.
NoiseSchedule build_cosine_schedule(int steps);

// x_t = sqrt(1 - beta_t) x_{t-1} + sqrt(beta_t) noise, 1 <= t <= T.
Tensor forward_step(const Tensor& x_prev, int t, const Tensor& noise, const NoiseSchedule& sched);

// x_t = sqrt(alpha_bar_t) x_0 + sqrt(1 - alpha_bar_t) noise, 0 <= t <= T.
Tensor forward_sample(const Tensor& x0, int t, const Tensor& noise, const NoiseSchedule& sched);

}  // namespace repaint

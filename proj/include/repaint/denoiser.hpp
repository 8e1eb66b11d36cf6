#pragma once

#include "repaint/random.hpp"
#include "repaint/schedule.hpp"
#include "repaint/tensor.hpp"

namespace repaint {

/// Noise predictor eps(x_t, t).
///
/// `x_t` is batched: shape [n, ...] with one sample per row. The result has
/// the same shape. Implementations must be safe to call concurrently.
class DenoiserModel {
 public:
  virtual ~DenoiserModel() = default;
  virtual Tensor predict_eps(const Tensor& x_t, int t, const NoiseSchedule& sched) const = 0;
};

// mu = (x_t - beta_t / sqrt(1 - alpha_bar_t) * eps_hat) / sqrt(alpha_t)
Tensor posterior_mean(const Tensor& eps_hat, const Tensor& x_t, int t, const NoiseSchedule& sched);

/// Monte-Carlo L_simple: for each row of x0_batch draw t ~ U{1..T} and
/// eps ~ N(0, I), form x_t = forward_sample(x0, t, eps) and average
/// ||eps - eps_hat(x_t, t)||^2 over the batch.
double loss_simple(const DenoiserModel& model, const Tensor& x0_batch, const NoiseSchedule& sched, Rng& rng);

}  // namespace repaint

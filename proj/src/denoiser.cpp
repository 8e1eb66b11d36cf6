#include "repaint/denoiser.hpp"

#include <cmath>

#include "repaint/error.hpp"

namespace repaint {

Tensor posterior_mean(const Tensor& eps_hat, const Tensor& x_t, int t, const NoiseSchedule& sched) {
  require_same_shape(eps_hat, x_t, "posterior_mean");
  sched.check_time(t);
  const double inv_sqrt_alpha = 1.0 / std::sqrt(sched.alpha(t));
  const double eps_coef = sched.beta(t) / std::sqrt(1.0 - sched.alpha_bar(t));
  Tensor out(x_t.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = inv_sqrt_alpha * (x_t[i] - eps_coef * eps_hat[i]);
  return out;
}

double loss_simple(const DenoiserModel& model, const Tensor& x0_batch, const NoiseSchedule& sched, Rng& rng) {
  const std::size_t n = x0_batch.rows();
  if (x0_batch.empty() || n == 0) throw ValueError("loss_simple needs a nonempty batch");
  std::uniform_int_distribution<int> pick_t(1, sched.steps());
  const Shape single = batch_shape(1, x0_batch.sample_shape());

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const int t = pick_t(rng);
    Tensor x0(single, std::vector<double>(x0_batch.row(i).begin(), x0_batch.row(i).end()));
    Tensor eps = normal_tensor(single, rng);
    const Tensor x_t = forward_sample(x0, t, eps, sched);
    const Tensor eps_hat = model.predict_eps(x_t, t, sched);
    for (std::size_t k = 0; k < eps.size(); ++k) {
      const double diff = eps[k] - eps_hat[k];
      total += diff * diff;
    }
  }
  return total / static_cast<double>(n);
}

}  // namespace repaint

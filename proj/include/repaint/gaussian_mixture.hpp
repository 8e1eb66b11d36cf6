#pragma once

#include <Eigen/Dense>
#include <vector>

#include "repaint/denoiser.hpp"

namespace repaint {

struct GaussianComponent {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

/// Mixture of full-covariance Gaussians used as an analytic data prior.
///
/// Weights are nonnegative and sum to one within 1e-9; every covariance is
/// symmetric positive definite. Both are checked at construction.
class GaussianMixturePrior {
 public:
  GaussianMixturePrior(std::vector<double> weights, std::vector<GaussianComponent> components);

  static GaussianMixturePrior single(Eigen::VectorXd mean, Eigen::MatrixXd covariance);

  std::size_t dim() const { return static_cast<std::size_t>(components_.front().mean.size()); }
  std::size_t size() const { return components_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<GaussianComponent>& components() const { return components_; }

  // n draws, shape [n, dim].
  Tensor sample(std::size_t n, Rng& rng) const;

 private:
  std::vector<double> weights_;
  std::vector<GaussianComponent> components_;
  std::vector<Eigen::MatrixXd> cholesky_;  // lower factors of the covariances
};

/// Exact E[eps | x_t] under the prior.
///
/// With x_t = sqrt(abar) x0 + sqrt(1 - abar) eps, each component's marginal
/// is N(sqrt(abar) mu_k, abar Sigma_k + (1 - abar) I); E[x0 | x_t] mixes the
/// per-component Gaussian posterior means by their responsibilities and
/// eps_hat = (x_t - sqrt(abar) E[x0 | x_t]) / sqrt(1 - abar).
/// Rejects t = 0 (abar = 1).
Tensor gm_predict_eps(const GaussianMixturePrior& prior, const Tensor& x_t, int t, const NoiseSchedule& sched);

// E[x0 | x_t] under the prior, same shape as x_t; valid for 0 < t <= T.
Tensor gm_posterior_x0(const GaussianMixturePrior& prior, const Tensor& x_t, int t, const NoiseSchedule& sched);

class GaussianMixtureDenoiser final : public DenoiserModel {
 public:
  explicit GaussianMixtureDenoiser(GaussianMixturePrior prior) : prior_(std::move(prior)) {}

  Tensor predict_eps(const Tensor& x_t, int t, const NoiseSchedule& sched) const override {
    return gm_predict_eps(prior_, x_t, t, sched);
  }

  const GaussianMixturePrior& prior() const { return prior_; }

 private:
  GaussianMixturePrior prior_;
};

}  // namespace repaint

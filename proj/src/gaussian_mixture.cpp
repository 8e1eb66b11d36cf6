#include "repaint/gaussian_mixture.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "repaint/error.hpp"

namespace repaint {

GaussianMixturePrior::GaussianMixturePrior(std::vector<double> weights, std::vector<GaussianComponent> components)
    : weights_(std::move(weights)), components_(std::move(components)) {
  if (components_.empty()) throw ValueError("mixture needs at least one component");
  if (weights_.size() != components_.size()) throw ValueError("mixture weight count does not match components");
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw ValueError("mixture weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ValueError("mixture weights must sum to 1");

  const Eigen::Index d = components_.front().mean.size();
  if (d == 0) throw ValueError("mixture components must have positive dimension");
  for (const auto& c : components_) {
    if (c.mean.size() != d || c.covariance.rows() != d || c.covariance.cols() != d) {
      throw ShapeError("mixture component dimensions disagree");
    }
    if (!c.covariance.isApprox(c.covariance.transpose(), 1e-12)) {
      throw ValueError("mixture covariance is not symmetric");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(c.covariance);
    if (llt.info() != Eigen::Success) throw ValueError("mixture covariance is not positive definite");
    cholesky_.push_back(llt.matrixL());
  }
}

GaussianMixturePrior GaussianMixturePrior::single(Eigen::VectorXd mean, Eigen::MatrixXd covariance) {
  return GaussianMixturePrior({1.0}, {GaussianComponent{std::move(mean), std::move(covariance)}});
}

Tensor GaussianMixturePrior::sample(std::size_t n, Rng& rng) const {
  const auto d = static_cast<Eigen::Index>(dim());
  Tensor out({n, dim()});
  std::discrete_distribution<std::size_t> pick(weights_.begin(), weights_.end());
  Eigen::VectorXd z(d);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = components_.size() == 1 ? 0 : pick(rng);
    fill_normal(rng, std::span<double>(z.data(), static_cast<std::size_t>(d)));
    Eigen::Map<Eigen::VectorXd>(out.row(i).data(), d) = components_[k].mean + cholesky_[k] * z;
  }
  return out;
}

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// E[x0 | x_t] for every row of x_t.
RowMatrix posterior_x0(const GaussianMixturePrior& prior, const Tensor& x_t, double abar) {
  const auto d = static_cast<Eigen::Index>(prior.dim());
  if (x_t.row_size() != prior.dim()) {
    throw ShapeError("sample dimension " + std::to_string(x_t.row_size()) + " does not match prior dimension " +
                     std::to_string(prior.dim()));
  }
  const auto n = static_cast<Eigen::Index>(x_t.rows());
  const Eigen::Map<const RowMatrix> x(x_t.data(), n, d);
  const double scale = std::sqrt(abar);
  const std::size_t K = prior.size();

  std::vector<RowMatrix> means(K);
  Eigen::MatrixXd log_resp(n, static_cast<Eigen::Index>(K));
  for (std::size_t k = 0; k < K; ++k) {
    const auto& comp = prior.components()[k];
    Eigen::MatrixXd marginal = abar * comp.covariance;
    marginal.diagonal().array() += 1.0 - abar;
    Eigen::LLT<Eigen::MatrixXd> llt(marginal);
    if (llt.info() != Eigen::Success) throw NumericError("marginal covariance factorization failed");

    // residual^T, one column per sample
    Eigen::MatrixXd resid = (x.rowwise() - (scale * comp.mean).transpose()).transpose();
    Eigen::MatrixXd whitened = llt.matrixL().solve(resid);
    Eigen::MatrixXd solved = llt.matrixU().solve(whitened);  // marginal^{-1} resid
    const Eigen::MatrixXd& L = llt.matrixL();
    const double log_det = 2.0 * L.diagonal().array().log().sum();
    const double log_w = prior.weights()[k] > 0.0 ? std::log(prior.weights()[k])
                                                   : -std::numeric_limits<double>::infinity();
    log_resp.col(static_cast<Eigen::Index>(k)) =
        (log_w - 0.5 * log_det - 0.5 * whitened.colwise().squaredNorm().array()).transpose();
    means[k] = ((scale * comp.covariance * solved).colwise() + comp.mean).transpose();
  }

  if (K == 1) return means.front();

  RowMatrix out = RowMatrix::Zero(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double peak = log_resp.row(i).maxCoeff();
    Eigen::RowVectorXd resp = (log_resp.row(i).array() - peak).exp();
    resp /= resp.sum();
    for (std::size_t k = 0; k < K; ++k) out.row(i) += resp(static_cast<Eigen::Index>(k)) * means[k].row(i);
  }
  return out;
}

}  // namespace

Tensor gm_posterior_x0(const GaussianMixturePrior& prior, const Tensor& x_t, int t, const NoiseSchedule& sched) {
  sched.check_time(t);
  RowMatrix m = posterior_x0(prior, x_t, sched.alpha_bar(t));
  return Tensor(x_t.shape(), std::vector<double>(m.data(), m.data() + m.size()));
}

Tensor gm_predict_eps(const GaussianMixturePrior& prior, const Tensor& x_t, int t, const NoiseSchedule& sched) {
  sched.check_time(t);
  const double abar = sched.alpha_bar(t);
  if (!(abar < 1.0)) throw RangeError("eps prediction undefined where alpha_bar = 1");
  const RowMatrix x0 = posterior_x0(prior, x_t, abar);
  const double scale = std::sqrt(abar);
  const double inv_noise = 1.0 / std::sqrt(1.0 - abar);
  Tensor out(x_t.shape());
  const double* m = x0.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (x_t[i] - scale * m[i]) * inv_noise;
  return out;
}

}  // namespace repaint

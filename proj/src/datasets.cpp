#include "repaint/datasets.hpp"

#include <cmath>
#include <numbers>

#include "repaint/error.hpp"

namespace repaint {

Tensor two_moons(std::size_t n, double noise, Rng& rng) {
  Tensor out({n, 2});
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  std::normal_distribution<double> jitter(0.0, noise);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = angle(rng);
    auto row = out.row(i);
    if (i % 2 == 0) {
      row[0] = std::cos(a);
      row[1] = std::sin(a);
    } else {
      row[0] = 1.0 - std::cos(a);
      row[1] = 0.5 - std::sin(a);
    }
    row[0] += jitter(rng);
    row[1] += jitter(rng);
  }
  return out;
}

GaussianMixturePrior correlated_gaussian_2d(double rho) {
  if (!(std::abs(rho) < 1.0)) throw ValueError("correlation must be in (-1, 1)");
  Eigen::MatrixXd cov(2, 2);
  cov << 1.0, rho, rho, 1.0;
  return GaussianMixturePrior::single(Eigen::VectorXd::Zero(2), cov);
}

GaussianMixturePrior toy_image_prior(std::size_t height, std::size_t width) {
  if (height == 0 || width == 0) throw ValueError("image prior needs positive dimensions");
  const auto d = static_cast<Eigen::Index>(height * width);
  const auto coord = [&](Eigen::Index i) {
    return std::pair<double, double>(static_cast<double>(i / static_cast<Eigen::Index>(width)),
                                     static_cast<double>(i % static_cast<Eigen::Index>(width)));
  };
  const double span_y = std::max<double>(1.0, static_cast<double>(height - 1));
  const double span_x = std::max<double>(1.0, static_cast<double>(width - 1));

  Eigen::MatrixXd kernel(d, d);
  const double length = 0.25 * static_cast<double>(std::max(height, width));
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      const auto [ya, xa] = coord(a);
      const auto [yb, xb] = coord(b);
      const double r2 = (ya - yb) * (ya - yb) + (xa - xb) * (xa - xb);
      kernel(a, b) = 0.04 * std::exp(-0.5 * r2 / (length * length));
    }
  }
  kernel.diagonal().array() += 0.01;

  Eigen::VectorXd ramp_x(d), ramp_y(d), blob(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const auto [y, x] = coord(i);
    ramp_x(i) = 1.6 * x / span_x - 0.8;
    ramp_y(i) = 1.6 * y / span_y - 0.8;
    const double dy = (y - 0.5 * span_y) / (0.3 * span_y + 0.5);
    const double dx = (x - 0.5 * span_x) / (0.3 * span_x + 0.5);
    blob(i) = 1.4 * std::exp(-0.5 * (dx * dx + dy * dy)) - 0.7;
  }
  return GaussianMixturePrior({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0},
                              {{ramp_x, kernel}, {ramp_y, kernel}, {blob, kernel}});
}

}  // namespace repaint

#pragma once

#include "repaint/gaussian_mixture.hpp"

namespace repaint {

// Two interleaved half circles in 2-D with isotropic Gaussian jitter.
Tensor two_moons(std::size_t n, double noise, Rng& rng);

/// Correlated 2-D Gaussian: zero mean, unit variances, correlation rho.
GaussianMixturePrior correlated_gaussian_2d(double rho);

/// Mixture over h x w grayscale images in [-1, 1]: a horizontal ramp, a
/// vertical ramp and a centered blob, each with smooth squared-exponential
/// pixel covariance. Flattened dimension h * w, row-major.
GaussianMixturePrior toy_image_prior(std::size_t height, std::size_t width);

}  // namespace repaint

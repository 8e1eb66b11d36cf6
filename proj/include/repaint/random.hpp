#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "repaint/tensor.hpp"

namespace repaint {

// All sampling takes an explicit generator; identical seeds reproduce
// identical streams within one build.
using Rng = std::mt19937_64;

inline void fill_normal(Rng& rng, std::span<double> out) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& v : out) v = normal(rng);
}

inline Tensor normal_tensor(const Shape& shape, Rng& rng) {
  Tensor out(shape);
  fill_normal(rng, out.values());
  return out;
}

}  // namespace repaint

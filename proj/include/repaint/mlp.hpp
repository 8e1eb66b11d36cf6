#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <span>
#include <vector>

#include "repaint/denoiser.hpp"

namespace repaint {

inline constexpr int kTimeFrequencies = 8;
inline constexpr std::size_t kTimeFeatures = 2 * kTimeFrequencies;

// sin/cos of t at frequencies 1000^(-k/8), k = 0..7.
Eigen::VectorXd time_features(int t);

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

/// Fully connected eps-predictor: [x, time_features(t)] -> tanh hidden
/// layers -> linear output of the data dimension.
class MlpDenoiser final : public DenoiserModel {
 public:
  // Zero-initialized parameters.
  MlpDenoiser(std::size_t data_dim, std::vector<std::size_t> hidden);

  // Weights ~ N(0, 1/fan_in), zero biases.
  static MlpDenoiser random(std::size_t data_dim, std::vector<std::size_t> hidden, Rng& rng);

  std::size_t data_dim() const { return data_dim_; }
  const std::vector<std::size_t>& hidden() const { return hidden_; }
  // data_dim + features, hidden..., data_dim
  std::vector<std::size_t> layer_sizes() const;
  std::size_t parameter_count() const;

  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  // Per-row diffusion times; times.size() == x_t.rows().
  Tensor forward(const Tensor& x_t, std::span<const int> times) const;

  Tensor predict_eps(const Tensor& x_t, int t, const NoiseSchedule& sched) const override;

  /// Mean over rows of ||eps - f(x_t, t)||^2 for given inputs. When `grads`
  /// is non-null it receives d loss / d parameters (resized to match layers).
  double loss_and_gradient(const Tensor& x_t, std::span<const int> times, const Tensor& eps,
                           std::vector<DenseLayer>* grads) const;

 private:
  std::size_t data_dim_;
  std::vector<std::size_t> hidden_;
  std::vector<DenseLayer> layers_;
};

Tensor mlp_forward(const MlpDenoiser& model, const Tensor& x_t, int t);

struct SgdOptions {
  double learning_rate = 1e-3;
  double momentum = 0.0;
};

// Momentum buffers; empty until the first step.
struct SgdState {
  std::vector<DenseLayer> velocity;
};

struct TrainStepResult {
  double loss;
};

/// One SGD step on L_simple for a batch of clean samples. Draws one t per row
/// uniformly from {1..T}. Throws NumericError, leaving the model untouched,
/// when the loss or any gradient entry is non-finite.
TrainStepResult train_step(MlpDenoiser& model, const Tensor& x0_batch, const NoiseSchedule& sched,
                           const SgdOptions& options, SgdState& state, Rng& rng);

/// Checkpoint layout (all integers little-endian):
///   "RPMLPCKP" | u32 version=1 | u32 time frequencies |
///   u64 layer count L | u64 sizes[L] (input data dim, hidden..., output) |
///   u64 tensor count | per tensor: u64 rank, u64 dims[rank], f64 data (row-major)
/// Tensors are stored as weight_0, bias_0, weight_1, bias_1, ...
void save_checkpoint(const MlpDenoiser& model, const std::filesystem::path& path);
MlpDenoiser load_checkpoint(const std::filesystem::path& path);

}  // namespace repaint

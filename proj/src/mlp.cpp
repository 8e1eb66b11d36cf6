#include "repaint/mlp.hpp"

#include <cmath>
#include <fstream>

#include "repaint/binary_io.hpp"
#include "repaint/error.hpp"

namespace repaint {

namespace {

constexpr char kCheckpointMagic[] = "RPMLPCKP";
constexpr std::uint32_t kCheckpointVersion = 1;

// Column k holds [x_k ; time_features(t_k)].
Eigen::MatrixXd build_input(const Tensor& x_t, std::span<const int> times, std::size_t data_dim) {
  if (x_t.row_size() != data_dim) {
    throw ShapeError("MLP expects samples of dimension " + std::to_string(data_dim) + ", got " +
                     std::to_string(x_t.row_size()));
  }
  const std::size_t n = x_t.rows();
  if (times.size() != n) throw ShapeError("one diffusion time per row expected");
  const auto d = static_cast<Eigen::Index>(data_dim);
  Eigen::MatrixXd input(d + static_cast<Eigen::Index>(kTimeFeatures), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    input.col(col).head(d) = Eigen::Map<const Eigen::VectorXd>(x_t.row(i).data(), d);
    input.col(col).tail(static_cast<Eigen::Index>(kTimeFeatures)) = time_features(times[i]);
  }
  return input;
}

Tensor to_tensor(const Eigen::MatrixXd& columns, const Shape& shape) {
  Tensor out(shape);
  const auto n = columns.cols();
  for (Eigen::Index i = 0; i < n; ++i) {
    auto row = out.row(static_cast<std::size_t>(i));
    Eigen::Map<Eigen::VectorXd>(row.data(), columns.rows()) = columns.col(i);
  }
  return out;
}

}  // namespace

Eigen::VectorXd time_features(int t) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(kTimeFeatures));
  for (int k = 0; k < kTimeFrequencies; ++k) {
    const double freq = std::pow(1000.0, -static_cast<double>(k) / kTimeFrequencies);
    out(2 * k) = std::sin(freq * t);
    out(2 * k + 1) = std::cos(freq * t);
  }
  return out;
}

MlpDenoiser::MlpDenoiser(std::size_t data_dim, std::vector<std::size_t> hidden)
    : data_dim_(data_dim), hidden_(std::move(hidden)) {
  if (data_dim_ == 0) throw ValueError("MLP data dimension must be positive");
  const auto sizes = layer_sizes();
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    if (sizes[l + 1] == 0) throw ValueError("MLP layer sizes must be positive");
    const auto in = static_cast<Eigen::Index>(sizes[l]);
    const auto out = static_cast<Eigen::Index>(sizes[l + 1]);
    layers_.push_back({Eigen::MatrixXd::Zero(out, in), Eigen::VectorXd::Zero(out)});
  }
}

MlpDenoiser MlpDenoiser::random(std::size_t data_dim, std::vector<std::size_t> hidden, Rng& rng) {
  MlpDenoiser model(data_dim, std::move(hidden));
  for (auto& layer : model.layers_) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(layer.weight.cols()));
    fill_normal(rng, std::span<double>(layer.weight.data(), static_cast<std::size_t>(layer.weight.size())));
    layer.weight *= scale;
  }
  return model;
}

std::vector<std::size_t> MlpDenoiser::layer_sizes() const {
  std::vector<std::size_t> sizes{data_dim_ + kTimeFeatures};
  sizes.insert(sizes.end(), hidden_.begin(), hidden_.end());
  sizes.push_back(data_dim_);
  return sizes;
}

std::size_t MlpDenoiser::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers_) n += static_cast<std::size_t>(layer.weight.size() + layer.bias.size());
  return n;
}

Tensor MlpDenoiser::forward(const Tensor& x_t, std::span<const int> times) const {
  Eigen::MatrixXd h = build_input(x_t, times, data_dim_);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::MatrixXd z = (layers_[l].weight * h).colwise() + layers_[l].bias;
    h = l + 1 < layers_.size() ? Eigen::MatrixXd(z.array().tanh()) : std::move(z);
  }
  return to_tensor(h, x_t.shape());
}

Tensor MlpDenoiser::predict_eps(const Tensor& x_t, int t, const NoiseSchedule& sched) const {
  sched.check_time(t);
  return mlp_forward(*this, x_t, t);
}

double MlpDenoiser::loss_and_gradient(const Tensor& x_t, std::span<const int> times, const Tensor& eps,
                                      std::vector<DenseLayer>* grads) const {
  require_same_shape(x_t, eps, "MLP loss");
  const std::size_t n = x_t.rows();
  if (n == 0) throw ValueError("empty batch");

  std::vector<Eigen::MatrixXd> activations;  // activations[l] feeds layer l
  activations.push_back(build_input(x_t, times, data_dim_));
  Eigen::MatrixXd out;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::MatrixXd z = (layers_[l].weight * activations.back()).colwise() + layers_[l].bias;
    if (l + 1 < layers_.size()) {
      activations.emplace_back(z.array().tanh());
    } else {
      out = std::move(z);
    }
  }

  // Row-major [n, d] storage is column-major d x n.
  const Eigen::Map<const Eigen::MatrixXd> target(eps.data(), static_cast<Eigen::Index>(data_dim_),
                                                 static_cast<Eigen::Index>(n));
  const Eigen::MatrixXd diff = out - target;
  const double inv_n = 1.0 / static_cast<double>(n);
  const double loss = diff.squaredNorm() * inv_n;
  if (grads == nullptr) return loss;

  grads->resize(layers_.size());
  Eigen::MatrixXd delta = 2.0 * inv_n * diff;  // d loss / d pre-activation of the current layer
  for (std::size_t l = layers_.size(); l-- > 0;) {
    (*grads)[l].weight = delta * activations[l].transpose();
    (*grads)[l].bias = delta.rowwise().sum();
    if (l > 0) {
      const Eigen::MatrixXd& h = activations[l];
      delta = ((layers_[l].weight.transpose() * delta).array() * (1.0 - h.array().square())).matrix();
    }
  }
  return loss;
}

Tensor mlp_forward(const MlpDenoiser& model, const Tensor& x_t, int t) {
  const std::vector<int> times(x_t.rows(), t);
  return model.forward(x_t, times);
}

TrainStepResult train_step(MlpDenoiser& model, const Tensor& x0_batch, const NoiseSchedule& sched,
                           const SgdOptions& options, SgdState& state, Rng& rng) {
  const std::size_t n = x0_batch.rows();
  if (x0_batch.empty() || n == 0) throw ValueError("train_step needs a nonempty batch");
  for (const auto& layer : model.layers()) {
    if (!layer.weight.allFinite() || !layer.bias.allFinite()) throw NumericError("model has non-finite parameters");
  }

  std::uniform_int_distribution<int> pick_t(1, sched.steps());
  std::vector<int> times(n);
  Tensor eps(x0_batch.shape());
  Tensor x_t(x0_batch.shape());
  for (std::size_t i = 0; i < n; ++i) {
    times[i] = pick_t(rng);
    auto e = eps.row(i);
    fill_normal(rng, e);
    const double keep = std::sqrt(sched.alpha_bar(times[i]));
    const double add = std::sqrt(1.0 - sched.alpha_bar(times[i]));
    auto x0 = x0_batch.row(i);
    auto xt = x_t.row(i);
    for (std::size_t k = 0; k < xt.size(); ++k) xt[k] = keep * x0[k] + add * e[k];
  }

  std::vector<DenseLayer> grads;
  const double loss = model.loss_and_gradient(x_t, times, eps, &grads);
  if (!std::isfinite(loss)) throw NumericError("non-finite training loss");
  for (std::size_t l = 0; l < grads.size(); ++l) {
    if (!grads[l].weight.allFinite() || !grads[l].bias.allFinite()) {
      throw NumericError("non-finite gradient in layer " + std::to_string(l));
    }
  }

  auto& layers = model.layers();
  if (state.velocity.size() != layers.size()) {
    state.velocity.clear();
    for (const auto& layer : layers) {
      state.velocity.push_back({Eigen::MatrixXd::Zero(layer.weight.rows(), layer.weight.cols()),
                                Eigen::VectorXd::Zero(layer.bias.size())});
    }
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto& v = state.velocity[l];
    v.weight = options.momentum * v.weight + grads[l].weight;
    v.bias = options.momentum * v.bias + grads[l].bias;
    layers[l].weight -= options.learning_rate * v.weight;
    layers[l].bias -= options.learning_rate * v.bias;
  }
  return {loss};
}

void save_checkpoint(const MlpDenoiser& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open checkpoint for writing: " + path.string());
  out.write(kCheckpointMagic, 8);
  binary::write_u32(out, kCheckpointVersion);
  binary::write_u32(out, static_cast<std::uint32_t>(kTimeFrequencies));
  const auto sizes = model.layer_sizes();
  binary::write_u64(out, sizes.size());
  // The stored input size is the data dimension; time features are implied.
  binary::write_u64(out, model.data_dim());
  for (std::size_t i = 1; i < sizes.size(); ++i) binary::write_u64(out, sizes[i]);

  binary::write_u64(out, 2 * model.layers().size());
  for (const auto& layer : model.layers()) {
    binary::write_u64(out, 2);
    binary::write_u64(out, static_cast<std::uint64_t>(layer.weight.rows()));
    binary::write_u64(out, static_cast<std::uint64_t>(layer.weight.cols()));
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) binary::write_f64(out, layer.weight(r, c));
    }
    binary::write_u64(out, 1);
    binary::write_u64(out, static_cast<std::uint64_t>(layer.bias.size()));
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) binary::write_f64(out, layer.bias(r));
  }
  if (!out) throw IoError("failed writing checkpoint: " + path.string());
}

MlpDenoiser load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path.string());
  binary::expect_magic(in, kCheckpointMagic, 8, "checkpoint");
  const auto version = binary::read_u32(in, "checkpoint version");
  if (version != kCheckpointVersion) throw IoError("unsupported checkpoint version " + std::to_string(version));
  const auto freqs = binary::read_u32(in, "time frequencies");
  if (freqs != static_cast<std::uint32_t>(kTimeFrequencies)) throw IoError("checkpoint time embedding mismatch");
  const auto count = binary::read_u64(in, "layer count");
  if (count < 2 || count > 1024) throw IoError("implausible checkpoint layer count");
  std::vector<std::size_t> sizes(count);
  for (auto& s : sizes) s = binary::read_u64(in, "layer size");
  if (sizes.front() != sizes.back()) throw IoError("checkpoint input and output dimensions differ");

  MlpDenoiser model(sizes.front(), std::vector<std::size_t>(sizes.begin() + 1, sizes.end() - 1));
  const auto tensors = binary::read_u64(in, "tensor count");
  if (tensors != 2 * model.layers().size()) throw IoError("checkpoint tensor count does not match architecture");

  const auto read_shape = [&](std::uint64_t rank, std::initializer_list<Eigen::Index> expected) {
    if (binary::read_u64(in, "tensor rank") != rank) throw IoError("checkpoint tensor rank mismatch");
    for (Eigen::Index e : expected) {
      if (binary::read_u64(in, "tensor dim") != static_cast<std::uint64_t>(e)) {
        throw IoError("checkpoint tensor shape mismatch");
      }
    }
  };
  for (auto& layer : model.layers()) {
    read_shape(2, {layer.weight.rows(), layer.weight.cols()});
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = binary::read_f64(in, "weight");
    }
    read_shape(1, {layer.bias.size()});
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = binary::read_f64(in, "bias");
  }
  return model;
}

}  // namespace repaint

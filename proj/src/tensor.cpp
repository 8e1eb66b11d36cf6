#include "repaint/tensor.hpp"

#include <cmath>
#include <functional>
#include <numeric>

#include "repaint/error.hpp"

namespace repaint {

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i != 0) out += ", ";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)), data_(shape_size(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != shape_size(shape_)) {
    throw ShapeError("tensor data size " + std::to_string(data_.size()) + " does not match shape " +
                     shape_string(shape_));
  }
}

std::size_t Tensor::dim(std::size_t axis) const {
  if (axis >= shape_.size()) throw RangeError("tensor axis out of range");
  return shape_[axis];
}

std::size_t Tensor::rows() const {
  if (shape_.size() <= 1) return 1;
  return shape_[0];
}

std::size_t Tensor::row_size() const {
  const std::size_t n = rows();
  return n == 0 ? 0 : data_.size() / n;
}

std::span<double> Tensor::row(std::size_t i) {
  const std::size_t width = row_size();
  return std::span<double>(data_).subspan(i * width, width);
}

std::span<const double> Tensor::row(std::size_t i) const {
  const std::size_t width = row_size();
  return std::span<const double>(data_).subspan(i * width, width);
}

Shape Tensor::sample_shape() const {
  if (shape_.size() <= 1) return shape_;
  return Shape(shape_.begin() + 1, shape_.end());
}

Tensor Tensor::reshaped(Shape shape) const {
  if (shape_size(shape) != data_.size()) {
    throw ShapeError("cannot reshape " + shape_string(shape_) + " to " + shape_string(shape));
  }
  return Tensor(std::move(shape), data_);
}

bool Tensor::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Shape batch_shape(std::size_t n, const Shape& sample_shape) {
  Shape out;
  out.reserve(sample_shape.size() + 1);
  out.push_back(n);
  out.insert(out.end(), sample_shape.begin(), sample_shape.end());
  return out;
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(what) + ": shape " + shape_string(a.shape()) + " vs " +
                     shape_string(b.shape()));
  }
}

}  // namespace repaint

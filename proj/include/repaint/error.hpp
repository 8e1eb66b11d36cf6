#pragma once

#include <stdexcept>
#include <string>

namespace repaint {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor shapes disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A diffusion time or index outside its valid range.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Invalid parameter value (non-binary mask, bad schedule endpoints, ...).
class ValueError : public Error {
 public:
  using Error::Error;
};

// Non-finite latent or gradient.
class NumericError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace repaint

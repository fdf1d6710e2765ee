#include "rrlab/numcore/tensor.hpp"

#include <cmath>

#include "rrlab/errors.hpp"

namespace rrlab::numcore {

namespace {
int64_t checked_numel(const std::vector<int64_t>& shape) {
  int64_t n = 1;
  for (int64_t d : shape) {
    if (d <= 0) throw DimensionError("tensor dimensions must be positive");
    n *= d;
  }
  return n;
}
}  // namespace

Tensor::Tensor(std::vector<int64_t> shape) : shape_(std::move(shape)) {
  values_.assign(static_cast<size_t>(checked_numel(shape_)), 0.0);
}

Tensor Tensor::full(std::vector<int64_t> shape, double value) {
  Tensor t(std::move(shape));
  t.fill(value);
  return t;
}

Tensor Tensor::scalar(double value) { return full({1}, value); }

Tensor Tensor::vector(std::vector<double> values) {
  Tensor t;
  t.shape_ = {static_cast<int64_t>(values.size())};
  t.values_ = std::move(values);
  if (t.values_.empty()) throw DimensionError("tensor cannot be empty");
  return t;
}

Tensor Tensor::matrix(int64_t rows, int64_t cols, std::vector<double> values) {
  if (static_cast<int64_t>(values.size()) != rows * cols)
    throw DimensionError("matrix data size does not match " + std::to_string(rows) + "x" +
                         std::to_string(cols));
  Tensor t;
  t.shape_ = {rows, cols};
  t.values_ = std::move(values);
  return t;
}

Tensor Tensor::uniform(std::vector<int64_t> shape, double lo, double hi, Rng& rng) {
  Tensor t(std::move(shape));
  for (double& v : t.values_) v = rng.next_in(lo, hi);
  return t;
}

Tensor Tensor::glorot(int64_t fan_out, int64_t fan_in, Rng& rng) {
  double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  return uniform({fan_out, fan_in}, -limit, limit, rng);
}

bool Tensor::all_finite() const {
  for (double v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

void Tensor::fill(double value) {
  for (double& v : values_) v = value;
}

std::string Tensor::shape_str() const {
  std::string s = "[";
  for (size_t i = 0; i < shape_.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape_[i]);
  }
  return s + "]";
}

}  // namespace rrlab::numcore

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rrlab/numcore/rng.hpp"

namespace rrlab::numcore {

/// Dense row-major tensor of 64-bit floats. Everything in the library runs
/// in double precision; there is no device or dtype dispatch.
class Tensor {
public:
  Tensor() = default;
  explicit Tensor(std::vector<int64_t> shape);

  static Tensor zeros(std::vector<int64_t> shape) { return Tensor(std::move(shape)); }
  static Tensor full(std::vector<int64_t> shape, double value);
  static Tensor scalar(double value);
  static Tensor vector(std::vector<double> values);
  static Tensor matrix(int64_t rows, int64_t cols, std::vector<double> values);
  // Uniform in [lo, hi), drawn row-major.
  static Tensor uniform(std::vector<int64_t> shape, double lo, double hi, Rng& rng);
  // Xavier/Glorot uniform for a dense weight matrix [fan_out x fan_in].
  static Tensor glorot(int64_t fan_out, int64_t fan_in, Rng& rng);

  const std::vector<int64_t>& shape() const { return shape_; }
  int64_t rank() const { return static_cast<int64_t>(shape_.size()); }
  int64_t dim(int64_t i) const { return shape_[static_cast<size_t>(i)]; }
  int64_t numel() const { return static_cast<int64_t>(values_.size()); }
  bool is_scalar() const { return values_.size() == 1; }

  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  double& operator[](int64_t i) { return values_[static_cast<size_t>(i)]; }
  double operator[](int64_t i) const { return values_[static_cast<size_t>(i)]; }
  // Rank-2 access.
  double& at(int64_t r, int64_t c) { return values_[static_cast<size_t>(r * shape_[1] + c)]; }
  double at(int64_t r, int64_t c) const { return values_[static_cast<size_t>(r * shape_[1] + c)]; }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
  bool all_finite() const;
  void fill(double value);
  std::string shape_str() const;

  bool operator==(const Tensor& other) const = default;

private:
  std::vector<int64_t> shape_;
  std::vector<double> values_;
};

}  // namespace rrlab::numcore

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rrlab/numcore/tensor.hpp"

namespace rrlab::numcore {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias correction. Moment accumulators are zero-initialized and
/// keyed by parameter position, so the caller must pass parameters in a
/// stable order on every step.
class AdamState {
public:
  AdamState() = default;
  explicit AdamState(AdamConfig cfg) : cfg_(cfg) {}

  const AdamConfig& config() const { return cfg_; }
  int64_t step_count() const { return t_; }

  // One update. params and grads must line up elementwise; zero gradients
  // leave parameters untouched (for any t).
  void step(std::span<Tensor* const> params, std::span<const Tensor* const> grads);

  // Serialization access.
  std::vector<Tensor>& first_moments() { return m_; }
  std::vector<Tensor>& second_moments() { return v_; }
  const std::vector<Tensor>& first_moments() const { return m_; }
  const std::vector<Tensor>& second_moments() const { return v_; }
  void set_step_count(int64_t t) { t_ = t; }

private:
  AdamConfig cfg_;
  int64_t t_ = 0;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
};

}  // namespace rrlab::numcore

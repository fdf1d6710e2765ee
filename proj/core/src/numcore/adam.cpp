#include "rrlab/numcore/adam.hpp"

#include <cmath>

#include "rrlab/errors.hpp"

namespace rrlab::numcore {

void AdamState::step(std::span<Tensor* const> params, std::span<const Tensor* const> grads) {
  if (params.size() != grads.size())
    throw DimensionError("adam: parameter/gradient count mismatch");
  if (m_.empty()) {
    m_.reserve(params.size());
    v_.reserve(params.size());
    for (const Tensor* p : params) {
      m_.push_back(Tensor::zeros(p->shape()));
      v_.push_back(Tensor::zeros(p->shape()));
    }
  }
  if (m_.size() != params.size())
    throw DimensionError("adam: parameter count changed between steps");

  ++t_;
  double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (size_t k = 0; k < params.size(); ++k) {
    Tensor& p = *params[k];
    const Tensor& g = *grads[k];
    Tensor& m = m_[k];
    Tensor& v = v_[k];
    if (!p.same_shape(g) || !p.same_shape(m))
      throw DimensionError("adam: shape mismatch at parameter " + std::to_string(k) + ": " +
                           p.shape_str() + " vs " + g.shape_str());
    for (int64_t i = 0; i < p.numel(); ++i) {
      double gi = g[i];
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * gi;
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * gi * gi;
      double mhat = m[i] / bc1;
      double vhat = v[i] / bc2;
      p[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
  }
}

}  // namespace rrlab::numcore

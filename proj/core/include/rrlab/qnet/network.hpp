#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rrlab/numcore/graph.hpp"
#include "rrlab/numcore/rng.hpp"
#include "rrlab/numcore/tensor.hpp"
#include "rrlab/qnet/support.hpp"

namespace rrlab::qnet {

enum class HeadKind { kScalar, kDueling, kCategorical, kDuelingCategorical };

/// Parameters of one dense layer. For noisy layers the effective weights are
/// mu + sigma (*) eps with eps resampled from factored Gaussian noise;
/// with eps = 0 the layer collapses to a plain dense layer with weights mu.
struct DenseLayer {
  numcore::Tensor w_mu;     // [out x in]
  numcore::Tensor b_mu;     // [out]
  bool noisy = false;
  numcore::Tensor w_sigma;  // empty unless noisy
  numcore::Tensor b_sigma;
  numcore::Tensor w_eps;
  numcore::Tensor b_eps;

  static DenseLayer init(int64_t out, int64_t in, bool noisy, double sigma0, numcore::Rng& rng);

  int64_t fan_out() const { return w_mu.dim(0); }
  int64_t fan_in() const { return w_mu.dim(1); }
  // Fresh factored noise: f(u) = sign(u) * sqrt(|u|) of unit Gaussians.
  void resample_noise(numcore::Rng& rng);
  void zero_noise();
};

// (mu_W + sigma_W (*) eps_W) x + (mu_b + sigma_b (*) eps_b), optionally
// resampling the layer's noise first.
std::vector<double> noisy_forward(DenseLayer& layer, std::span<const double> x, bool resample,
                                  numcore::Rng& rng);

struct NetworkSpec {
  int64_t input_dim = 0;
  std::vector<int64_t> hidden;
  int64_t actions = 0;
  HeadKind head = HeadKind::kScalar;
  bool noisy = false;
  Support support;  // categorical heads only
  double noisy_sigma0 = 0.5;
};

/// MLP value network. Scalar heads emit one value per action; categorical
/// heads emit actions * n_atoms logits laid out action-major. With the noisy
/// flag off (or noise zeroed) the forward pass is a deterministic function
/// of parameters and input.
class QNetwork {
public:
  QNetwork() = default;
  QNetwork(NetworkSpec spec, numcore::Rng& init_rng);

  const NetworkSpec& spec() const { return spec_; }
  bool categorical() const {
    return spec_.head == HeadKind::kCategorical || spec_.head == HeadKind::kDuelingCategorical;
  }
  int64_t output_width() const;

  // Records the forward pass for a [B x input_dim] batch; returns the head
  // output node ([B x actions] or [B x actions*n_atoms]). When param_nodes
  // is given it receives the parameter leaf ids aligned with params().
  numcore::NodeId forward(numcore::Graph& g, numcore::NodeId x,
                          std::vector<numcore::NodeId>* param_nodes = nullptr) const;

  // Plain forward, values only.
  numcore::Tensor head_output(const numcore::Tensor& x) const;
  // Greedy-ready action values for one observation (categorical heads:
  // expectation over the support).
  std::vector<double> q_values(std::span<const double> obs) const;
  // Per-action value distribution from a raw categorical output row.
  std::vector<double> probs_for_action(std::span<const double> output_row, int64_t action) const;
  std::vector<double> q_values_from_output_row(std::span<const double> output_row) const;

  // Stable parameter order shared by optimizer and serialization.
  std::vector<numcore::Tensor*> params();
  std::vector<const numcore::Tensor*> params() const;

  void resample_noise(numcore::Rng& rng);
  void zero_noise();

private:
  DenseLayer make_layer(int64_t out, int64_t in, numcore::Rng& rng) const;
  numcore::NodeId layer_forward(numcore::Graph& g, const DenseLayer& layer, numcore::NodeId x,
                                std::vector<numcore::NodeId>* param_nodes) const;

  NetworkSpec spec_;
  std::vector<DenseLayer> trunk_;
  DenseLayer value_head_;  // dueling heads only
  DenseLayer adv_head_;    // output head for non-dueling networks too
};

}  // namespace rrlab::qnet

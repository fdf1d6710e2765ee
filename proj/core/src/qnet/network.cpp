#include "rrlab/qnet/network.hpp"

#include <cmath>

#include "rrlab/errors.hpp"

namespace rrlab::qnet {

using numcore::Graph;
using numcore::NodeId;
using numcore::Rng;
using numcore::Tensor;

namespace {
double noise_transform(double u) { return (u < 0.0 ? -1.0 : 1.0) * std::sqrt(std::abs(u)); }
}  // namespace

DenseLayer DenseLayer::init(int64_t out, int64_t in, bool noisy, double sigma0, Rng& rng) {
  DenseLayer l;
  l.w_mu = Tensor::glorot(out, in, rng);
  l.b_mu = Tensor::zeros({out});
  l.noisy = noisy;
  if (noisy) {
    double sigma = sigma0 / std::sqrt(static_cast<double>(in));
    l.w_sigma = Tensor::full({out, in}, sigma);
    l.b_sigma = Tensor::full({out}, sigma);
    l.w_eps = Tensor::zeros({out, in});
    l.b_eps = Tensor::zeros({out});
  }
  return l;
}

void DenseLayer::resample_noise(Rng& rng) {
  if (!noisy) return;
  int64_t out = fan_out(), in = fan_in();
  std::vector<double> f_in(static_cast<size_t>(in));
  std::vector<double> f_out(static_cast<size_t>(out));
  for (auto& v : f_in) v = noise_transform(rng.next_gaussian());
  for (auto& v : f_out) v = noise_transform(rng.next_gaussian());
  for (int64_t i = 0; i < out; ++i) {
    for (int64_t j = 0; j < in; ++j)
      w_eps.at(i, j) = f_out[static_cast<size_t>(i)] * f_in[static_cast<size_t>(j)];
    b_eps[i] = f_out[static_cast<size_t>(i)];
  }
}

void DenseLayer::zero_noise() {
  if (!noisy) return;
  w_eps.fill(0.0);
  b_eps.fill(0.0);
}

std::vector<double> noisy_forward(DenseLayer& layer, std::span<const double> x, bool resample,
                                  Rng& rng) {
  if (static_cast<int64_t>(x.size()) != layer.fan_in())
    throw DimensionError("noisy_forward: input size " + std::to_string(x.size()) +
                         " does not match layer fan-in " + std::to_string(layer.fan_in()));
  if (resample) layer.resample_noise(rng);
  int64_t out = layer.fan_out(), in = layer.fan_in();
  std::vector<double> y(static_cast<size_t>(out));
  for (int64_t i = 0; i < out; ++i) {
    double acc = layer.b_mu[i];
    if (layer.noisy) acc += layer.b_sigma[i] * layer.b_eps[i];
    for (int64_t j = 0; j < in; ++j) {
      double w = layer.w_mu.at(i, j);
      if (layer.noisy) w += layer.w_sigma.at(i, j) * layer.w_eps.at(i, j);
      acc += w * x[static_cast<size_t>(j)];
    }
    y[static_cast<size_t>(i)] = acc;
  }
  return y;
}

QNetwork::QNetwork(NetworkSpec spec, Rng& init_rng) : spec_(std::move(spec)) {
  if (spec_.input_dim <= 0 || spec_.actions <= 0)
    throw ParameterError("network: input_dim and actions must be positive");
  if (categorical()) spec_.support.validate();

  int64_t prev = spec_.input_dim;
  for (int64_t h : spec_.hidden) {
    trunk_.push_back(make_layer(h, prev, init_rng));
    prev = h;
  }
  int64_t atoms = categorical() ? spec_.support.n_atoms : 1;
  bool dueling = spec_.head == HeadKind::kDueling || spec_.head == HeadKind::kDuelingCategorical;
  if (dueling) {
    value_head_ = make_layer(atoms, prev, init_rng);
    adv_head_ = make_layer(spec_.actions * atoms, prev, init_rng);
  } else {
    adv_head_ = make_layer(spec_.actions * atoms, prev, init_rng);
  }
}

DenseLayer QNetwork::make_layer(int64_t out, int64_t in, Rng& rng) const {
  return DenseLayer::init(out, in, spec_.noisy, spec_.noisy_sigma0, rng);
}

int64_t QNetwork::output_width() const {
  return spec_.actions * (categorical() ? spec_.support.n_atoms : 1);
}

NodeId QNetwork::layer_forward(Graph& g, const DenseLayer& layer, NodeId x,
                               std::vector<NodeId>* param_nodes) const {
  NodeId w_mu = g.leaf(layer.w_mu, true);
  NodeId b_mu = g.leaf(layer.b_mu, true);
  if (param_nodes) {
    param_nodes->push_back(w_mu);
    param_nodes->push_back(b_mu);
  }
  NodeId w = w_mu;
  NodeId b = b_mu;
  if (layer.noisy) {
    NodeId w_sigma = g.leaf(layer.w_sigma, true);
    NodeId b_sigma = g.leaf(layer.b_sigma, true);
    if (param_nodes) {
      param_nodes->push_back(w_sigma);
      param_nodes->push_back(b_sigma);
    }
    w = g.add(w_mu, g.mul(w_sigma, g.leaf(layer.w_eps)));
    b = g.add(b_mu, g.mul(b_sigma, g.leaf(layer.b_eps)));
  }
  return g.dense(w, b, x);
}

NodeId QNetwork::forward(Graph& g, NodeId x, std::vector<NodeId>* param_nodes) const {
  if (g.value(x).rank() != 2)
    throw DimensionError("network forward expects a [B x input_dim] batch");
  NodeId h = x;
  for (const DenseLayer& layer : trunk_) h = g.relu(layer_forward(g, layer, h, param_nodes));
  bool dueling = spec_.head == HeadKind::kDueling || spec_.head == HeadKind::kDuelingCategorical;
  int64_t atoms = categorical() ? spec_.support.n_atoms : 1;
  if (!dueling) return layer_forward(g, adv_head_, h, param_nodes);
  NodeId v = layer_forward(g, value_head_, h, param_nodes);
  NodeId a = layer_forward(g, adv_head_, h, param_nodes);
  return g.dueling_combine(v, a, atoms);
}

Tensor QNetwork::head_output(const Tensor& x) const {
  Graph g;
  NodeId out = forward(g, g.leaf(x));
  return g.value(out);
}

std::vector<double> QNetwork::q_values_from_output_row(std::span<const double> row) const {
  if (!categorical()) return {row.begin(), row.end()};
  std::vector<double> q(static_cast<size_t>(spec_.actions));
  for (int64_t a = 0; a < spec_.actions; ++a)
    q[static_cast<size_t>(a)] = spec_.support.expectation(probs_for_action(row, a));
  return q;
}

std::vector<double> QNetwork::probs_for_action(std::span<const double> row, int64_t action) const {
  int64_t n = spec_.support.n_atoms;
  std::span<const double> block = row.subspan(static_cast<size_t>(action * n),
                                              static_cast<size_t>(n));
  double mx = block[0];
  for (double v : block) mx = std::max(mx, v);
  std::vector<double> p(block.begin(), block.end());
  double sum = 0.0;
  for (double& v : p) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double& v : p) v /= sum;
  return p;
}

std::vector<double> QNetwork::q_values(std::span<const double> obs) const {
  if (static_cast<int64_t>(obs.size()) != spec_.input_dim)
    throw DimensionError("q_values: observation size mismatch");
  Tensor x = Tensor::matrix(1, spec_.input_dim, {obs.begin(), obs.end()});
  Tensor out = head_output(x);
  return q_values_from_output_row(out.values());
}

std::vector<Tensor*> QNetwork::params() {
  std::vector<Tensor*> p;
  auto collect = [&p](DenseLayer& l) {
    if (l.w_mu.numel() == 0) return;
    p.push_back(&l.w_mu);
    p.push_back(&l.b_mu);
    if (l.noisy) {
      p.push_back(&l.w_sigma);
      p.push_back(&l.b_sigma);
    }
  };
  for (DenseLayer& l : trunk_) collect(l);
  collect(value_head_);
  collect(adv_head_);
  return p;
}

std::vector<const Tensor*> QNetwork::params() const {
  auto mut = const_cast<QNetwork*>(this)->params();
  return {mut.begin(), mut.end()};
}

void QNetwork::resample_noise(Rng& rng) {
  for (DenseLayer& l : trunk_) l.resample_noise(rng);
  value_head_.resample_noise(rng);
  adv_head_.resample_noise(rng);
}

void QNetwork::zero_noise() {
  for (DenseLayer& l : trunk_) l.zero_noise();
  value_head_.zero_noise();
  adv_head_.zero_noise();
}

}  // namespace rrlab::qnet

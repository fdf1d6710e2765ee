#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rrlab/errors.hpp"
#include "rrlab/numcore/adam.hpp"
#include "rrlab/numcore/graph.hpp"
#include "rrlab/numcore/rng.hpp"
#include "rrlab/numcore/tensor.hpp"
#include "support/oracles.hpp"

using namespace rrlab;
using numcore::Graph;
using numcore::NodeId;
using numcore::Rng;
using numcore::Tensor;

TEST_CASE("tensor shape bookkeeping") {
  Tensor t = Tensor::zeros({2, 3});
  CHECK(t.numel() == 6);
  CHECK(t.shape_str() == "[2x3]");
  CHECK_THROWS_AS(Tensor::zeros({2, 0}), DimensionError);
  CHECK_THROWS_AS(Tensor::matrix(2, 2, {1.0, 2.0, 3.0}), DimensionError);
}

TEST_CASE("dense forward identity case") {
  Graph g;
  NodeId w = g.leaf(Tensor::matrix(2, 2, {1, 0, 0, 1}));
  NodeId b = g.leaf(Tensor::vector({0, 0}));
  NodeId x = g.leaf(Tensor::vector({3, -1}));
  NodeId y = g.dense(w, b, x);
  CHECK(g.value(y)[0] == 3.0);
  CHECK(g.value(y)[1] == -1.0);
}

TEST_CASE("dense forward hand-computed product") {
  Graph g;
  NodeId w = g.leaf(Tensor::matrix(2, 2, {1, 2, 3, 4}));
  NodeId b = g.leaf(Tensor::vector({1, 1}));
  NodeId x = g.leaf(Tensor::vector({1, 1}));
  NodeId y = g.dense(w, b, x);
  CHECK(g.value(y)[0] == doctest::Approx(4.0));
  CHECK(g.value(y)[1] == doctest::Approx(8.0));
}

TEST_CASE("dense forward zero weights pass the bias through") {
  Graph g;
  NodeId w = g.leaf(Tensor::matrix(1, 3, {0, 0, 0}));
  NodeId b = g.leaf(Tensor::vector({5}));
  NodeId x = g.leaf(Tensor::vector({7, -2, 9}));
  CHECK(g.value(g.dense(w, b, x))[0] == 5.0);
}

TEST_CASE("dense shape mismatch names both shapes") {
  Graph g;
  NodeId w = g.leaf(Tensor::matrix(2, 3, {1, 2, 3, 4, 5, 6}));
  NodeId b = g.leaf(Tensor::vector({0, 0}));
  NodeId x = g.leaf(Tensor::vector({1, 1}));
  try {
    g.dense(w, b, x);
    FAIL("expected DimensionError");
  } catch (const DimensionError& e) {
    std::string msg = e.what();
    CHECK(msg.find("[2x3]") != std::string::npos);
    CHECK(msg.find("[2]") != std::string::npos);
  }
}

TEST_CASE("relu clamps negatives and keeps positives") {
  Graph g;
  NodeId y = g.relu(g.leaf(Tensor::vector({-1, 0, 2})));
  CHECK(g.value(y)[0] == 0.0);
  CHECK(g.value(y)[1] == 0.0);
  CHECK(g.value(y)[2] == 2.0);

  NodeId all_neg = g.relu(g.leaf(Tensor::vector({-5, -0.1, -2})));
  for (double v : g.value(all_neg).values()) CHECK(v == 0.0);

  NodeId all_pos = g.relu(g.leaf(Tensor::vector({5, 0.1, 2})));
  CHECK(g.value(all_pos)[0] == 5.0);
  CHECK(g.value(all_pos)[2] == 2.0);
}

TEST_CASE("backward on a linear product") {
  Graph g;
  NodeId w = g.leaf(Tensor::vector({3}), true);
  NodeId x = g.leaf(Tensor::vector({2}));
  NodeId loss = g.reduce_sum(g.mul(w, x));
  g.backward(loss);
  CHECK(g.grad(w)[0] == 2.0);
  // Plain inputs stay untouched.
  CHECK(g.grad(x).numel() == 0);
}

TEST_CASE("backward through relu uses zero subgradient at zero") {
  Graph g;
  NodeId x = g.leaf(Tensor::vector({-1, 4}), true);
  g.backward(g.reduce_sum(g.relu(x)));
  CHECK(g.grad(x)[0] == 0.0);
  CHECK(g.grad(x)[1] == 1.0);
}

TEST_CASE("backward rejects non-scalar loss") {
  Graph g;
  NodeId x = g.leaf(Tensor::vector({1, 2}), true);
  NodeId y = g.relu(x);
  CHECK_THROWS_AS(g.backward(y), ContractViolation);
}

namespace {

// Builds a 2-layer MLP loss from a flat parameter vector so the finite
// difference oracle can drive it. Layout: W1 [3x2], b1 [3], W2 [1x3] = 11
// parameters plus bias b2 [1] = 12.
double mlp_loss(const std::vector<double>& theta, const std::vector<double>& input,
                Graph* out_graph = nullptr, std::vector<NodeId>* out_params = nullptr) {
  Graph local;
  Graph& g = out_graph ? *out_graph : local;
  NodeId w1 = g.leaf(Tensor::matrix(3, 2, {theta.begin(), theta.begin() + 6}), true);
  NodeId b1 = g.leaf(Tensor::vector({theta[6], theta[7], theta[8]}), true);
  NodeId w2 = g.leaf(Tensor::matrix(1, 3, {theta[9], theta[10], theta[11]}), true);
  NodeId b2 = g.leaf(Tensor::vector({0.0}));
  NodeId x = g.leaf(Tensor::matrix(1, 2, {input[0], input[1]}));
  NodeId h = g.relu(g.dense(w1, b1, x));
  NodeId y = g.dense(w2, b2, h);
  NodeId loss = g.reduce_mean(g.huber(y, 1.0));
  if (out_params) *out_params = {w1, b1, w2};
  g.backward(loss);
  return g.value(loss)[0];
}

}  // namespace

TEST_CASE("gradient check: 12-parameter MLP vs central differences") {
  Rng rng(7);
  std::vector<double> input = {0.8, -0.4};
  std::vector<double> theta(12);
  for (double& v : theta) v = rng.next_in(-1.0, 1.0);

  Graph g;
  std::vector<NodeId> params;
  mlp_loss(theta, input, &g, &params);
  std::vector<double> ad;
  for (NodeId id : params)
    for (double v : g.grad(id).values()) ad.push_back(v);

  auto fd = oracles::finite_diff(
      [&input](const std::vector<double>& th) { return mlp_loss(th, input); }, theta, 1e-5);

  REQUIRE(ad.size() == fd.size());
  double worst = 0.0;
  for (size_t i = 0; i < ad.size(); ++i) worst = std::max(worst, oracles::rel_err(ad[i], fd[i]));
  CHECK(worst < 1e-4);
}

TEST_CASE("gradient check: softmax, gather and dueling paths") {
  Rng rng(123);
  for (int trial = 0; trial < 10; ++trial) {
    // 2 inputs -> 4 hidden -> dueling over 3 actions, cross-entropy loss.
    std::vector<double> theta(2 * 4 + 4 + 4 * 1 + 1 + 4 * 3 + 3);
    for (double& v : theta) v = rng.next_in(-0.8, 0.8);
    std::vector<double> input = {rng.next_in(-1, 1), rng.next_in(-1, 1)};

    auto build = [&input](const std::vector<double>& th, Graph* gp,
                          std::vector<NodeId>* pp) -> double {
      Graph local;
      Graph& g = gp ? *gp : local;
      size_t off = 0;
      auto take = [&th, &off](size_t n) {
        std::vector<double> v(th.begin() + static_cast<long>(off),
                              th.begin() + static_cast<long>(off + n));
        off += n;
        return v;
      };
      NodeId w1 = g.leaf(Tensor::matrix(4, 2, take(8)), true);
      NodeId b1 = g.leaf(Tensor::vector(take(4)), true);
      NodeId wv = g.leaf(Tensor::matrix(1, 4, take(4)), true);
      NodeId bv = g.leaf(Tensor::vector(take(1)), true);
      NodeId wa = g.leaf(Tensor::matrix(3, 4, take(12)), true);
      NodeId ba = g.leaf(Tensor::vector(take(3)), true);
      NodeId x = g.leaf(Tensor::matrix(1, 2, {input[0], input[1]}));
      NodeId h = g.relu(g.dense(w1, b1, x));
      NodeId q = g.dueling_combine(g.dense(wv, bv, h), g.dense(wa, ba, h), 1);
      NodeId logp = g.log_softmax_rows(q);
      NodeId target = g.leaf(Tensor::matrix(1, 3, {0.2, 0.5, 0.3}));
      NodeId loss = g.scale(g.reduce_sum(g.mul(target, logp)), -1.0);
      if (pp) *pp = {w1, b1, wv, bv, wa, ba};
      g.backward(loss);
      return g.value(loss)[0];
    };

    Graph g;
    std::vector<NodeId> params;
    build(theta, &g, &params);
    std::vector<double> ad;
    for (NodeId id : params)
      for (double v : g.grad(id).values()) ad.push_back(v);
    auto fd = oracles::finite_diff(
        [&build](const std::vector<double>& th) { return build(th, nullptr, nullptr); }, theta);
    double worst = 0.0;
    for (size_t i = 0; i < ad.size(); ++i) worst = std::max(worst, oracles::rel_err(ad[i], fd[i]));
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("softmax and log-softmax stay finite for extreme inputs") {
  Graph g;
  NodeId x = g.leaf(Tensor::matrix(1, 3, {1000.0, 0.0, -1000.0}));
  CHECK(g.value(g.softmax_rows(x)).all_finite());
  CHECK(g.value(g.log_softmax_rows(x)).all_finite());
}

TEST_CASE("adam with zero gradients is the identity for any t") {
  numcore::AdamState adam({0.1, 0.9, 0.999, 1e-8});
  Tensor p = Tensor::vector({1.5, -2.0});
  Tensor zero = Tensor::zeros({2});
  std::vector<Tensor*> params = {&p};
  std::vector<const Tensor*> grads = {&zero};
  for (int step = 0; step < 5; ++step) adam.step(params, grads);
  CHECK(p[0] == 1.5);
  CHECK(p[1] == -2.0);
  CHECK(adam.step_count() == 5);
}

TEST_CASE("adam first step magnitude matches the bias-corrected closed form") {
  numcore::AdamState adam({0.1, 0.9, 0.999, 1e-8});
  Tensor p = Tensor::vector({0.0});
  Tensor g = Tensor::vector({4.0});
  std::vector<Tensor*> params = {&p};
  std::vector<const Tensor*> grads = {&g};
  adam.step(params, grads);
  // First step: m_hat = g, v_hat = g^2, so the update is lr * g / (|g| + eps).
  double expected = -0.1 * 4.0 / (4.0 + 1e-8);
  CHECK(p[0] == doctest::Approx(expected).epsilon(1e-12));
  CHECK(std::abs(p[0] + 0.1) < 1e-8);
}

TEST_CASE("adam treats equal gradients symmetrically") {
  numcore::AdamState adam({});
  Tensor p = Tensor::vector({1.0, 1.0});
  Tensor g = Tensor::vector({0.7, 0.7});
  std::vector<Tensor*> params = {&p};
  std::vector<const Tensor*> grads = {&g};
  for (int i = 0; i < 3; ++i) adam.step(params, grads);
  CHECK(p[0] == p[1]);
}

TEST_CASE("adam rejects shape drift") {
  numcore::AdamState adam({});
  Tensor p = Tensor::vector({1.0, 2.0});
  Tensor g = Tensor::vector({1.0});
  std::vector<Tensor*> params = {&p};
  std::vector<const Tensor*> grads = {&g};
  CHECK_THROWS_AS(adam.step(params, grads), DimensionError);
}

TEST_CASE("huber loss branches and parameter guard") {
  CHECK(numcore::huber_loss(0.0, 1.0) == 0.0);
  CHECK(numcore::huber_loss(0.5, 1.0) == doctest::Approx(0.125));
  CHECK(numcore::huber_loss(2.0, 1.0) == doctest::Approx(1.5));
  CHECK(numcore::huber_loss(-2.0, 1.0) == doctest::Approx(1.5));
  CHECK_THROWS_AS(numcore::huber_loss(1.0, 0.0), ParameterError);
  CHECK_THROWS_AS(numcore::huber_loss(1.0, -2.0), ParameterError);
}

TEST_CASE("huber loss is C1 at the branch point") {
  double kappa = 1.0;
  for (double side : {kappa - 1e-9, kappa + 1e-9}) {
    double here = numcore::huber_loss(side, kappa);
    CHECK(std::abs(here - 0.5 * kappa * kappa) < 1e-8);
  }
  // Numeric slope from both sides of the kink.
  double h = 1e-7;
  double left_slope =
      (numcore::huber_loss(kappa - 1e-9, kappa) - numcore::huber_loss(kappa - 1e-9 - h, kappa)) / h;
  double right_slope =
      (numcore::huber_loss(kappa + 1e-9 + h, kappa) - numcore::huber_loss(kappa + 1e-9, kappa)) / h;
  CHECK(std::abs(left_slope - right_slope) < 1e-5);
}

TEST_CASE("seeded rng sequences are reproducible and split streams diverge") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng parent(7);
  Rng child1 = parent.split();
  Rng child2 = parent.split();
  CHECK(child1.next_u64() != child2.next_u64());
}

TEST_CASE("same seed and op sequence give bitwise-identical trajectories") {
  auto trajectory = [](uint64_t seed) {
    Rng rng(seed);
    Tensor w = Tensor::glorot(3, 2, rng);
    numcore::AdamState adam({1e-2, 0.9, 0.999, 1e-8});
    for (int step = 0; step < 20; ++step) {
      Graph g;
      NodeId wn = g.leaf(w, true);
      NodeId x = g.leaf(Tensor::matrix(1, 2, {rng.next_in(-1, 1), rng.next_in(-1, 1)}));
      NodeId loss = g.reduce_mean(g.huber(g.dense(wn, g.leaf(Tensor::zeros({3})), x), 1.0));
      g.backward(loss);
      std::vector<Tensor*> params = {&w};
      std::vector<const Tensor*> grads = {&g.grad(wn)};
      adam.step(params, grads);
    }
    return w;
  };
  Tensor first = trajectory(99);
  Tensor second = trajectory(99);
  for (int64_t i = 0; i < first.numel(); ++i) CHECK(first[i] == second[i]);
}

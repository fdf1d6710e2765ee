#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rrlab/errors.hpp"
#include "rrlab/numcore/graph.hpp"
#include "rrlab/qnet/network.hpp"
#include "rrlab/qnet/support.hpp"

using namespace rrlab;
using numcore::Rng;
using numcore::Tensor;

TEST_CASE("argmax breaks ties toward the lowest index") {
  CHECK(qnet::argmax_action(std::vector<double>{2, 5, 5}) == 1);
  CHECK(qnet::argmax_action(std::vector<double>{-1}) == 0);
  CHECK_THROWS_AS(qnet::argmax_action(std::vector<double>{}), ContractViolation);
  CHECK_THROWS_AS(qnet::argmax_action(std::vector<double>{1.0, NAN}), ContractViolation);
}

TEST_CASE("argmax is invariant under positive affine transforms") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> q(static_cast<size_t>(2 + rng.next_below(6)));
    for (double& v : q) v = rng.next_in(-10, 10);
    double a = rng.next_in(0.1, 5.0);
    double b = rng.next_in(-20, 20);
    std::vector<double> scaled(q.size());
    for (size_t i = 0; i < q.size(); ++i) scaled[i] = a * q[i] + b;
    CHECK(qnet::argmax_action(q) == qnet::argmax_action(scaled));
  }
}

TEST_CASE("dueling combine cancels constant advantages") {
  for (double c : {-3.0, 0.0, 7.5}) {
    auto q = qnet::dueling_combine(3.0, std::vector<double>{c, c, c});
    for (double v : q) CHECK(v == doctest::Approx(3.0));
  }
  auto passthrough = qnet::dueling_combine(0.0, std::vector<double>{1, -1});
  CHECK(passthrough[0] == doctest::Approx(1.0));
  CHECK(passthrough[1] == doctest::Approx(-1.0));
  auto hand = qnet::dueling_combine(2.0, std::vector<double>{4, 0});
  CHECK(hand[0] == doctest::Approx(4.0));
  CHECK(hand[1] == doctest::Approx(0.0));
}

TEST_CASE("dueling combine is invariant under advantage shifts") {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> adv(4);
    for (double& v : adv) v = rng.next_in(-5, 5);
    double v0 = rng.next_in(-5, 5), shift = rng.next_in(-10, 10);
    std::vector<double> shifted(adv);
    for (double& v : shifted) v += shift;
    auto a = qnet::dueling_combine(v0, adv);
    auto b = qnet::dueling_combine(v0, shifted);
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
  }
}

TEST_CASE("graph dueling op matches the scalar combine rule per row") {
  Rng rng(3);
  numcore::Graph g;
  std::vector<double> vvals = {rng.next_in(-2, 2), rng.next_in(-2, 2)};
  std::vector<double> avals(6);
  for (double& x : avals) x = rng.next_in(-2, 2);
  auto v = g.leaf(Tensor::matrix(2, 1, vvals));
  auto adv = g.leaf(Tensor::matrix(2, 3, avals));
  auto out = g.dueling_combine(v, adv, 1);
  for (int64_t row = 0; row < 2; ++row) {
    std::vector<double> adv_row(avals.begin() + row * 3, avals.begin() + (row + 1) * 3);
    auto expect = qnet::dueling_combine(vvals[static_cast<size_t>(row)], adv_row);
    for (int64_t a = 0; a < 3; ++a)
      CHECK(g.value(out).at(row, a) == doctest::Approx(expect[static_cast<size_t>(a)]));
  }
}

TEST_CASE("noisy layer with zero sigma equals a plain dense layer") {
  Rng rng(21);
  qnet::DenseLayer layer = qnet::DenseLayer::init(3, 4, true, 0.5, rng);
  layer.w_sigma.fill(0.0);
  layer.b_sigma.fill(0.0);
  std::vector<double> x = {0.5, -1.0, 2.0, 0.25};
  Rng noise(9);
  auto noisy = qnet::noisy_forward(layer, x, true, noise);
  for (int64_t i = 0; i < 3; ++i) {
    double plain = layer.b_mu[i];
    for (int64_t j = 0; j < 4; ++j) plain += layer.w_mu.at(i, j) * x[static_cast<size_t>(j)];
    CHECK(noisy[static_cast<size_t>(i)] == doctest::Approx(plain).epsilon(1e-12));
  }
}

TEST_CASE("frozen noise makes noisy forward deterministic") {
  Rng rng(22);
  qnet::DenseLayer layer = qnet::DenseLayer::init(2, 3, true, 0.5, rng);
  std::vector<double> x = {1.0, 2.0, -0.5};
  Rng noise(1);
  layer.resample_noise(noise);
  auto a = qnet::noisy_forward(layer, x, false, noise);
  auto b = qnet::noisy_forward(layer, x, false, noise);
  CHECK(a == b);
  CHECK_THROWS_AS(qnet::noisy_forward(layer, std::vector<double>{1.0}, false, noise),
                  DimensionError);
}

TEST_CASE("noisy output variance matches the factored-noise closed form") {
  // Var(y_i) = c^2 * sum_j sigma_ij^2 x_j^2 + c * sigma_bi^2 with
  // c = E[f(u)^2] = E[|u|] = sqrt(2/pi).
  Rng rng(30);
  qnet::DenseLayer layer = qnet::DenseLayer::init(3, 4, true, 0.5, rng);
  std::vector<double> x = {1.0, -0.5, 0.75, 2.0};
  const int64_t samples = 100000;
  std::vector<double> sum(3, 0.0), sum_sq(3, 0.0);
  Rng noise(77);
  for (int64_t s = 0; s < samples; ++s) {
    auto y = qnet::noisy_forward(layer, x, true, noise);
    for (size_t i = 0; i < 3; ++i) {
      sum[i] += y[i];
      sum_sq[i] += y[i] * y[i];
    }
  }
  double c = std::sqrt(2.0 / 3.14159265358979323846);
  for (size_t i = 0; i < 3; ++i) {
    double mean = sum[i] / static_cast<double>(samples);
    double var = sum_sq[i] / static_cast<double>(samples) - mean * mean;
    double expected = c * layer.b_sigma[static_cast<int64_t>(i)] *
                      layer.b_sigma[static_cast<int64_t>(i)];
    for (size_t j = 0; j < 4; ++j)
      expected += c * c * layer.w_sigma.at(static_cast<int64_t>(i), static_cast<int64_t>(j)) *
                  layer.w_sigma.at(static_cast<int64_t>(i), static_cast<int64_t>(j)) * x[j] * x[j];
    CHECK(std::abs(var - expected) / expected < 0.05);
  }
}

TEST_CASE("categorical projection clamps terminal backups to the edge atom") {
  qnet::Support support{-1.0, 1.0, 5};
  std::vector<double> probs = {0.2, 0.2, 0.2, 0.2, 0.2};
  auto out = qnet::categorical_project(support, probs, -1.0, 0.9, true);
  CHECK(out[0] == doctest::Approx(1.0));
  for (size_t i = 1; i < out.size(); ++i) CHECK(out[i] == doctest::Approx(0.0));
}

TEST_CASE("categorical projection is the identity for on-atom null backups") {
  qnet::Support support{-2.0, 2.0, 9};
  std::vector<double> probs = {0.05, 0.1, 0.2, 0.05, 0.15, 0.05, 0.1, 0.05, 0.25};
  auto out = qnet::categorical_project(support, probs, 0.0, 1.0, false);
  for (size_t i = 0; i < probs.size(); ++i) CHECK(out[i] == doctest::Approx(probs[i]).epsilon(1e-12));
}

TEST_CASE("categorical projection splits off-atom mass two-hot") {
  qnet::Support support{0.0, 2.0, 3};
  auto out = qnet::categorical_project(support, std::vector<double>{1, 0, 0}, 0.5, 1.0, false);
  CHECK(out[0] == doctest::Approx(0.5));
  CHECK(out[1] == doctest::Approx(0.5));
  CHECK(out[2] == doctest::Approx(0.0));
}

TEST_CASE("categorical projection conserves mass and expectation") {
  Rng rng(41);
  qnet::Support support{-10.0, 10.0, 51};
  for (int trial = 0; trial < 2000; ++trial) {
    // Mass concentrated on inner atoms so no clamping occurs.
    std::vector<double> probs(51, 0.0);
    double total = 0.0;
    for (int64_t i = 20; i <= 30; ++i) {
      probs[static_cast<size_t>(i)] = rng.next_double();
      total += probs[static_cast<size_t>(i)];
    }
    for (double& p : probs) p /= total;
    double reward = rng.next_in(-0.5, 0.5);
    double discount = rng.next_double();
    auto out = qnet::categorical_project(support, probs, reward, discount, false);

    double mass = 0.0, mean_out = 0.0, mean_in = 0.0;
    for (int64_t i = 0; i < 51; ++i) {
      mass += out[static_cast<size_t>(i)];
      mean_out += support.atom(i) * out[static_cast<size_t>(i)];
      mean_in += support.atom(i) * probs[static_cast<size_t>(i)];
    }
    CHECK(std::abs(mass - 1.0) < 1e-9);
    CHECK(std::abs(mean_out - (reward + discount * mean_in)) < 1e-9);
  }
}

TEST_CASE("categorical projection rejects malformed distributions") {
  qnet::Support support{0.0, 1.0, 3};
  CHECK_THROWS_AS(
      qnet::categorical_project(support, std::vector<double>{0.5, 0.6, 0.2}, 0, 1, false),
      ContractViolation);
  CHECK_THROWS_AS(
      qnet::categorical_project(support, std::vector<double>{-0.1, 0.6, 0.5}, 0, 1, false),
      ContractViolation);
  CHECK_THROWS_AS(
      qnet::categorical_project(support, std::vector<double>{0.5, 0.5}, 0, 1, false),
      DimensionError);
}

TEST_CASE("cross entropy against itself is the entropy") {
  std::vector<double> target = {0.3, 0.7};
  std::vector<double> log_target = {std::log(0.3), std::log(0.7)};
  double entropy = -(0.3 * std::log(0.3) + 0.7 * std::log(0.7));
  CHECK(qnet::cross_entropy_loss(target, log_target) == doctest::Approx(entropy).epsilon(1e-12));
}

TEST_CASE("cross entropy of a one-hot target picks one log") {
  std::vector<double> target = {0, 1, 0};
  std::vector<double> logp = {-3.0, -0.25, -1.0};
  CHECK(qnet::cross_entropy_loss(target, logp) == doctest::Approx(0.25));
  CHECK_THROWS_AS(qnet::cross_entropy_loss(std::vector<double>{1.0}, logp), DimensionError);
}

TEST_CASE("uniform target and uniform prediction give log 4") {
  std::vector<double> target(4, 0.25);
  std::vector<double> logp(4, std::log(0.25));
  CHECK(qnet::cross_entropy_loss(target, logp) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("network output widths follow the head kind") {
  Rng rng(2);
  qnet::NetworkSpec spec;
  spec.input_dim = 6;
  spec.hidden = {8};
  spec.actions = 3;

  spec.head = qnet::HeadKind::kScalar;
  CHECK(qnet::QNetwork(spec, rng).output_width() == 3);

  spec.head = qnet::HeadKind::kDueling;
  CHECK(qnet::QNetwork(spec, rng).output_width() == 3);

  spec.head = qnet::HeadKind::kCategorical;
  spec.support = {-1, 1, 11};
  CHECK(qnet::QNetwork(spec, rng).output_width() == 33);

  spec.head = qnet::HeadKind::kDuelingCategorical;
  CHECK(qnet::QNetwork(spec, rng).output_width() == 33);
}

TEST_CASE("non-noisy forward is a deterministic function of params and input") {
  Rng rng(17);
  qnet::NetworkSpec spec;
  spec.input_dim = 4;
  spec.hidden = {5};
  spec.actions = 2;
  qnet::QNetwork net(spec, rng);
  std::vector<double> obs = {0.1, -0.2, 0.3, 0.4};
  auto a = net.q_values(obs);
  auto b = net.q_values(obs);
  CHECK(a == b);
}

TEST_CASE("categorical q-values are support expectations of softmax blocks") {
  Rng rng(19);
  qnet::NetworkSpec spec;
  spec.input_dim = 2;
  spec.hidden = {};
  spec.actions = 2;
  spec.head = qnet::HeadKind::kCategorical;
  spec.support = {-1, 1, 3};
  qnet::QNetwork net(spec, rng);
  // Zero weights; biases put all mass on atom 2 (value 1) for action 0 and
  // atom 0 (value -1) for action 1.
  auto params = net.params();
  params[0]->fill(0.0);
  Tensor& bias = *params[1];
  bias.fill(0.0);
  bias[2] = 50.0;
  bias[3] = 50.0;
  auto q = net.q_values(std::vector<double>{0.3, 0.4});
  CHECK(q[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(q[1] == doctest::Approx(-1.0).epsilon(1e-9));
}

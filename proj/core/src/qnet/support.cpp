#include "rrlab/qnet/support.hpp"

#include <cmath>

#include "rrlab/errors.hpp"

namespace rrlab::qnet {

std::vector<double> Support::atoms() const {
  std::vector<double> z(static_cast<size_t>(n_atoms));
  for (int64_t i = 0; i < n_atoms; ++i) z[static_cast<size_t>(i)] = atom(i);
  return z;
}

void Support::validate() const {
  if (!(v_min < v_max)) throw ParameterError("support: v_min must be < v_max");
  if (n_atoms < 2) throw ParameterError("support: need at least 2 atoms");
}

double Support::expectation(std::span<const double> probs) const {
  double e = 0.0;
  for (int64_t i = 0; i < n_atoms; ++i) e += atom(i) * probs[static_cast<size_t>(i)];
  return e;
}

int64_t argmax_action(std::span<const double> q) {
  if (q.empty()) throw ContractViolation("argmax_action: empty value vector");
  int64_t best = 0;
  for (size_t i = 0; i < q.size(); ++i) {
    if (!std::isfinite(q[i])) throw ContractViolation("argmax_action: non-finite value");
    if (q[i] > q[static_cast<size_t>(best)]) best = static_cast<int64_t>(i);
  }
  return best;
}

std::vector<double> dueling_combine(double v, std::span<const double> adv) {
  double mean = 0.0;
  for (double a : adv) mean += a;
  mean /= static_cast<double>(adv.size());
  std::vector<double> q(adv.size());
  for (size_t i = 0; i < adv.size(); ++i) q[i] = v + adv[i] - mean;
  return q;
}

std::vector<double> categorical_project(const Support& support, std::span<const double> probs,
                                        double reward, double discount, bool done) {
  support.validate();
  if (static_cast<int64_t>(probs.size()) != support.n_atoms)
    throw DimensionError("categorical_project: distribution length does not match support");
  double sum = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw ContractViolation("categorical_project: negative probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw ContractViolation("categorical_project: probabilities sum to " + std::to_string(sum));

  const int64_t n = support.n_atoms;
  const double dz = support.dz();
  std::vector<double> out(static_cast<size_t>(n), 0.0);
  for (int64_t j = 0; j < n; ++j) {
    double p = probs[static_cast<size_t>(j)];
    if (p == 0.0) continue;
    double tz = reward + (done ? 0.0 : discount * support.atom(j));
    tz = std::min(std::max(tz, support.v_min), support.v_max);
    double b = (tz - support.v_min) / dz;
    // Snap to the grid when within rounding noise so on-atom backups stay
    // exact two-sided identities.
    double r = std::round(b);
    if (std::abs(b - r) < 1e-9) b = r;
    auto l = static_cast<int64_t>(std::floor(b));
    auto u = static_cast<int64_t>(std::ceil(b));
    l = std::min(std::max(l, int64_t{0}), n - 1);
    u = std::min(std::max(u, int64_t{0}), n - 1);
    if (l == u) {
      out[static_cast<size_t>(l)] += p;
    } else {
      out[static_cast<size_t>(l)] += p * (static_cast<double>(u) - b);
      out[static_cast<size_t>(u)] += p * (b - static_cast<double>(l));
    }
  }
  return out;
}

double cross_entropy_loss(std::span<const double> target_probs,
                          std::span<const double> predicted_log_probs) {
  if (target_probs.size() != predicted_log_probs.size())
    throw DimensionError("cross_entropy_loss: length mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < target_probs.size(); ++i)
    if (target_probs[i] != 0.0) acc -= target_probs[i] * predicted_log_probs[i];
  return acc;
}

}  // namespace rrlab::qnet

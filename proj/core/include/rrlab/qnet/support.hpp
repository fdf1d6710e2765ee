#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace rrlab::qnet {

/// Fixed atom grid z_i = v_min + i * dz for distributional value heads.
struct Support {
  double v_min = -10.0;
  double v_max = 10.0;
  int64_t n_atoms = 51;

  double dz() const { return (v_max - v_min) / static_cast<double>(n_atoms - 1); }
  double atom(int64_t i) const { return v_min + static_cast<double>(i) * dz(); }
  std::vector<double> atoms() const;
  void validate() const;  // v_min < v_max, n_atoms >= 2

  // Sum_i z_i * p_i.
  double expectation(std::span<const double> probs) const;
};

// Smallest index attaining the maximum. Rejects empty or non-finite input.
int64_t argmax_action(std::span<const double> q);

// q_a = v + adv_a - mean(adv).
std::vector<double> dueling_combine(double v, std::span<const double> adv);

// Distributional Bellman backup projected onto the support: every atom's
// mass moves to clamp(reward + discount * z_j, v_min, v_max) (discount 0
// when done) and is split linearly between the two bracketing atoms.
// probs must be a valid distribution (entries >= 0, sum within 1e-6 of 1).
std::vector<double> categorical_project(const Support& support, std::span<const double> probs,
                                        double reward, double discount, bool done);

// -sum target_i * log_pred_i. Lengths must match; target must be a
// distribution.
double cross_entropy_loss(std::span<const double> target_probs,
                          std::span<const double> predicted_log_probs);

}  // namespace rrlab::qnet

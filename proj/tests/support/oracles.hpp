#pragma once

// Test-only oracles. These deliberately avoid the library's own numeric
// paths so they can act as independent references.

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracles {

// Central finite differences of f around theta.
inline std::vector<double> finite_diff(const std::function<double(const std::vector<double>&)>& f,
                                       std::vector<double> theta, double h = 1e-5) {
  std::vector<double> grad(theta.size());
  for (size_t i = 0; i < theta.size(); ++i) {
    double orig = theta[i];
    theta[i] = orig + h;
    double up = f(theta);
    theta[i] = orig - h;
    double down = f(theta);
    theta[i] = orig;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({1e-3, std::abs(a), std::abs(b)});
}

// Regularized upper incomplete gamma Q(a, x); chi-square p-value is
// Q(dof/2, stat/2). Series + continued-fraction split as in standard
// references.
inline double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q domain");
  if (x == 0.0) return 1.0;
  double gln = std::lgamma(a);
  if (x < a + 1.0) {
    // Lower series, then complement.
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    double p = sum * std::exp(-x + a * std::log(x) - gln);
    return 1.0 - p;
  }
  // Lentz continued fraction for Q directly.
  double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - gln) * h;
}

inline double chi_square_p_value(double stat, int dof) {
  return gamma_q(static_cast<double>(dof) / 2.0, stat / 2.0);
}

// Exact Q* for a deterministic gridworld, re-deriving the documented
// dynamics (4 actions, blocked moves stay, goal terminates) instead of
// calling the environment.
struct GridOracle {
  std::vector<std::string> grid;
  double step_reward = 0.0;
  double goal_reward = 1.0;
  double gamma = 0.9;

  int64_t rows() const { return static_cast<int64_t>(grid.size()); }
  int64_t cols() const { return static_cast<int64_t>(grid[0].size()); }
  bool wall(int64_t r, int64_t c) const {
    return grid[static_cast<size_t>(r)][static_cast<size_t>(c)] == '#';
  }
  bool goal(int64_t r, int64_t c) const {
    return grid[static_cast<size_t>(r)][static_cast<size_t>(c)] == 'G';
  }

  // Returns Q[state][action]; terminal (goal) states keep Q = 0.
  std::vector<std::vector<double>> value_iteration(double tol = 1e-12) const {
    int64_t n = rows() * cols();
    std::vector<double> v(static_cast<size_t>(n), 0.0);
    std::vector<std::vector<double>> q(static_cast<size_t>(n), std::vector<double>(4, 0.0));
    const int64_t dr[4] = {-1, 1, 0, 0};
    const int64_t dc[4] = {0, 0, -1, 1};
    for (int sweep = 0; sweep < 100000; ++sweep) {
      double delta = 0.0;
      for (int64_t r = 0; r < rows(); ++r) {
        for (int64_t c = 0; c < cols(); ++c) {
          if (wall(r, c) || goal(r, c)) continue;
          int64_t s = r * cols() + c;
          double best = -1e300;
          for (int a = 0; a < 4; ++a) {
            int64_t nr = r + dr[a], nc = c + dc[a];
            if (nr < 0 || nr >= rows() || nc < 0 || nc >= cols() || wall(nr, nc)) {
              nr = r;
              nc = c;
            }
            double reward = step_reward;
            double next_v = 0.0;
            if (goal(nr, nc)) reward += goal_reward;
            else next_v = v[static_cast<size_t>(nr * cols() + nc)];
            q[static_cast<size_t>(s)][static_cast<size_t>(a)] = reward + gamma * next_v;
            best = std::max(best, q[static_cast<size_t>(s)][static_cast<size_t>(a)]);
          }
          delta = std::max(delta, std::abs(best - v[static_cast<size_t>(s)]));
          v[static_cast<size_t>(s)] = best;
        }
      }
      if (delta < tol) break;
    }
    return q;
  }

  std::vector<int> optimal_actions(int64_t state, const std::vector<std::vector<double>>& q,
                                   double tol = 1e-9) const {
    double best = -1e300;
    for (double qa : q[static_cast<size_t>(state)]) best = std::max(best, qa);
    std::vector<int> actions;
    for (int a = 0; a < 4; ++a)
      if (q[static_cast<size_t>(state)][static_cast<size_t>(a)] >= best - tol) actions.push_back(a);
    return actions;
  }
};

}  // namespace oracles

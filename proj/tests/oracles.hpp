#pragma once

// Reference implementations used only by the tests. They deliberately avoid
// the library's solvers and Eigen so an agreement means something.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "morl/env/gridworld.hpp"
#include "morl/mdp.hpp"

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

/// Solves A x = b by Gauss-Jordan elimination with partial pivoting.
inline std::vector<double> solve_dense(Matrix a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (std::abs(a[piv][col]) < 1e-300) throw std::runtime_error("singular system");
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  for (std::size_t i = 0; i < n; ++i) b[i] /= a[i][i];
  return b;
}

inline Matrix inverse(const Matrix& a) {
  const std::size_t n = a.size();
  Matrix inv(n, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    const auto col = solve_dense(a, e);
    for (std::size_t i = 0; i < n; ++i) inv[i][j] = col[i];
  }
  return inv;
}

/// V^pi from (I - gamma P_pi) V = r_pi with terminals pinned to their value.
inline std::vector<double> evaluate_policy(const morl::ScalarMDP& mdp, const std::vector<std::size_t>& pi) {
  const auto n = mdp.n_states();
  Matrix a(n, std::vector<double>(n, 0.0));
  std::vector<double> b(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    a[s][s] = 1.0;
    if (mdp.is_terminal(s)) {
      b[s] = mdp.terminal_value(s);
      continue;
    }
    const auto [lo, hi] = mdp.row(s, pi[s]);
    for (auto k = lo; k < hi; ++k) {
      a[s][mdp.next(k)] -= mdp.gamma() * mdp.prob(k);
      b[s] += mdp.prob(k) * mdp.reward(k);
    }
  }
  return solve_dense(a, b);
}

/// Pointwise maximum of V^pi over every deterministic stationary policy.
inline std::vector<double> enumerate_optimal_values(const morl::ScalarMDP& mdp) {
  const auto n = mdp.n_states();
  const auto m = mdp.n_actions();
  std::vector<std::size_t> free;
  for (std::size_t s = 0; s < n; ++s) {
    if (!mdp.is_terminal(s)) free.push_back(s);
  }
  std::vector<std::size_t> pi(n, 0);
  std::vector<double> best(n, -INFINITY);
  while (true) {
    const auto v = evaluate_policy(mdp, pi);
    for (std::size_t s = 0; s < n; ++s) best[s] = std::max(best[s], v[s]);
    std::size_t i = 0;
    for (; i < free.size(); ++i) {
      if (++pi[free[i]] < m) break;
      pi[free[i]] = 0;
    }
    if (i == free.size()) break;
  }
  return best;
}

/// Matern covariance written out directly from the closed forms.
inline double matern(double nu, double r) {
  if (nu == 0.5) return std::exp(-r);
  if (nu == 1.5) return (1.0 + std::sqrt(3.0) * r) * std::exp(-std::sqrt(3.0) * r);
  return (1.0 + std::sqrt(5.0) * r + 5.0 * r * r / 3.0) * std::exp(-std::sqrt(5.0) * r);
}

struct GpPrediction {
  std::vector<double> mean;
  std::vector<double> std;
};

/// Standardize, form (K + s2 I)^-1 explicitly, and evaluate the posterior.
inline GpPrediction gp_posterior(const Matrix& x, const std::vector<double>& y, const Matrix& q, double nu,
                                 const std::vector<double>& ell, double s2) {
  const std::size_t n = x.size();
  const std::size_t d = x[0].size();
  std::vector<double> mu(d, 0.0), sd(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    for (const auto& row : x) mu[j] += row[j];
    mu[j] /= static_cast<double>(n);
    for (const auto& row : x) sd[j] += (row[j] - mu[j]) * (row[j] - mu[j]);
    sd[j] = std::sqrt(sd[j] / static_cast<double>(n));
    if (sd[j] == 0.0) sd[j] = 1.0;
  }
  double ym = 0.0, ys = 0.0;
  for (double v : y) ym += v;
  ym /= static_cast<double>(n);
  for (double v : y) ys += (v - ym) * (v - ym);
  ys = std::sqrt(ys / static_cast<double>(n));
  if (ys == 0.0) ys = 1.0;

  const auto k = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double l = ell.size() == 1 ? ell[0] : ell[j];
      const double t = ((a[j] - mu[j]) / sd[j] - (b[j] - mu[j]) / sd[j]) / l;
      sq += t * t;
    }
    return matern(nu, std::sqrt(sq));
  };
  Matrix kxx(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) kxx[i][j] = k(x[i], x[j]) + (i == j ? s2 : 0.0);
  }
  const auto kinv = inverse(kxx);
  std::vector<double> yz(n);
  for (std::size_t i = 0; i < n; ++i) yz[i] = (y[i] - ym) / ys;

  GpPrediction out;
  for (const auto& p : q) {
    std::vector<double> ks(n);
    for (std::size_t i = 0; i < n; ++i) ks[i] = k(p, x[i]);
    double mean = 0.0, quad = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) row += kinv[i][j] * yz[j];
      mean += ks[i] * row;
      double rq = 0.0;
      for (std::size_t j = 0; j < n; ++j) rq += kinv[i][j] * ks[j];
      quad += ks[i] * rq;
    }
    out.mean.push_back(ym + ys * mean);
    out.std.push_back(ys * std::sqrt(std::max(0.0, 1.0 + s2 - quad)));
  }
  return out;
}

/// 3x3 gridworld without walls: 7 free states, so 4^7 deterministic policies.
inline morl::GridworldSpec small_gridworld() {
  morl::GridworldSpec spec;
  spec.n = 3;
  spec.walls = {};
  spec.positive_terminal = {0, 2};
  spec.negative_terminal = {1, 2};
  spec.start = {2, 0};
  return spec;
}

/// Reward weights (l, p, n) drawn from a seed, for the oracle comparisons.
inline morl::WeightVector random_grid_weights(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const double l = 0.25 * u(rng);
  const double p = u(rng);
  const double n = u(rng);
  return morl::WeightVector({l, p, n});
}

}  // namespace oracle

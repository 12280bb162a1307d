#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "morl/error.hpp"
#include "morl/mdp.hpp"

namespace morl {

struct ValueIterationOptions {
  double tol = 1e-9;
  std::size_t max_iter = 100000;
};

struct ValueIterationResult {
  ValueFunction value;
  std::size_t iterations = 0;
  /// Sup-norm difference between successive sweeps, one entry per sweep.
  std::vector<double> residuals;
};

namespace detail {

inline double backup(const ScalarMDP& mdp, const std::vector<double>& v, StateIndex s, ActionIndex a) {
  const auto [b, e] = mdp.row(s, a);
  const double gamma = mdp.gamma();
  double q = 0.0;
  for (auto k = b; k < e; ++k) q += mdp.prob(k) * (mdp.reward(k) + gamma * v[mdp.next(k)]);
  return q;
}

}  // namespace detail

/// Synchronous value iteration from V = 0 (terminals pinned to their value).
/// Stops once the sup-norm change of a sweep is <= tol.
inline ValueIterationResult value_iteration(const ScalarMDP& mdp, const ValueIterationOptions& opts = {}) {
  if (!(opts.tol > 0.0)) throw InvalidArgument("value iteration tolerance must be positive");
  const auto n = mdp.n_states();
  std::vector<double> v(n, 0.0);
  for (StateIndex s = 0; s < n; ++s) {
    if (mdp.is_terminal(s)) v[s] = mdp.terminal_value(s);
  }
  std::vector<double> next_v(v);

  ValueIterationResult result;
  double residual = std::numeric_limits<double>::infinity();
  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    residual = 0.0;
    for (StateIndex s = 0; s < n; ++s) {
      if (mdp.is_terminal(s)) continue;
      double best = -std::numeric_limits<double>::infinity();
      for (ActionIndex a = 0; a < mdp.n_actions(); ++a) best = std::max(best, detail::backup(mdp, v, s, a));
      next_v[s] = best;
      residual = std::max(residual, std::abs(best - v[s]));
    }
    v.swap(next_v);
    result.residuals.push_back(residual);
    if (residual <= opts.tol) {
      result.value.v = std::move(v);
      result.iterations = it;
      return result;
    }
  }
  throw ConvergenceError("value iteration did not converge in " + std::to_string(opts.max_iter) +
                             " sweeps (final residual " + std::to_string(residual) + ")",
                         residual, opts.max_iter);
}

/// q(s,a) = sum_{s'} p(s'|s,a) [R(s,a,s') + gamma V(s')]; terminal rows repeat V(terminal).
inline QFunction q_from_value(const ScalarMDP& mdp, const ValueFunction& value) {
  if (value.size() != mdp.n_states()) throw InvalidArgument("value function size does not match the MDP");
  QFunction q(mdp.n_states(), mdp.n_actions());
  for (StateIndex s = 0; s < mdp.n_states(); ++s) {
    for (ActionIndex a = 0; a < mdp.n_actions(); ++a) {
      q(s, a) = mdp.is_terminal(s) ? mdp.terminal_value(s) : detail::backup(mdp, value.v, s, a);
    }
  }
  return q;
}

inline constexpr double kDefaultTieEps = 1e-9;

/// Lowest-index action within `tie_eps` of the row maximum.
inline Policy greedy_policy(const QFunction& q, double tie_eps = kDefaultTieEps) {
  Policy pi;
  pi.action.resize(q.n_states());
  for (StateIndex s = 0; s < q.n_states(); ++s) {
    const auto row = q.row(s);
    const double best = *std::max_element(row.begin(), row.end());
    for (ActionIndex a = 0; a < row.size(); ++a) {
      if (row[a] >= best - tie_eps) {
        pi.action[s] = a;
        break;
      }
    }
  }
  return pi;
}

/// max_a q(s, a) per state.
inline ValueFunction state_values(const QFunction& q) {
  ValueFunction v;
  v.v.resize(q.n_states());
  for (StateIndex s = 0; s < q.n_states(); ++s) {
    const auto row = q.row(s);
    v.v[s] = *std::max_element(row.begin(), row.end());
  }
  return v;
}

/// Exact V_pi from the sparse linear system (I - gamma P_pi) V = R_pi.
inline ValueFunction policy_evaluation(const ScalarMDP& mdp, const Policy& pi) {
  const auto n = mdp.n_states();
  if (pi.size() != n) throw InvalidArgument("policy size does not match the MDP");
  for (StateIndex s = 0; s < n; ++s) {
    if (pi(s) >= mdp.n_actions()) throw InvalidArgument("policy action out of range at state " + std::to_string(s));
  }

  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
  const double gamma = mdp.gamma();
  for (StateIndex s = 0; s < n; ++s) {
    const auto row = static_cast<int>(s);
    triplets.emplace_back(row, row, 1.0);
    if (mdp.is_terminal(s)) {
      rhs[row] = mdp.terminal_value(s);
      continue;
    }
    const auto [b, e] = mdp.row(s, pi(s));
    for (auto k = b; k < e; ++k) {
      triplets.emplace_back(row, static_cast<int>(mdp.next(k)), -gamma * mdp.prob(k));
    }
    rhs[row] = mdp.expected_reward(s, pi(s));
  }
  Eigen::SparseMatrix<double> system(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  system.setFromTriplets(triplets.begin(), triplets.end());

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(system);
  if (lu.info() != Eigen::Success) {
    throw NumericalError("policy evaluation system is singular (gamma = 1 without absorption?)");
  }
  const Eigen::VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite()) {
    throw NumericalError("policy evaluation solve failed");
  }
  return ValueFunction{std::vector<double>(x.data(), x.data() + x.size())};
}

/// Convenience: value iteration followed by the Q backup.
struct Solution {
  ValueFunction value;
  QFunction q;
  Policy policy;
  std::size_t iterations = 0;
};

inline Solution solve(const ScalarMDP& mdp, const ValueIterationOptions& opts = {}) {
  auto vi = value_iteration(mdp, opts);
  Solution sol;
  sol.q = q_from_value(mdp, vi.value);
  sol.policy = greedy_policy(sol.q);
  sol.value = std::move(vi.value);
  sol.iterations = vi.iterations;
  return sol;
}

}  // namespace morl

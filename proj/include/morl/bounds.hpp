#pragma once

#include <cmath>
#include <string>

#include "morl/error.hpp"
#include "morl/mdp.hpp"

namespace morl {

namespace detail {

inline double weighted_reward_change(const TabularMDP& mdp, const WeightVector& w, const WeightVector& w2) {
  if (w.size() != mdp.n_objectives() || w2.size() != mdp.n_objectives()) {
    throw InvalidArgument("weight vectors of length " + std::to_string(w.size()) + " and " +
                          std::to_string(w2.size()) + " do not match " + std::to_string(mdp.n_objectives()) +
                          " objectives");
  }
  double change = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) change += std::abs(w2[i] - w[i]) * mdp.max_abs_reward(i);
  return change;
}

}  // namespace detail

/// Upper bound on max_s |V*(s|w2) - V*(s|w)|:
///   sum_i |w2_i - w_i| max|r_i| / (1 - gamma).
/// The offset channel is weight independent and cancels.
inline double value_diff_bound(const TabularMDP& mdp, const WeightVector& w, const WeightVector& w2) {
  const double change = detail::weighted_reward_change(mdp, w, w2);
  if (mdp.gamma() >= 1.0) throw InvalidArgument("value difference is unbounded for gamma = 1");
  return change / (1.0 - mdp.gamma());
}

/// Upper bound on max_{s,a} |Q*(s,a|w2) - Q*(s,a|w)|: one step of reward change
/// plus the discounted value bound.
inline double q_diff_bound(const TabularMDP& mdp, const WeightVector& w, const WeightVector& w2) {
  const double change = detail::weighted_reward_change(mdp, w, w2);
  if (mdp.gamma() >= 1.0) throw InvalidArgument("Q difference is unbounded for gamma = 1");
  return change + mdp.gamma() * change / (1.0 - mdp.gamma());
}

}  // namespace morl

#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "morl/env/environment.hpp"
#include "morl/error.hpp"
#include "morl/mdp.hpp"

namespace morl {

struct TrajectoryStep {
  StateIndex state = 0;
  ActionIndex action = 0;
  double reward = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  StateIndex final_state = 0;
  bool terminated = false;
};

using ActionSource = std::function<ActionIndex(StateIndex)>;

/// Samples one episode from `start`, stopping on a terminal state or after
/// `horizon` steps. Deterministic given `seed`.
inline Trajectory rollout(const ScalarMDP& mdp, const ActionSource& choose, StateIndex start, std::size_t horizon,
                          std::uint64_t seed) {
  if (start >= mdp.n_states()) throw InvalidArgument("rollout start state out of range");
  std::mt19937_64 rng(seed);
  Trajectory traj;
  StateIndex s = start;
  for (std::size_t t = 0; t < horizon && !mdp.is_terminal(s); ++t) {
    const ActionIndex a = choose(s);
    if (a >= mdp.n_actions()) throw InvalidArgument("action source returned an invalid action");
    const auto [b, e] = mdp.row(s, a);
    const double u = detail::uniform_unit(rng);
    double acc = 0.0;
    std::size_t pick = e - 1;
    for (auto k = b; k < e; ++k) {
      acc += mdp.prob(k);
      if (u < acc) {
        pick = k;
        break;
      }
    }
    traj.steps.push_back({s, a, mdp.reward(pick)});
    s = mdp.next(pick);
  }
  traj.final_state = s;
  traj.terminated = mdp.is_terminal(s);
  return traj;
}

inline Trajectory rollout(const ScalarMDP& mdp, const Policy& pi, StateIndex start, std::size_t horizon,
                          std::uint64_t seed) {
  return rollout(mdp, [&pi](StateIndex s) { return pi(s); }, start, horizon, seed);
}

}  // namespace morl

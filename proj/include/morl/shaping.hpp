#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "morl/error.hpp"
#include "morl/mdp.hpp"

namespace morl {

/// Goal-proximity bonus: `bonus` on every transition that moves strictly closer to `goal`.
struct ShapingSpec {
  StateIndex goal_state = 0;
  std::function<double(StateIndex, StateIndex)> distance;
  double bonus = 0.0;
};

/// Adds bonus * [d(s', G) < d(s, G)] to the weight-independent offset channel of
/// every transition entry. Weighted objectives are left untouched.
inline TabularMDP shape_reward(const TabularMDP& mdp, const ShapingSpec& spec) {
  if (spec.goal_state >= mdp.n_states()) throw InvalidArgument("shaping goal state out of range");
  if (!std::isfinite(spec.bonus)) throw InvalidArgument("shaping bonus must be finite");
  if (!spec.distance) throw InvalidArgument("shaping needs a distance function");

  std::vector<double> delta(mdp.n_entries(), 0.0);
  for (StateIndex s = 0; s < mdp.n_states(); ++s) {
    const double here = spec.distance(s, spec.goal_state);
    for (ActionIndex a = 0; a < mdp.n_actions(); ++a) {
      const auto [b, e] = mdp.row(s, a);
      for (auto k = b; k < e; ++k) {
        if (spec.distance(mdp.next(k), spec.goal_state) < here) delta[k] = spec.bonus;
      }
    }
  }
  return mdp.with_offsets_added(delta);
}

}  // namespace morl

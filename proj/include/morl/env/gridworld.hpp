#pragma once

#include <algorithm>
#include <array>
#include <cstdlib>
#include <string>
#include <vector>

#include "morl/env/environment.hpp"
#include "morl/error.hpp"

namespace morl {

/// N x N gridworld with a positive and a negative terminal, walls, a living
/// reward and action slip. Actions: 0 up, 1 right, 2 down, 3 left.
struct GridworldSpec {
  int n = 5;
  std::vector<Cell> walls{{2, 2}};
  Cell positive_terminal{0, 4};
  double positive_reward = 1.0;
  Cell negative_terminal{1, 4};
  double negative_reward = -1.0;
  Cell start{4, 0};
  double living_reward = -0.02;
  double slip_prob = 0.1;
  double gamma = 0.9;

  /// Weights (l, p, n) over the objectives (living, positive terminal, negative terminal).
  WeightVector weights() const { return {living_reward, positive_reward, negative_reward}; }
};

inline constexpr std::size_t kGridActions = 4;
inline constexpr std::array<Cell, kGridActions> kGridMoves{{{-1, 0}, {0, 1}, {1, 0}, {0, -1}}};

namespace detail {

inline void validate(const GridworldSpec& spec) {
  if (spec.n < 2) throw InvalidArgument("gridworld side length must be >= 2");
  const auto inside = [&](Cell c) { return c.row >= 0 && c.col >= 0 && c.row < spec.n && c.col < spec.n; };
  const auto is_wall = [&](Cell c) { return std::find(spec.walls.begin(), spec.walls.end(), c) != spec.walls.end(); };
  for (const auto& w : spec.walls) {
    if (!inside(w)) throw InvalidArgument("wall cell outside the grid");
  }
  if (!inside(spec.positive_terminal) || !inside(spec.negative_terminal) || !inside(spec.start)) {
    throw InvalidArgument("terminal or start cell outside the grid");
  }
  if (spec.positive_terminal == spec.negative_terminal) throw InvalidArgument("terminal cells overlap");
  if (is_wall(spec.positive_terminal) || is_wall(spec.negative_terminal)) {
    throw InvalidArgument("a terminal cell overlaps a wall");
  }
  if (is_wall(spec.start)) throw InvalidArgument("start cell overlaps a wall");
  if (!(spec.slip_prob >= 0.0 && spec.slip_prob < 1.0)) throw InvalidArgument("slip_prob must lie in [0, 1)");
}

}  // namespace detail

/// Three {0,1} objectives: living indicator on every step out of a
/// non-terminal cell, and one indicator per terminal carried as terminal
/// reward. Scalarizing with (l, p, n) gives the classic reward layout.
/// Features are (row, col).
inline Environment build_gridworld(const GridworldSpec& spec) {
  detail::validate(spec);

  Environment env;
  env.grid_rows = env.grid_cols = spec.n;
  env.feature_names = {"row", "col"};
  env.objective_names = {"living", "positive_terminal", "negative_terminal"};

  std::vector<int> index(static_cast<std::size_t>(spec.n * spec.n), -1);
  for (int r = 0; r < spec.n; ++r) {
    for (int c = 0; c < spec.n; ++c) {
      if (std::find(spec.walls.begin(), spec.walls.end(), Cell{r, c}) != spec.walls.end()) continue;
      index[static_cast<std::size_t>(r * spec.n + c)] = static_cast<int>(env.cells.size());
      env.cells.push_back({r, c});
      env.features.push_back({static_cast<double>(r), static_cast<double>(c)});
    }
  }
  const auto state_of = [&](Cell c) { return static_cast<StateIndex>(index[static_cast<std::size_t>(c.row * spec.n + c.col)]); };
  const auto move = [&](Cell from, std::size_t action) {
    const Cell to{from.row + kGridMoves[action].row, from.col + kGridMoves[action].col};
    if (to.row < 0 || to.col < 0 || to.row >= spec.n || to.col >= spec.n) return from;
    if (index[static_cast<std::size_t>(to.row * spec.n + to.col)] < 0) return from;
    return to;
  };

  TabularMDP::Builder builder(env.cells.size(), kGridActions, 3, spec.gamma);
  builder.set_terminal(state_of(spec.positive_terminal), std::array{0.0, 1.0, 0.0});
  builder.set_terminal(state_of(spec.negative_terminal), std::array{0.0, 0.0, 1.0});
  const std::array living{1.0, 0.0, 0.0};
  for (StateIndex s = 0; s < env.cells.size(); ++s) {
    const Cell here = env.cells[s];
    if (here == spec.positive_terminal || here == spec.negative_terminal) continue;
    for (std::size_t a = 0; a < kGridActions; ++a) {
      for (std::size_t actual = 0; actual < kGridActions; ++actual) {
        const double p = actual == a ? 1.0 - spec.slip_prob : spec.slip_prob / 3.0;
        if (p == 0.0) continue;
        builder.add_transition(s, a, state_of(move(here, actual)), p, living);
      }
    }
  }
  env.mdp = builder.build();
  env.start_state = state_of(spec.start);
  return env;
}

inline double manhattan(Cell a, Cell b) { return std::abs(a.row - b.row) + std::abs(a.col - b.col); }

}  // namespace morl

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "morl/env/environment.hpp"
#include "morl/error.hpp"

namespace morl {

/// Objectworld: randomly placed objects with an inner and an outer color.
/// Reward regions are defined by proximity to outer colors 0 and 1.
struct ObjectworldSpec {
  int n = 10;
  int n_objects = 15;
  int n_colors = 2;
  std::uint64_t seed = 0;
  double positive_reward = 1.0;
  double negative_reward = -1.0;
  /// Positive region: within `outer0_radius` of outer color 0 and `outer1_radius` of outer color 1.
  double outer0_radius = 3.0;
  double outer1_radius = 2.0;
  double slip_prob = 0.1;
  double gamma = 0.9;

  /// Weights over the objectives (positive region, negative region).
  WeightVector weights() const { return {positive_reward, negative_reward}; }
};

struct PlacedObject {
  Cell cell;
  int inner_color = 0;
  int outer_color = 0;
};

enum class Region : int { kNegative = -1, kZero = 0, kPositive = 1 };

struct ObjectworldEnvironment {
  Environment env;
  std::vector<PlacedObject> objects;
  std::vector<Region> regions;  // per state
};

/// Actions: 0 up, 1 right, 2 down, 3 left, 4 stay.
inline constexpr std::size_t kObjectworldActions = 5;

namespace detail {

inline double nearest_distance(Cell c, const std::vector<PlacedObject>& objects, bool outer, int color, double missing) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& o : objects) {
    if ((outer ? o.outer_color : o.inner_color) != color) continue;
    best = std::min(best, std::hypot(o.cell.row - c.row, o.cell.col - c.col));
  }
  return std::isfinite(best) ? best : missing;
}

}  // namespace detail

/// Objectives are (positive-region indicator, negative-region indicator) on
/// every step out of a cell. Features are the Euclidean distances to the
/// nearest object of each inner color, then of each outer color (length 2C).
/// A color with no object reports the distance 2n.
inline ObjectworldEnvironment build_objectworld(const ObjectworldSpec& spec) {
  if (spec.n < 2) throw InvalidArgument("objectworld side length must be >= 2");
  if (spec.n_colors < 2) throw InvalidArgument("objectworld needs at least two colors");
  if (spec.n_objects < 0 || spec.n_objects > spec.n * spec.n) {
    throw InvalidArgument("cannot place " + std::to_string(spec.n_objects) + " objects on " +
                          std::to_string(spec.n * spec.n) + " free cells");
  }
  if (!(spec.slip_prob >= 0.0 && spec.slip_prob < 1.0)) throw InvalidArgument("slip_prob must lie in [0, 1)");

  std::mt19937_64 rng(spec.seed);
  const auto n_cells = static_cast<std::uint64_t>(spec.n * spec.n);
  // Partial Fisher-Yates over cell indices.
  std::vector<int> order(n_cells);
  for (std::uint64_t i = 0; i < n_cells; ++i) order[i] = static_cast<int>(i);
  ObjectworldEnvironment out;
  for (int k = 0; k < spec.n_objects; ++k) {
    const auto j = static_cast<std::uint64_t>(k) + detail::uniform_index(rng, n_cells - static_cast<std::uint64_t>(k));
    std::swap(order[static_cast<std::size_t>(k)], order[j]);
    const int idx = order[static_cast<std::size_t>(k)];
    PlacedObject o;
    o.cell = {idx / spec.n, idx % spec.n};
    o.outer_color = static_cast<int>(detail::uniform_index(rng, static_cast<std::uint64_t>(spec.n_colors)));
    o.inner_color = static_cast<int>(detail::uniform_index(rng, static_cast<std::uint64_t>(spec.n_colors)));
    out.objects.push_back(o);
  }

  auto& env = out.env;
  env.grid_rows = env.grid_cols = spec.n;
  env.objective_names = {"positive_region", "negative_region"};
  for (int c = 0; c < spec.n_colors; ++c) env.feature_names.push_back("inner_" + std::to_string(c));
  for (int c = 0; c < spec.n_colors; ++c) env.feature_names.push_back("outer_" + std::to_string(c));

  const double missing = 2.0 * spec.n;
  for (int r = 0; r < spec.n; ++r) {
    for (int c = 0; c < spec.n; ++c) {
      const Cell cell{r, c};
      env.cells.push_back(cell);
      FeatureVector f;
      for (int color = 0; color < spec.n_colors; ++color) {
        f.push_back(detail::nearest_distance(cell, out.objects, false, color, missing));
      }
      for (int color = 0; color < spec.n_colors; ++color) {
        f.push_back(detail::nearest_distance(cell, out.objects, true, color, missing));
      }
      env.features.push_back(std::move(f));

      const double d0 = detail::nearest_distance(cell, out.objects, true, 0, std::numeric_limits<double>::infinity());
      const double d1 = detail::nearest_distance(cell, out.objects, true, 1, std::numeric_limits<double>::infinity());
      Region region = Region::kZero;
      if (d0 <= spec.outer0_radius && d1 <= spec.outer1_radius) {
        region = Region::kPositive;
      } else if (d0 <= spec.outer0_radius) {
        region = Region::kNegative;
      }
      out.regions.push_back(region);
    }
  }

  constexpr std::array<Cell, kObjectworldActions> moves{{{-1, 0}, {0, 1}, {1, 0}, {0, -1}, {0, 0}}};
  TabularMDP::Builder builder(env.cells.size(), kObjectworldActions, 2, spec.gamma);
  const double other = spec.slip_prob / static_cast<double>(kObjectworldActions - 1);
  for (StateIndex s = 0; s < env.cells.size(); ++s) {
    const Cell here = env.cells[s];
    const std::array<double, 2> r{out.regions[s] == Region::kPositive ? 1.0 : 0.0,
                                  out.regions[s] == Region::kNegative ? 1.0 : 0.0};
    for (std::size_t a = 0; a < kObjectworldActions; ++a) {
      for (std::size_t actual = 0; actual < kObjectworldActions; ++actual) {
        const double p = actual == a ? 1.0 - spec.slip_prob : other;
        if (p == 0.0) continue;
        Cell to{here.row + moves[actual].row, here.col + moves[actual].col};
        if (to.row < 0 || to.col < 0 || to.row >= spec.n || to.col >= spec.n) to = here;
        builder.add_transition(s, a, static_cast<StateIndex>(to.row * spec.n + to.col), p, r);
      }
    }
  }
  env.mdp = builder.build();
  return out;
}

}  // namespace morl

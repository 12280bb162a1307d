#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "morl/mdp.hpp"

namespace morl {

using FeatureVector = std::vector<double>;

struct Cell {
  int row = 0;
  int col = 0;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// A compiled benchmark task: the vector-reward MDP plus what the regression
/// and reporting layers need to know about each state.
struct Environment {
  TabularMDP mdp;
  /// One fixed-length feature vector per state.
  std::vector<FeatureVector> features;
  std::vector<std::string> feature_names;
  std::vector<std::string> objective_names;
  /// Grid coordinate of every state, used for heatmap output.
  std::vector<Cell> cells;
  int grid_rows = 0;
  int grid_cols = 0;
  std::optional<StateIndex> start_state;

  std::optional<StateIndex> state_at(Cell c) const {
    for (StateIndex s = 0; s < cells.size(); ++s) {
      if (cells[s] == c) return s;
    }
    return std::nullopt;
  }
};

namespace detail {

// mt19937_64 is specified bit-exactly; the std distributions are not, so the
// helpers below keep seeded runs reproducible across standard libraries.
inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

}  // namespace morl

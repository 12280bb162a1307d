#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <vector>

#include "morl/env/gridworld.hpp"
#include "morl/env/objectworld.hpp"
#include "morl/env/pendulum.hpp"
#include "morl/env/rollout.hpp"
#include "morl/solver.hpp"

using namespace morl;

namespace {

void expect_rows_normalized(const TabularMDP& mdp) {
  for (StateIndex s = 0; s < mdp.n_states(); ++s) {
    for (ActionIndex a = 0; a < mdp.n_actions(); ++a) {
      const auto [lo, hi] = mdp.row(s, a);
      if (mdp.is_terminal(s)) {
        EXPECT_EQ(lo, hi);
        continue;
      }
      double total = 0.0;
      for (auto k = lo; k < hi; ++k) {
        EXPECT_GE(mdp.prob(k), 0.0);
        total += mdp.prob(k);
      }
      EXPECT_NEAR(total, 1.0, 1e-12) << "row (" << s << ", " << a << ")";
    }
  }
}

}  // namespace

TEST(Gridworld, DefaultHas24StatesAndNormalizedRows) {
  const auto env = build_gridworld({});
  EXPECT_EQ(env.mdp.n_states(), 24u);
  EXPECT_EQ(env.mdp.n_actions(), 4u);
  EXPECT_EQ(env.mdp.n_objectives(), 3u);
  EXPECT_FALSE(env.state_at({2, 2}).has_value());
  expect_rows_normalized(env.mdp);
  ASSERT_EQ(env.features.size(), 24u);
  for (StateIndex s = 0; s < 24; ++s) {
    EXPECT_EQ(env.features[s], (FeatureVector{double(env.cells[s].row), double(env.cells[s].col)}));
  }
}

TEST(Gridworld, NoSlipMeansDeterministicMoves) {
  const auto env = build_gridworld({.slip_prob = 0.0});
  for (StateIndex s = 0; s < env.mdp.n_states(); ++s) {
    if (env.mdp.is_terminal(s)) continue;
    for (ActionIndex a = 0; a < 4; ++a) {
      const auto [lo, hi] = env.mdp.row(s, a);
      ASSERT_EQ(hi - lo, 1u);
      EXPECT_EQ(env.mdp.prob(lo), 1.0);
    }
  }
}

TEST(Gridworld, SlipSplitsOverOtherActionsAndWallsBlock) {
  const auto env = build_gridworld({});
  // (2,1) moving right hits the wall at (2,2) and stays put with probability 0.9.
  const auto s = *env.state_at({2, 1});
  const auto [lo, hi] = env.mdp.row(s, 1);
  double stay = 0.0, up = 0.0;
  for (auto k = lo; k < hi; ++k) {
    if (env.mdp.next(k) == s) stay += env.mdp.prob(k);
    if (env.cells[env.mdp.next(k)] == Cell{1, 1}) up += env.mdp.prob(k);
  }
  EXPECT_NEAR(stay, 0.9, 1e-12);
  EXPECT_NEAR(up, 0.1 / 3.0, 1e-12);
}

TEST(Gridworld, RewardComponentsAreIndicators) {
  const auto env = build_gridworld({});
  for (std::size_t k = 0; k < env.mdp.n_entries(); ++k) {
    EXPECT_EQ(env.mdp.reward(k, 0), 1.0);
    EXPECT_EQ(env.mdp.reward(k, 1), 0.0);
    EXPECT_EQ(env.mdp.reward(k, 2), 0.0);
  }
  const auto pos = *env.state_at({0, 4});
  const auto neg = *env.state_at({1, 4});
  EXPECT_EQ(env.mdp.terminal_reward(pos, 1), 1.0);
  EXPECT_EQ(env.mdp.terminal_reward(pos, 2), 0.0);
  EXPECT_EQ(env.mdp.terminal_reward(neg, 2), 1.0);
  EXPECT_EQ(env.mdp.terminal_reward(neg, 1), 0.0);
}

TEST(Gridworld, RejectsInvalidSpecs) {
  EXPECT_THROW(build_gridworld({.walls = {{0, 4}}}), InvalidArgument);
  EXPECT_THROW(build_gridworld({.walls = {{4, 0}}}), InvalidArgument);
  EXPECT_THROW(build_gridworld({.walls = {{7, 7}}}), InvalidArgument);
  EXPECT_THROW(build_gridworld({.slip_prob = 1.0}), InvalidArgument);
  EXPECT_THROW(build_gridworld({.negative_terminal = {0, 4}}), InvalidArgument);
}

TEST(Gridworld, OptimalPolicyRoutesAroundTheWallToTheGoal) {
  const auto env = build_gridworld({});
  const auto sol = solve(scalarize(env.mdp, WeightVector({-0.02, 1.0, -1.0})));
  Cell at{4, 0};
  std::set<Cell> visited;
  for (int step = 0; step < 20 && !env.mdp.is_terminal(*env.state_at(at)); ++step) {
    visited.insert(at);
    const auto move = kGridMoves[sol.policy(*env.state_at(at))];
    Cell to{at.row + move.row, at.col + move.col};
    ASSERT_TRUE(env.state_at(to).has_value()) << "policy walks into a wall or off the grid";
    at = to;
  }
  EXPECT_EQ(at, (Cell{0, 4}));
  EXPECT_FALSE(visited.count({1, 4}));
}

TEST(Objectworld, SameSeedSamePlacementAndFeatures) {
  const auto a = build_objectworld({.seed = 42});
  const auto b = build_objectworld({.seed = 42});
  ASSERT_EQ(a.objects.size(), 15u);
  for (std::size_t i = 0; i < a.objects.size(); ++i) {
    EXPECT_EQ(a.objects[i].cell, b.objects[i].cell);
    EXPECT_EQ(a.objects[i].inner_color, b.objects[i].inner_color);
    EXPECT_EQ(a.objects[i].outer_color, b.objects[i].outer_color);
  }
  EXPECT_EQ(a.env.features, b.env.features);
  EXPECT_EQ(a.regions, b.regions);
  const auto c = build_objectworld({.seed = 43});
  EXPECT_NE(a.env.features, c.env.features);
}

TEST(Objectworld, ObjectsOccupyDistinctCellsAndColorsInRange) {
  const auto w = build_objectworld({.seed = 5});
  std::set<Cell> cells;
  for (const auto& o : w.objects) {
    cells.insert(o.cell);
    EXPECT_GE(o.inner_color, 0);
    EXPECT_LT(o.inner_color, 2);
    EXPECT_GE(o.outer_color, 0);
    EXPECT_LT(o.outer_color, 2);
  }
  EXPECT_EQ(cells.size(), w.objects.size());
}

TEST(Objectworld, RegionsFollowTheDistanceRule) {
  for (std::uint64_t seed : {0u, 1u, 42u}) {
    const ObjectworldSpec spec{.seed = seed};
    const auto w = build_objectworld(spec);
    ASSERT_EQ(w.env.features.size(), 100u);
    for (StateIndex s = 0; s < 100; ++s) {
      const auto c = w.env.cells[s];
      double d[2] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
      for (const auto& o : w.objects) {
        const double dist = std::sqrt(double((o.cell.row - c.row) * (o.cell.row - c.row) +
                                             (o.cell.col - c.col) * (o.cell.col - c.col)));
        d[o.outer_color] = std::min(d[o.outer_color], dist);
      }
      Region expected = Region::kZero;
      if (d[0] <= 3.0 && d[1] <= 2.0) {
        expected = Region::kPositive;
      } else if (d[0] <= 3.0) {
        expected = Region::kNegative;
      }
      EXPECT_EQ(w.regions[s], expected);
      EXPECT_EQ(w.env.features[s].size(), 4u);
      EXPECT_DOUBLE_EQ(w.env.features[s][2], std::isfinite(d[0]) ? d[0] : 20.0);
      EXPECT_DOUBLE_EQ(w.env.features[s][3], std::isfinite(d[1]) ? d[1] : 20.0);

      const auto r = scalarize(w.env.mdp, WeightVector({0.7, -1.0}));
      const auto [lo, hi] = r.row(s, 0);
      const double want = expected == Region::kPositive ? 0.7 : expected == Region::kNegative ? -1.0 : 0.0;
      for (auto k = lo; k < hi; ++k) EXPECT_EQ(r.reward(k), want);
    }
  }
}

TEST(Objectworld, RowsNormalizedAndTooManyObjectsRejected) {
  expect_rows_normalized(build_objectworld({}).env.mdp);
  EXPECT_THROW(build_objectworld({.n = 3, .n_objects = 10}), InvalidArgument);
}

TEST(Pendulum, TorquesLinearlySpaced) {
  EXPECT_EQ(PendulumSpec{}.torques(), (std::vector<double>{-2.0, -1.0, 0.0, 1.0, 2.0}));
}

TEST(Pendulum, AngleWrapsIntoHalfOpenInterval) {
  EXPECT_DOUBLE_EQ(wrap_angle(std::numbers::pi), std::numbers::pi);
  EXPECT_DOUBLE_EQ(wrap_angle(-std::numbers::pi), std::numbers::pi);
  EXPECT_NEAR(wrap_angle(3.0 * std::numbers::pi / 2.0), -std::numbers::pi / 2.0, 1e-15);
  EXPECT_NEAR(wrap_angle(0.25), 0.25, 1e-15);
}

TEST(Pendulum, UprightAtRestEarnsZero) {
  const PendulumSpec spec{.theta_bins = 11, .thetadot_bins = 11};
  const auto env = build_pendulum(spec);
  const PendulumGrid grid(spec);
  const auto s = grid.state(5, 5);
  ASSERT_EQ(grid.theta(5), 0.0);
  ASSERT_EQ(grid.thetadot(5), 0.0);
  const auto r = scalarize(env.mdp, spec.weight_vector());
  const auto [lo, hi] = r.row(s, 2);
  for (auto k = lo; k < hi; ++k) EXPECT_EQ(r.reward(k), 0.0);
}

TEST(Pendulum, HangingDownCostsPiSquared) {
  const PendulumSpec spec{.theta_bins = 10, .thetadot_bins = 11};
  const auto env = build_pendulum(spec);
  const PendulumGrid grid(spec);
  ASSERT_DOUBLE_EQ(grid.theta(0), std::numbers::pi);
  const auto r = scalarize(env.mdp, WeightVector({1.0, 0.1, 0.001}));
  const auto [lo, hi] = r.row(grid.state(0, 5), 2);
  for (auto k = lo; k < hi; ++k) EXPECT_NEAR(r.reward(k), -9.8696, 1e-4);
}

TEST(Pendulum, RowsNormalizedAndFeaturesMatchGrid) {
  const PendulumSpec spec{.theta_bins = 15, .thetadot_bins = 13};
  const auto env = build_pendulum(spec);
  expect_rows_normalized(env.mdp);
  const PendulumGrid grid(spec);
  for (int i = 0; i < 15; ++i) {
    for (int j = 0; j < 13; ++j) {
      const auto& f = env.features[grid.state(i, j)];
      ASSERT_EQ(f.size(), 3u);
      EXPECT_DOUBLE_EQ(f[0], std::cos(grid.theta(i)));
      EXPECT_DOUBLE_EQ(f[1], std::sin(grid.theta(i)));
      EXPECT_DOUBLE_EQ(f[2], grid.thetadot(j));
      EXPECT_LE(std::abs(f[2]), spec.max_speed);
    }
  }
  EXPECT_THROW(build_pendulum({.theta_bins = 2}), InvalidArgument);
}

TEST(Pendulum, EulerStepMatchesHandComputation) {
  const PendulumSpec spec;
  const auto [th, thd] = pendulum_step(spec, 0.5, 1.0, 2.0);
  const double acc = 15.0 * std::sin(0.5) + 3.0 * 2.0;
  EXPECT_DOUBLE_EQ(thd, 1.0 + acc * 0.05);
  EXPECT_DOUBLE_EQ(th, 0.5 + thd * 0.05);
  EXPECT_EQ(pendulum_step(spec, 0.0, 7.99, 2.0).second, 8.0);
}

// Refining both axes (each coarse node stays a node) moves V* at the shared
// nodes by less at every level.
TEST(Pendulum, RefinementChangesShrink) {
  const int theta[3] = {11, 22, 44};
  const int dot[3] = {11, 21, 41};
  std::vector<double> v[3];
  for (int l = 0; l < 3; ++l) {
    const PendulumSpec spec{.theta_bins = theta[l], .thetadot_bins = dot[l]};
    v[l] = value_iteration(scalarize(build_pendulum(spec).mdp, spec.weight_vector())).value.v;
  }
  const PendulumGrid coarse(PendulumSpec{.theta_bins = 11, .thetadot_bins = 11});
  double change[2] = {0.0, 0.0};
  for (int i = 0; i < 11; ++i) {
    for (int j = 0; j < 11; ++j) {
      double at[3];
      for (int l = 0; l < 3; ++l) {
        const int scale = 1 << l;
        // theta node i sits at (i - 5) steps from upright; on a grid of 11 * scale
        // bins upright is index 11 * scale / 2.
        const int fi = (i - 5) * scale + (11 * scale) / 2;
        const int fj = j * scale;
        const PendulumGrid g(PendulumSpec{.theta_bins = theta[l], .thetadot_bins = dot[l]});
        ASSERT_NEAR(g.theta(fi), coarse.theta(i), 1e-12);
        ASSERT_NEAR(g.thetadot(fj), coarse.thetadot(j), 1e-12);
        at[l] = v[l][g.state(fi, fj)];
      }
      change[0] = std::max(change[0], std::abs(at[1] - at[0]));
      change[1] = std::max(change[1], std::abs(at[2] - at[1]));
    }
  }
  EXPECT_LT(change[1], change[0]);
}

TEST(Rollout, ZeroHorizonIsEmpty) {
  const auto env = build_gridworld({});
  const auto mdp = scalarize(env.mdp, WeightVector({-0.02, 1.0, -1.0}));
  const auto t = rollout(mdp, Policy{std::vector<ActionIndex>(24, 0)}, *env.state_at({4, 0}), 0, 1);
  EXPECT_TRUE(t.steps.empty());
  EXPECT_EQ(t.final_state, *env.state_at({4, 0}));
}

TEST(Rollout, DeterministicDynamicsIgnoreTheSeed) {
  const auto env = build_gridworld({.slip_prob = 0.0});
  const auto mdp = scalarize(env.mdp, WeightVector({-0.02, 1.0, -1.0}));
  const auto sol = solve(mdp);
  const auto a = rollout(mdp, sol.policy, *env.state_at({4, 0}), 50, 1);
  const auto b = rollout(mdp, sol.policy, *env.state_at({4, 0}), 50, 999);
  ASSERT_EQ(a.steps.size(), b.steps.size());
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    EXPECT_EQ(a.steps[i].state, b.steps[i].state);
    EXPECT_EQ(a.steps[i].action, b.steps[i].action);
  }
  EXPECT_TRUE(a.terminated);
}

TEST(Rollout, SameSeedSameTrajectory) {
  const auto env = build_gridworld({.slip_prob = 0.3});
  const auto mdp = scalarize(env.mdp, WeightVector({-0.02, 1.0, -1.0}));
  const auto pi = solve(mdp).policy;
  const auto a = rollout(mdp, pi, 0, 200, 17);
  const auto b = rollout(mdp, pi, 0, 200, 17);
  ASSERT_EQ(a.steps.size(), b.steps.size());
  for (std::size_t i = 0; i < a.steps.size(); ++i) EXPECT_EQ(a.steps[i].state, b.steps[i].state);
}

TEST(Rollout, OptimalPolicyUsuallyReachesPositiveTerminal) {
  const auto env = build_gridworld({});
  const auto mdp = scalarize(env.mdp, WeightVector({-0.02, 1.0, -1.0}));
  const auto pi = solve(mdp).policy;
  const auto goal = *env.state_at({0, 4});
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto t = rollout(mdp, pi, *env.state_at({4, 0}), 1000, seed);
    if (t.terminated && t.final_state == goal) ++hits;
  }
  EXPECT_GE(hits, 95);
}

TEST(Rollout, RejectsBadInputs) {
  const auto env = build_gridworld({});
  const auto mdp = scalarize(env.mdp, WeightVector({-0.02, 1.0, -1.0}));
  EXPECT_THROW(rollout(mdp, Policy{std::vector<ActionIndex>(24, 0)}, 99, 10, 0), InvalidArgument);
  EXPECT_THROW(rollout(mdp, [](StateIndex) { return ActionIndex{9}; }, 0, 10, 0), InvalidArgument);
}

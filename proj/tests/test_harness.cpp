#include <gtest/gtest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "morl/harness/suites.hpp"

using namespace morl;
using namespace morl::harness;

namespace {

SweepConfig living_sweep() {
  return gridworld_config({}, GridworldAxis::kLiving, default_gridworld_values(GridworldAxis::kLiving), {}, "default");
}

}  // namespace

TEST(Dataset, LivingSweepHas576Rows) {
  const auto c = living_sweep();
  const auto d = build_dataset(c);
  // 6 training weights x 24 states x 4 actions.
  EXPECT_EQ(d.size(), 576u);
  EXPECT_EQ(d.inputs.rows(), 576);
  EXPECT_EQ(d.inputs.cols(), 4);
  EXPECT_EQ(d.column_names, (std::vector<std::string>{"row", "col", "action", "w_living"}));
  for (std::size_t r = 0; r < d.size(); ++r) {
    const auto& row = d.rows[r];
    EXPECT_EQ(d.inputs(static_cast<Eigen::Index>(r), 2), double(row.action));
    EXPECT_EQ(d.inputs(static_cast<Eigen::Index>(r), 3), c.train_weights[row.weight_index][0]);
  }
}

TEST(Dataset, TargetsAreOptimalQValues) {
  const auto c = living_sweep();
  const auto d = build_dataset(c);
  const auto sol = solve(scalarize(c.env->mdp, c.train_weights[2]));
  for (std::size_t r = 0; r < d.size(); ++r) {
    const auto& row = d.rows[r];
    if (row.weight_index != 2) continue;
    EXPECT_NEAR(d.targets[static_cast<Eigen::Index>(r)], sol.q(row.state, row.action), 1e-12);
  }
}

TEST(Dataset, BuildIsDeterministic) {
  const auto c = living_sweep();
  const auto a = build_dataset(c);
  const auto b = build_dataset(c);
  EXPECT_EQ(a.inputs, b.inputs);
  EXPECT_EQ(a.targets, b.targets);
  EXPECT_EQ(a.env_hash, b.env_hash);
}

TEST(Dataset, StrideKeepsAnchorLatticeAndDenseBlock) {
  SweepConfig c = living_sweep();
  c.state_stride = 2;
  c.stride_anchor = {4, 0};
  const auto d = build_dataset(c);
  std::vector<bool> seen(c.env->mdp.n_states(), false);
  for (const auto& r : d.rows) seen[r.state] = true;
  for (StateIndex s = 0; s < seen.size(); ++s) {
    const auto cell = c.env->cells[s];
    EXPECT_EQ(seen[s], (4 - cell.row) % 2 == 0 && cell.col % 2 == 0) << cell.row << "," << cell.col;
  }
  c.dense_radius = 1;
  const auto dense = build_dataset(c);
  bool has_3_1 = false;
  for (const auto& r : dense.rows) has_3_1 |= c.env->cells[r.state] == Cell{3, 1};
  EXPECT_TRUE(has_3_1);
}

TEST(Sweep, EmptyEvalListStillFits) {
  auto c = living_sweep();
  c.eval_weights.clear();
  const auto r = run_sweep(c);
  EXPECT_TRUE(r.reports.empty());
  EXPECT_EQ(r.dataset.size(), 576u);
}

TEST(Sweep, EvaluatingATrainingWeightReproducesTargets) {
  auto c = living_sweep();
  const auto d = build_dataset(c);
  const auto model = fit_model(d, c.gp);
  const auto rep = evaluate_weight(c, model, c.train_weights[3]);
  EXPECT_LE(rep.mse, 1e-8);
  EXPECT_FALSE(rep.extrapolated);
}

TEST(Sweep, LivingErrorsOrderedAndExtrapolationWorst) {
  const auto r = run_sweep(living_sweep());
  ASSERT_EQ(r.reports.size(), 5u);
  const auto& rep = r.reports;
  EXPECT_TRUE(rep[4].extrapolated);
  for (int i = 0; i < 4; ++i) {
    EXPECT_FALSE(rep[i].extrapolated);
    EXPECT_GT(rep[4].mse, 10.0 * rep[i].mse);
    EXPECT_GT(rep[4].median_sigma, rep[i].median_sigma);
  }
  EXPECT_LT(rep[1].mse, rep[0].mse);
  EXPECT_LT(rep[1].mse, rep[2].mse);
  for (const auto& e : rep) {
    EXPECT_EQ(e.actual_q.size(), 96u);
    EXPECT_EQ(e.predicted_std.size(), 96u);
  }
}

TEST(Sweep, NegativeAxisBestAtInteriorPoint) {
  const auto c = gridworld_config({}, GridworldAxis::kNegative, default_gridworld_values(GridworldAxis::kNegative), {},
                                  "default");
  const auto r = run_sweep(c);
  ASSERT_EQ(r.reports.size(), 5u);
  const auto best = std::min_element(r.reports.begin(), r.reports.end(),
                                     [](const auto& a, const auto& b) { return a.mse < b.mse; });
  EXPECT_EQ(best->weight, -3.6);
  EXPECT_TRUE(r.reports.back().extrapolated);
  EXPECT_FALSE(r.reports.front().extrapolated);
}

TEST(Sweep, SingleTrainingWeightCannotTrackTheAxis) {
  auto c = living_sweep();
  c.train_weights = {c.train_weights[0]};
  const auto r = run_sweep(c);
  const auto full = run_sweep(living_sweep());
  for (std::size_t i = 0; i < r.reports.size(); ++i) EXPECT_GT(r.reports[i].mse, full.reports[i].mse);
}

TEST(SweepValidation, RejectsInconsistentConfigs) {
  auto c = living_sweep();
  c.eval_weights.push_back(c.train_weights[1]);
  EXPECT_THROW(build_dataset(c), InvalidArgument);

  c = living_sweep();
  c.train_weights.push_back(c.train_weights[0]);
  EXPECT_THROW(build_dataset(c), InvalidArgument);

  c = living_sweep();
  c.train_weights.clear();
  EXPECT_THROW(build_dataset(c), InvalidArgument);

  c = living_sweep();
  c.axes = {7};
  EXPECT_THROW(build_dataset(c), InvalidArgument);

  c = living_sweep();
  c.eval_weights = {WeightVector({1.0, 2.0})};
  EXPECT_THROW(run_sweep(c), InvalidArgument);

  c = living_sweep();
  c.state_stride = 0;
  EXPECT_THROW(build_dataset(c), InvalidArgument);

  c = living_sweep();
  c.gp.nu = 3.0;
  EXPECT_THROW(run_sweep(c), InvalidArgument);
}

TEST(SweepValidation, ConvergenceFailureNamesTheWeight) {
  // Objectworld never terminates, so with contraction 0.999999 the residual
  // is still far above tolerance at the iteration cap.
  const ObjectworldSpec spec{.gamma = 0.999999};
  const auto c = objectworld_config(build_objectworld(spec), spec, {0.25}, {}, {}, "slow");
  try {
    (void)solve_at(c, c.train_weights[0]);
    FAIL() << "expected a convergence failure";
  } catch (const ConvergenceError& e) {
    EXPECT_NE(std::string(e.what()).find("0.25"), std::string::npos) << e.what();
  }
}

TEST(PendulumSuite, SmallRunProducesEpisodeFractions) {
  const PendulumSpec spec{.theta_bins = 15, .thetadot_bins = 13, .episode_limit = 60};
  GpSettings gp;
  gp.noise_variance = 1e-6;
  const auto c = pendulum_config(spec, {0.1, 0.01, 0.0001}, {0.001}, gp,
                                 {.state_stride = 2, .dense_radius = 2}, "small");
  const auto r = run_pendulum_suite(c, {.episodes = 5, .horizon = 60, .seed = 3});
  ASSERT_EQ(r.episodes.size(), 5u);
  for (const auto& e : r.episodes) {
    EXPECT_LE(e.steps, 60u);
    EXPECT_EQ(e.fractions.size() + e.excluded, e.steps);
    for (double f : e.fractions) EXPECT_GE(f, 0.0);
    EXPECT_LE(e.q1, e.median);
    EXPECT_LE(e.median, e.q3);
  }
  const auto again = run_pendulum_suite(c, {.episodes = 5, .horizon = 60, .seed = 3});
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(r.episodes[i].fractions, again.episodes[i].fractions);
}

TEST(Stats, MedianAndQuantile) {
  EXPECT_EQ(median({}), 0.0);
  EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(median({4.0, 1.0, 2.0, 3.0}), 2.5);
  EXPECT_EQ(quantile({1.0, 2.0, 3.0, 4.0, 5.0}, 0.25), 2.0);
  EXPECT_EQ(quantile({1.0, 2.0, 3.0, 4.0}, 0.75), 3.25);
  EXPECT_EQ(quantile({7.0}, 0.9), 7.0);
}

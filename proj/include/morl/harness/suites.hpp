#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "morl/env/gridworld.hpp"
#include "morl/env/objectworld.hpp"
#include "morl/env/pendulum.hpp"
#include "morl/env/rollout.hpp"
#include "morl/harness/sweep.hpp"

namespace morl::harness {

enum class GridworldAxis { kLiving, kNegative, kPositive };

/// Training and evaluation values reproducing the three gridworld tables.
struct GridworldSweepValues {
  std::vector<double> train;
  std::vector<double> eval;
};

inline GridworldSweepValues default_gridworld_values(GridworldAxis axis) {
  switch (axis) {
    case GridworldAxis::kLiving:
      return {{0.0, -0.1, -0.2, -0.3, -0.4, -0.5}, {-0.16, -0.23, -0.37, -0.45, -0.60}};
    case GridworldAxis::kNegative:
      return {{-1.0, -1.5, -2.0, -2.5, -3.0, -3.5, -4.0, -4.5, -5.0}, {-1.3, -2.2, -3.6, -4.7, -6.0}};
    case GridworldAxis::kPositive:
      return {{1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0}, {1.3, 2.2, 3.6, 4.7, 6.0}};
  }
  return {};
}

inline std::size_t objective_of(GridworldAxis axis) {
  switch (axis) {
    case GridworldAxis::kLiving: return 0;
    case GridworldAxis::kPositive: return 1;
    case GridworldAxis::kNegative: return 2;
  }
  return 0;
}

inline SweepConfig gridworld_config(const GridworldSpec& spec, GridworldAxis axis, const GridworldSweepValues& values,
                                    const GpSettings& gp_settings, const std::string& description) {
  SweepConfig c;
  c.name = axis == GridworldAxis::kLiving ? "gridworld-living"
           : axis == GridworldAxis::kNegative ? "gridworld-negative"
                                              : "gridworld-positive";
  c.env = std::make_shared<const Environment>(build_gridworld(spec));
  c.env_description = description;
  c.axes = {objective_of(axis)};
  c.train_weights = along_axis(spec.weights(), c.axes[0], values.train);
  c.eval_weights = along_axis(spec.weights(), c.axes[0], values.eval);
  c.gp = gp_settings;
  return c;
}

inline std::vector<EvalReport> run_gridworld_suite(const SweepConfig& config) { return run_sweep(config).reports; }

struct ObjectworldSuiteResult {
  SweepResult sweep;
  ObjectworldEnvironment world;
  /// Per report: mean |Q_pred - Q_actual| over positive-region states, and over all states.
  std::vector<double> positive_region_mae;
  std::vector<double> global_mae;
};

inline SweepConfig objectworld_config(const ObjectworldEnvironment& world, const ObjectworldSpec& spec,
                                      const std::vector<double>& train, const std::vector<double>& eval,
                                      const GpSettings& gp_settings, const std::string& description) {
  SweepConfig c;
  c.name = "objectworld";
  c.env = std::make_shared<const Environment>(world.env);
  c.env_description = description;
  c.axes = {0};
  c.train_weights = along_axis(spec.weights(), 0, train);
  c.eval_weights = along_axis(spec.weights(), 0, eval);
  c.gp = gp_settings;
  c.seed = spec.seed;
  return c;
}

inline ObjectworldSuiteResult run_objectworld_suite(const SweepConfig& config, const ObjectworldEnvironment& world) {
  ObjectworldSuiteResult out;
  out.world = world;
  out.sweep = run_sweep(config);
  const auto n_actions = config.env->mdp.n_actions();
  for (const auto& rep : out.sweep.reports) {
    double pos = 0.0, all = 0.0;
    std::size_t n_pos = 0;
    for (std::size_t k = 0; k < rep.actual_q.size(); ++k) {
      const double e = std::abs(rep.predicted_q[k] - rep.actual_q[k]);
      all += e;
      if (world.regions[k / n_actions] == Region::kPositive) {
        pos += e;
        ++n_pos;
      }
    }
    out.global_mae.push_back(all / static_cast<double>(rep.actual_q.size()));
    out.positive_region_mae.push_back(n_pos > 0 ? pos / static_cast<double>(n_pos) : 0.0);
  }
  return out;
}

inline constexpr double kFractionDenominatorEps = 1e-6;

/// Per-step |Q_pred - Q_actual| / |Q_actual| along one greedy episode.
struct EpisodeDiffReport {
  std::size_t episode = 0;
  StateIndex start_state = 0;
  std::size_t steps = 0;
  /// Steps skipped because |Q_actual| < kFractionDenominatorEps.
  std::size_t excluded = 0;
  std::vector<double> fractions;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};

struct PendulumSuiteOptions {
  std::size_t episodes = 5;
  std::size_t horizon = 1000;
  std::uint64_t seed = 0;
};

struct PendulumSuiteResult {
  SweepResult sweep;
  std::vector<EpisodeDiffReport> episodes;
};

/// Which grid states feed the regressor, and how the varying weight enters it.
struct PendulumSampling {
  int state_stride = 4;
  int dense_radius = 5;
  AxisTransform transform = AxisTransform::kIdentity;
};

inline SweepConfig pendulum_config(const PendulumSpec& spec, const std::vector<double>& train_w3,
                                   const std::vector<double>& eval_w3, const GpSettings& gp_settings,
                                   const PendulumSampling& sampling, const std::string& description) {
  SweepConfig c;
  c.name = "pendulum";
  c.env = std::make_shared<const Environment>(build_pendulum(spec));
  c.env_description = description;
  c.axes = {2};
  c.transform = sampling.transform;
  c.train_weights = along_axis(spec.weight_vector(), 2, train_w3);
  c.eval_weights = along_axis(spec.weight_vector(), 2, eval_w3);
  c.gp = gp_settings;
  c.state_stride = sampling.state_stride;
  // The stride lattice and the dense block are centred on the upright, motionless node.
  c.stride_anchor = {spec.theta_bins / 2, spec.thetadot_bins / 2};
  c.dense_radius = sampling.dense_radius;
  return c;
}

/// Start nodes drawn uniformly over all angles with |theta_dot| <= 1.
inline StateIndex pendulum_start_state(const Environment& env, std::mt19937_64& rng) {
  std::vector<StateIndex> candidates;
  for (StateIndex s = 0; s < env.features.size(); ++s) {
    if (std::abs(env.features[s][2]) <= 1.0) candidates.push_back(s);
  }
  return candidates[morl::detail::uniform_index(rng, candidates.size())];
}

/// Fits on the training weights, then for each evaluation weight rolls out the
/// exact optimal policy and compares predicted with actual Q along the way.
inline PendulumSuiteResult run_pendulum_suite(const SweepConfig& config, const PendulumSuiteOptions& opts) {
  PendulumSuiteResult out;
  out.sweep = run_sweep(config);
  if (out.sweep.reports.empty()) return out;
  const auto& rep = out.sweep.reports.front();
  const auto& env = *config.env;
  const auto n_actions = env.mdp.n_actions();
  const auto mdp = scalarize(env.mdp, rep.weights);

  std::mt19937_64 starts(opts.seed);
  for (std::size_t e = 0; e < opts.episodes; ++e) {
    EpisodeDiffReport ep;
    ep.episode = e;
    ep.start_state = pendulum_start_state(env, starts);
    const auto traj = rollout(mdp, rep.actual_policy, ep.start_state, opts.horizon, opts.seed * 1000003ULL + e);
    ep.steps = traj.steps.size();
    for (const auto& step : traj.steps) {
      const auto k = step.state * n_actions + step.action;
      const double actual = rep.actual_q[k];
      if (std::abs(actual) < kFractionDenominatorEps) {
        ++ep.excluded;
        continue;
      }
      ep.fractions.push_back(std::abs(rep.predicted_q[k] - actual) / std::abs(actual));
    }
    ep.q1 = quantile(ep.fractions, 0.25);
    ep.median = quantile(ep.fractions, 0.5);
    ep.q3 = quantile(ep.fractions, 0.75);
    out.episodes.push_back(std::move(ep));
  }
  return out;
}

}  // namespace morl::harness

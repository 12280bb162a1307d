#pragma once

#include <json.hpp>

#include <string>

#include "morl/cli/config.hpp"
#include "morl/cli/report.hpp"
#include "morl/harness/suites.hpp"
#include "morl/harness/bound_check.hpp"

namespace morl::cli {

struct RunOutcome {
  ArtifactSet artifacts;
  /// Human-readable table for standard output.
  std::string summary;
  /// False when a verification suite recorded a failure.
  bool checks_passed = true;
};

namespace detail {

inline void add_grid_artifacts(ArtifactSet& out, const Environment& env, const std::vector<harness::EvalReport>& reps) {
  out.add("values_actual.csv", emit_value_grid(env, reps, false));
  out.add("values_predicted.csv", emit_value_grid(env, reps, true));
  out.add("policy.csv", emit_policy_grid(env, reps));
}

inline std::string kernel_line(const harness::SweepResult& r) {
  std::string s = "kernel: matern nu=" + format("%g", gp::nu_value(r.kernel.smoothness())) + " length_scales=";
  for (std::size_t i = 0; i < r.kernel.length_scales().size(); ++i) {
    s += (i ? "," : "") + format("%g", r.kernel.length_scales()[i]);
  }
  return s + " rows=" + std::to_string(r.dataset.size()) + "\n";
}

inline RunOutcome run_gridworld(const ExperimentConfig& c) {
  auto sweep = harness::gridworld_config(c.gridworld, gridworld_axis(c.kind), {c.train, c.eval}, c.gp, c.effective.dump());
  sweep.name = to_string(c.kind);
  sweep.solver_tol = c.solver_tol;
  const auto result = harness::run_sweep(sweep);

  RunOutcome out;
  const auto table = emit_table(result.reports);
  out.artifacts.add("report.csv", table);
  out.artifacts.add("report.json", json{{"config", c.effective}, {"sweep", sweep_json(sweep, result)}}.dump(2) + "\n");
  add_grid_artifacts(out.artifacts, *sweep.env, result.reports);
  out.summary = table + kernel_line(result);
  return out;
}

inline RunOutcome run_objectworld(const ExperimentConfig& c) {
  const auto world = build_objectworld(c.objectworld);
  auto sweep = harness::objectworld_config(world, c.objectworld, c.train, c.eval, c.gp, c.effective.dump());
  sweep.solver_tol = c.solver_tol;
  const auto result = harness::run_objectworld_suite(sweep, world);

  json objects = json::array();
  for (const auto& o : world.objects) {
    objects.push_back({{"cell", cell_json(o.cell)}, {"inner_color", o.inner_color}, {"outer_color", o.outer_color}});
  }
  std::vector<int> regions;
  for (auto r : world.regions) regions.push_back(static_cast<int>(r));

  RunOutcome out;
  const auto table = emit_table(result.sweep.reports);
  auto doc = json{{"config", c.effective}, {"sweep", sweep_json(sweep, result.sweep)}};
  doc["objects"] = objects;
  doc["regions"] = regions;
  doc["positive_region_mae"] = result.positive_region_mae;
  doc["global_mae"] = result.global_mae;
  out.artifacts.add("report.csv", table);
  out.artifacts.add("report.json", doc.dump(2) + "\n");
  add_grid_artifacts(out.artifacts, world.env, result.sweep.reports);

  out.summary = table + kernel_line(result.sweep);
  for (std::size_t i = 0; i < result.sweep.reports.size(); ++i) {
    out.summary += "mae at " + format("%g", result.sweep.reports[i].weight) +
                   ": positive region " + format("%.3e", result.positive_region_mae[i]) + ", all states " +
                   format("%.3e", result.global_mae[i]) + "\n";
  }
  return out;
}

inline RunOutcome run_pendulum(const ExperimentConfig& c) {
  auto sweep = harness::pendulum_config(c.pendulum, c.train, c.eval, c.gp, c.sampling, c.effective.dump());
  sweep.solver_tol = c.solver_tol;
  const harness::PendulumSuiteOptions opts{
      .episodes = c.episodes, .horizon = static_cast<std::size_t>(c.pendulum.episode_limit), .seed = c.seed};
  const auto result = harness::run_pendulum_suite(sweep, opts);

  json episodes = json::array();
  for (const auto& e : result.episodes) {
    episodes.push_back({{"episode", e.episode},
                        {"start_state", e.start_state},
                        {"steps", e.steps},
                        {"excluded", e.excluded},
                        {"q1", e.q1},
                        {"median", e.median},
                        {"q3", e.q3}});
  }
  RunOutcome out;
  const auto table = emit_table(result.sweep.reports);
  auto doc = json{{"config", c.effective}, {"sweep", sweep_json(sweep, result.sweep)}};
  doc["episodes"] = episodes;
  const auto summary = emit_episode_summary(result.episodes);
  out.artifacts.add("report.csv", table);
  out.artifacts.add("report.json", doc.dump(2) + "\n");
  out.artifacts.add("episode_diffs.csv", emit_episode_diffs(result.episodes));
  out.artifacts.add("episode_summary.csv", summary);
  out.summary = table + kernel_line(result.sweep) + summary;
  return out;
}

inline RunOutcome run_verify_bounds(const ExperimentConfig& c) {
  const auto env = build_gridworld(c.gridworld);
  const auto report = harness::verify_difference_bounds(env.mdp, c.pairs, c.seed);

  RunOutcome out;
  out.checks_passed = report.all_pass();
  const auto bounds = std::to_string(report.pair_passes()) + "/" + std::to_string(report.pairs.size());
  const auto convex = std::to_string(report.convexity_passes()) + "/" + std::to_string(report.convexity.size());
  out.artifacts.add("report.csv", emit_bound_checks(report));
  out.artifacts.add("convexity.csv", emit_convexity_checks(report));
  out.artifacts.add("report.json", json{{"config", c.effective},
                                        {"bound_passes", report.pair_passes()},
                                        {"pairs", report.pairs.size()},
                                        {"convexity_passes", report.convexity_passes()},
                                        {"triples", report.convexity.size()},
                                        {"pass", out.checks_passed}}
                                           .dump(2) + "\n");
  out.summary = "value and Q bounds: " + bounds + " pairs pass\nmidpoint convexity: " + convex + " triples pass\n" +
                (out.checks_passed ? "PASS\n" : "FAIL\n");
  return out;
}

}  // namespace detail

/// Runs one experiment entirely in memory. Nothing touches the disk until the
/// caller commits the returned artifacts.
inline RunOutcome run_experiment(const ExperimentConfig& c) {
  switch (c.kind) {
    case ExperimentKind::kObjectworld: return detail::run_objectworld(c);
    case ExperimentKind::kPendulum: return detail::run_pendulum(c);
    case ExperimentKind::kVerifyBounds: return detail::run_verify_bounds(c);
    default: return detail::run_gridworld(c);
  }
}

}  // namespace morl::cli

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "morl/env/environment.hpp"
#include "morl/error.hpp"

namespace morl {

/// Torque-limited pendulum discretized on a uniform (theta, theta_dot) grid.
/// Angle nodes are periodic with theta = 0 always a node; velocity nodes span
/// [-max_speed, max_speed] including both ends.
struct PendulumSpec {
  int theta_bins = 51;
  int thetadot_bins = 51;
  double dt = 0.05;
  double gravity = 10.0;
  double mass = 1.0;
  double length = 1.0;
  double max_speed = 8.0;
  double max_torque = 2.0;
  int n_torques = 5;
  int episode_limit = 1000;
  double gamma = 0.9;
  std::array<double, 3> weights{1.0, 0.1, 0.001};

  WeightVector weight_vector() const { return {weights[0], weights[1], weights[2]}; }

  std::vector<double> torques() const {
    std::vector<double> t(static_cast<std::size_t>(n_torques));
    for (int i = 0; i < n_torques; ++i) t[static_cast<std::size_t>(i)] = -max_torque + 2.0 * max_torque * i / (n_torques - 1);
    return t;
  }
};

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double theta) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double t = std::fmod(theta + std::numbers::pi, two_pi);
  if (t < 0.0) t += two_pi;
  t -= std::numbers::pi;
  return t == -std::numbers::pi ? std::numbers::pi : t;
}

/// Grid geometry shared by the builder and tests.
class PendulumGrid {
 public:
  explicit PendulumGrid(const PendulumSpec& spec)
      : n_theta_(spec.theta_bins), n_dot_(spec.thetadot_bins), max_speed_(spec.max_speed) {}

  int theta_bins() const noexcept { return n_theta_; }
  int thetadot_bins() const noexcept { return n_dot_; }
  double theta_step() const noexcept { return 2.0 * std::numbers::pi / n_theta_; }
  double thetadot_step() const noexcept { return 2.0 * max_speed_ / (n_dot_ - 1); }

  double theta(int i) const { return wrap_angle((i - n_theta_ / 2) * theta_step()); }
  double thetadot(int j) const { return max_speed_ * (2 * j - (n_dot_ - 1)) / (n_dot_ - 1); }
  StateIndex state(int i, int j) const { return static_cast<StateIndex>(i * n_dot_ + j); }

  /// Bilinear weights of a continuous state over its (up to) 4 surrounding nodes.
  std::vector<std::pair<StateIndex, double>> interpolate(double theta, double thetadot) const {
    const double u = wrap_angle(theta) / theta_step() + n_theta_ / 2;
    const double fu = std::floor(u);
    const double a = u - fu;
    const auto wrap_index = [&](long k) { return static_cast<int>(((k % n_theta_) + n_theta_) % n_theta_); };
    const int i0 = wrap_index(static_cast<long>(fu));
    const int i1 = wrap_index(static_cast<long>(fu) + 1);

    double v = (std::clamp(thetadot, -max_speed_, max_speed_) + max_speed_) / thetadot_step();
    int j0 = std::min(static_cast<int>(std::floor(v)), n_dot_ - 2);
    const double b = v - j0;
    const int j1 = j0 + 1;

    std::vector<std::pair<StateIndex, double>> out;
    const auto add = [&](int i, int j, double w) {
      if (w > 0.0) out.emplace_back(state(i, j), w);
    };
    add(i0, j0, (1.0 - a) * (1.0 - b));
    add(i1, j0, a * (1.0 - b));
    add(i0, j1, (1.0 - a) * b);
    add(i1, j1, a * b);
    return out;
  }

 private:
  int n_theta_;
  int n_dot_;
  double max_speed_;
};

/// Semi-implicit Euler step: theta_dot' = clip(theta_dot + (3g/2L sin theta + 3/(mL^2) u) dt),
/// theta' = theta + theta_dot' dt.
inline std::pair<double, double> pendulum_step(const PendulumSpec& spec, double theta, double thetadot, double torque) {
  const double acc = 3.0 * spec.gravity / (2.0 * spec.length) * std::sin(theta) +
                     3.0 / (spec.mass * spec.length * spec.length) * torque;
  const double new_dot = std::clamp(thetadot + acc * spec.dt, -spec.max_speed, spec.max_speed);
  return {wrap_angle(theta + new_dot * spec.dt), new_dot};
}

/// Objectives (-theta^2, -theta_dot^2, -u^2) evaluated at the current node, so
/// their weighted sum is the standard quadratic pendulum cost. Features are
/// (cos theta, sin theta, theta_dot); cells are (theta index, theta_dot index).
inline Environment build_pendulum(const PendulumSpec& spec) {
  if (spec.theta_bins < 3 || spec.thetadot_bins < 3) throw InvalidArgument("pendulum needs at least 3 bins per axis");
  if (spec.n_torques < 2) throw InvalidArgument("pendulum needs at least 2 torque levels");
  if (!(spec.dt > 0.0 && spec.max_speed > 0.0 && spec.mass > 0.0 && spec.length > 0.0)) {
    throw InvalidArgument("pendulum physical constants must be positive");
  }
  const PendulumGrid grid(spec);
  const auto torques = spec.torques();

  Environment env;
  env.grid_rows = spec.theta_bins;
  env.grid_cols = spec.thetadot_bins;
  env.feature_names = {"cos_theta", "sin_theta", "theta_dot"};
  env.objective_names = {"neg_theta_sq", "neg_theta_dot_sq", "neg_torque_sq"};

  TabularMDP::Builder builder(static_cast<std::size_t>(spec.theta_bins * spec.thetadot_bins), torques.size(), 3,
                              spec.gamma);
  for (int i = 0; i < spec.theta_bins; ++i) {
    for (int j = 0; j < spec.thetadot_bins; ++j) {
      const double th = grid.theta(i);
      const double thd = grid.thetadot(j);
      const StateIndex s = grid.state(i, j);
      env.cells.push_back({i, j});
      env.features.push_back({std::cos(th), std::sin(th), thd});
      for (std::size_t a = 0; a < torques.size(); ++a) {
        const std::array r{-th * th, -thd * thd, -torques[a] * torques[a]};
        const auto [nth, nthd] = pendulum_step(spec, th, thd, torques[a]);
        for (const auto& [next, w] : grid.interpolate(nth, nthd)) builder.add_transition(s, a, next, w, r);
      }
    }
  }
  env.mdp = builder.build();
  return env;
}

}  // namespace morl

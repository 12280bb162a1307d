#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "morl/env/environment.hpp"
#include "morl/error.hpp"
#include "morl/gp/model.hpp"
#include "morl/mdp.hpp"
#include "morl/solver.hpp"

namespace morl::harness {

enum class AxisTransform { kIdentity, kLog10 };

struct GpSettings {
  double nu = 1.5;
  double noise_variance = 1e-10;
  std::vector<double> length_scale_candidates = gp::default_length_scale_grid();
  /// Tune one length scale per input dimension instead of a single isotropic one.
  bool per_dimension = false;
  /// When set, tuning is skipped.
  std::optional<double> length_scale;
};

/// One interpolation experiment: which weights vary, where the MDP is solved
/// for training, and where predictions are scored.
struct SweepConfig {
  std::string name;
  std::shared_ptr<const Environment> env;
  /// Canonical description of the environment parameters, hashed into dataset provenance.
  std::string env_description;
  /// Objective indices whose weights vary; they form the weight part of every GP input row.
  std::vector<std::size_t> axes;
  AxisTransform transform = AxisTransform::kIdentity;
  std::vector<WeightVector> train_weights;
  std::vector<WeightVector> eval_weights;
  GpSettings gp;
  /// Only states whose cell row and column sit a multiple of the stride away
  /// from `stride_anchor` enter the training set.
  int state_stride = 1;
  Cell stride_anchor;
  /// States within this Chebyshev distance of the anchor are always kept.
  int dense_radius = 0;
  double solver_tol = 1e-9;
  std::uint64_t seed = 0;
};

/// Weights equal to `base` except along `axis`, one per value.
inline std::vector<WeightVector> along_axis(const WeightVector& base, std::size_t axis, const std::vector<double>& values) {
  std::vector<WeightVector> out;
  for (double v : values) {
    std::vector<double> w(base.values().begin(), base.values().end());
    w.at(axis) = v;
    out.emplace_back(std::move(w));
  }
  return out;
}

namespace detail {

inline std::vector<double> axis_inputs(const SweepConfig& c, const WeightVector& w) {
  std::vector<double> out;
  for (auto axis : c.axes) {
    const double v = w[axis];
    if (c.transform == AxisTransform::kLog10) {
      if (!(v > 0.0)) throw InvalidArgument("log10 weight axis needs positive weights");
      out.push_back(std::log10(v));
    } else {
      out.push_back(v);
    }
  }
  return out;
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace detail

inline void validate(const SweepConfig& c) {
  if (!c.env) throw InvalidArgument("sweep '" + c.name + "' has no environment");
  if (c.train_weights.empty()) throw InvalidArgument("sweep '" + c.name + "' has no training weights");
  if (c.axes.empty()) throw InvalidArgument("sweep '" + c.name + "' varies no weight axis");
  if (c.state_stride < 1) throw InvalidArgument("state stride must be >= 1");
  if (c.dense_radius < 0) throw InvalidArgument("dense radius must be >= 0");
  const auto n_obj = c.env->mdp.n_objectives();
  for (auto a : c.axes) {
    if (a >= n_obj) throw InvalidArgument("weight axis " + std::to_string(a) + " out of range");
  }
  for (const auto* list : {&c.train_weights, &c.eval_weights}) {
    for (const auto& w : *list) {
      if (w.size() != n_obj) {
        throw InvalidArgument("weight vector has length " + std::to_string(w.size()) + " but the environment has " +
                              std::to_string(n_obj) + " objectives");
      }
    }
  }
  for (std::size_t i = 0; i < c.train_weights.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (c.train_weights[i] == c.train_weights[j]) throw InvalidArgument("training weights must be pairwise distinct");
    }
  }
  for (const auto& e : c.eval_weights) {
    if (std::find(c.train_weights.begin(), c.train_weights.end(), e) != c.train_weights.end()) {
      throw InvalidArgument("evaluation weights must be disjoint from training weights");
    }
  }
}

struct DatasetRow {
  StateIndex state = 0;
  ActionIndex action = 0;
  std::size_t weight_index = 0;
};

/// GP training set: features(s) ++ [action] ++ weight-axis values -> Q*(s, a | w).
struct Dataset {
  gp::InputMatrix inputs;
  Eigen::VectorXd targets;
  std::vector<DatasetRow> rows;
  std::vector<std::string> column_names;
  std::uint64_t env_hash = 0;
  double solver_tol = 0.0;

  std::size_t size() const noexcept { return rows.size(); }
};

/// One GP input row for (s, a, w).
inline std::vector<double> input_row(const SweepConfig& c, StateIndex s, ActionIndex a, const WeightVector& w) {
  std::vector<double> row = c.env->features.at(s);
  row.push_back(static_cast<double>(a));
  const auto axis = detail::axis_inputs(c, w);
  row.insert(row.end(), axis.begin(), axis.end());
  return row;
}

inline bool in_training_subset(const SweepConfig& c, StateIndex s) {
  if (c.state_stride == 1 || c.env->cells.empty()) return true;
  const auto cell = c.env->cells[s];
  const int dr = std::abs(cell.row - c.stride_anchor.row);
  const int dc = std::abs(cell.col - c.stride_anchor.col);
  if (std::max(dr, dc) <= c.dense_radius) return true;
  return std::abs(cell.row - c.stride_anchor.row) % c.state_stride == 0 &&
         std::abs(cell.col - c.stride_anchor.col) % c.state_stride == 0;
}

/// Exact solution at one weight; failures name the weight.
inline Solution solve_at(const SweepConfig& c, const WeightVector& w) {
  try {
    return solve(scalarize(c.env->mdp, w), {.tol = c.solver_tol});
  } catch (const ConvergenceError& e) {
    std::string ws;
    for (double x : w.values()) ws += (ws.empty() ? "" : ", ") + std::to_string(x);
    throw ConvergenceError("at weight (" + ws + "): " + e.what(), e.residual(), e.iterations());
  }
}

inline Dataset build_dataset(const SweepConfig& c) {
  validate(c);
  const auto& env = *c.env;
  const auto n_actions = env.mdp.n_actions();
  std::vector<StateIndex> states;
  for (StateIndex s = 0; s < env.mdp.n_states(); ++s) {
    if (in_training_subset(c, s)) states.push_back(s);
  }

  Dataset d;
  d.env_hash = detail::fnv1a(c.env_description);
  d.solver_tol = c.solver_tol;
  d.column_names = env.feature_names;
  d.column_names.emplace_back("action");
  for (auto a : c.axes) {
    const auto& name = a < env.objective_names.size() ? env.objective_names[a] : "w" + std::to_string(a);
    d.column_names.push_back(c.transform == AxisTransform::kLog10 ? "log10_" + name : "w_" + name);
  }

  const auto n_rows = c.train_weights.size() * states.size() * n_actions;
  const auto dims = static_cast<Eigen::Index>(d.column_names.size());
  d.inputs.resize(static_cast<Eigen::Index>(n_rows), dims);
  d.targets.resize(static_cast<Eigen::Index>(n_rows));
  d.rows.reserve(n_rows);
  Eigen::Index r = 0;
  for (std::size_t wi = 0; wi < c.train_weights.size(); ++wi) {
    const auto& w = c.train_weights[wi];
    const auto sol = solve_at(c, w);
    for (StateIndex s : states) {
      for (ActionIndex a = 0; a < n_actions; ++a, ++r) {
        const auto row = input_row(c, s, a, w);
        for (Eigen::Index j = 0; j < dims; ++j) d.inputs(r, j) = row[static_cast<std::size_t>(j)];
        d.targets[r] = sol.q(s, a);
        d.rows.push_back({s, a, wi});
      }
    }
  }
  return d;
}

/// Fits the regressor, tuning the isotropic length scale unless one is fixed.
inline gp::Model fit_model(const Dataset& d, const GpSettings& settings) {
  const auto nu = gp::smoothness_from_nu(settings.nu);
  gp::MaternKernel kernel;
  if (settings.length_scale) {
    kernel = gp::MaternKernel(nu, *settings.length_scale);
  } else if (settings.per_dimension) {
    kernel = gp::tune_length_scales_per_dimension(d.inputs, d.targets, nu, settings.noise_variance,
                                                  settings.length_scale_candidates);
  } else {
    kernel = gp::tune_length_scale(d.inputs, d.targets, nu, settings.noise_variance, settings.length_scale_candidates);
  }
  return gp::fit(d.inputs, d.targets, kernel, settings.noise_variance);
}

struct EvalReport {
  /// Value of the first sweep axis at this weight (the table's first column).
  double weight = 0.0;
  WeightVector weights;
  bool extrapolated = false;
  double mse = 0.0;
  double median_sigma = 0.0;
  /// Flattened s * n_actions + a.
  std::vector<double> actual_q;
  std::vector<double> predicted_q;
  std::vector<double> predicted_std;
  /// max over actions.
  std::vector<double> actual_v;
  std::vector<double> predicted_v;
  Policy actual_policy;
  Policy predicted_policy;
  double wall_ms = 0.0;
};

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Linear-interpolation quantile (the usual "type 7" definition).
inline double quantile(std::vector<double> v, double p) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline bool is_extrapolated(const SweepConfig& c, const WeightVector& w) {
  for (auto axis : c.axes) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& t : c.train_weights) {
      lo = std::min(lo, t[axis]);
      hi = std::max(hi, t[axis]);
    }
    if (w[axis] < lo || w[axis] > hi) return true;
  }
  return false;
}

/// Solves the environment exactly at `w` (the oracle), predicts Q at every
/// (s, a, w) and scores the prediction.
inline EvalReport evaluate_weight(const SweepConfig& c, const gp::Model& model, const WeightVector& w) {
  const auto start = std::chrono::steady_clock::now();
  const auto& mdp = c.env->mdp;
  const auto n_states = mdp.n_states();
  const auto n_actions = mdp.n_actions();
  const auto sol = solve_at(c, w);

  gp::InputMatrix queries(static_cast<Eigen::Index>(n_states * n_actions), static_cast<Eigen::Index>(model.dims()));
  for (StateIndex s = 0; s < n_states; ++s) {
    for (ActionIndex a = 0; a < n_actions; ++a) {
      const auto row = input_row(c, s, a, w);
      for (std::size_t j = 0; j < row.size(); ++j) {
        queries(static_cast<Eigen::Index>(s * n_actions + a), static_cast<Eigen::Index>(j)) = row[j];
      }
    }
  }
  const auto preds = gp::predict(model, queries);

  EvalReport rep;
  rep.weight = w[c.axes.front()];
  rep.weights = w;
  rep.extrapolated = is_extrapolated(c, w);
  rep.actual_q.assign(sol.q.values().begin(), sol.q.values().end());
  rep.predicted_q.reserve(preds.size());
  rep.predicted_std.reserve(preds.size());
  double sq = 0.0;
  for (std::size_t k = 0; k < preds.size(); ++k) {
    rep.predicted_q.push_back(preds[k].mean);
    rep.predicted_std.push_back(preds[k].std);
    const double e = preds[k].mean - rep.actual_q[k];
    sq += e * e;
  }
  rep.mse = sq / static_cast<double>(preds.size());
  rep.median_sigma = median(rep.predicted_std);

  QFunction predicted(n_states, n_actions);
  for (StateIndex s = 0; s < n_states; ++s) {
    for (ActionIndex a = 0; a < n_actions; ++a) predicted(s, a) = rep.predicted_q[s * n_actions + a];
  }
  rep.actual_v = sol.value.v;
  rep.predicted_v = state_values(predicted).v;
  rep.actual_policy = sol.policy;
  rep.predicted_policy = greedy_policy(predicted);
  rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

struct SweepResult {
  Dataset dataset;
  gp::MaternKernel kernel;
  double jitter = 0.0;
  std::vector<EvalReport> reports;
};

inline SweepResult run_sweep(const SweepConfig& c) {
  SweepResult out;
  out.dataset = build_dataset(c);
  const auto model = fit_model(out.dataset, c.gp);
  out.kernel = model.kernel();
  out.jitter = model.jitter();
  for (const auto& w : c.eval_weights) out.reports.push_back(evaluate_weight(c, model, w));
  return out;
}

}  // namespace morl::harness

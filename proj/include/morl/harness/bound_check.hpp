#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "morl/bounds.hpp"
#include "morl/env/environment.hpp"
#include "morl/mdp.hpp"
#include "morl/solver.hpp"

namespace morl::harness {

using WeightPair = std::pair<WeightVector, WeightVector>;

struct BoundCheckOptions {
  /// Tolerance of the exact solves behind each observation.
  double solver_tol = 1e-12;
  double slack = 1e-8;
  /// Allowed midpoint-convexity violation.
  double convexity_tol = 2e-9;
  /// Multiplies both bounds. Anything below 1 deliberately weakens them, which
  /// the suite should then catch.
  double bound_scale = 1.0;
};

struct PairCheck {
  WeightVector w;
  WeightVector w2;
  double observed_v = 0.0;
  double bound_v = 0.0;
  double observed_q = 0.0;
  double bound_q = 0.0;
  bool pass = false;
};

/// V*(s | midpoint) against the chord between the two endpoints.
struct ConvexityCheck {
  WeightVector w;
  WeightVector w2;
  double max_violation = 0.0;
  bool pass = false;
};

struct BoundCheckReport {
  std::vector<PairCheck> pairs;
  std::vector<ConvexityCheck> convexity;

  std::size_t pair_passes() const {
    return static_cast<std::size_t>(std::count_if(pairs.begin(), pairs.end(), [](const auto& p) { return p.pass; }));
  }
  std::size_t convexity_passes() const {
    return static_cast<std::size_t>(
        std::count_if(convexity.begin(), convexity.end(), [](const auto& c) { return c.pass; }));
  }
  bool all_pass() const { return pair_passes() == pairs.size() && convexity_passes() == convexity.size(); }
};

/// `count` pairs with every component drawn uniformly from [lo, hi).
inline std::vector<WeightPair> random_weight_pairs(std::size_t n_objectives, std::size_t count, std::uint64_t seed,
                                                   double lo = -2.0, double hi = 2.0) {
  std::mt19937_64 rng(seed);
  const auto draw = [&] {
    std::vector<double> w(n_objectives);
    for (auto& x : w) x = lo + (hi - lo) * morl::detail::uniform_unit(rng);
    return WeightVector(std::move(w));
  };
  std::vector<WeightPair> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto a = draw();
    auto b = draw();
    out.emplace_back(std::move(a), std::move(b));
  }
  return out;
}

inline WeightVector midpoint(const WeightVector& a, const WeightVector& b) {
  std::vector<double> m(a.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = 0.5 * (a[i] + b[i]);
  return WeightVector(std::move(m));
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// Checks the value and Q difference bounds on every pair, and midpoint
/// convexity of V* along every triple (w, w2, midpoint).
inline BoundCheckReport verify_difference_bounds(const TabularMDP& mdp, const std::vector<WeightPair>& pairs,
                                     const std::vector<WeightPair>& triples, const BoundCheckOptions& opts = {}) {
  const ValueIterationOptions vi{.tol = opts.solver_tol};
  BoundCheckReport report;
  for (const auto& [w, w2] : pairs) {
    const auto a = solve(scalarize(mdp, w), vi);
    const auto b = solve(scalarize(mdp, w2), vi);
    PairCheck c{w, w2};
    c.observed_v = max_abs_diff(a.value.v, b.value.v);
    c.observed_q = max_abs_diff(a.q.values(), b.q.values());
    c.bound_v = opts.bound_scale * value_diff_bound(mdp, w, w2);
    c.bound_q = opts.bound_scale * q_diff_bound(mdp, w, w2);
    c.pass = c.observed_v <= c.bound_v + opts.slack && c.observed_q <= c.bound_q + opts.slack;
    report.pairs.push_back(std::move(c));
  }
  for (const auto& [w, w2] : triples) {
    const auto a = solve(scalarize(mdp, w), vi).value.v;
    const auto b = solve(scalarize(mdp, w2), vi).value.v;
    const auto m = solve(scalarize(mdp, midpoint(w, w2)), vi).value.v;
    ConvexityCheck c{w, w2};
    for (std::size_t s = 0; s < m.size(); ++s) {
      c.max_violation = std::max(c.max_violation, m[s] - 0.5 * (a[s] + b[s]));
    }
    c.pass = c.max_violation <= opts.convexity_tol;
    report.convexity.push_back(std::move(c));
  }
  return report;
}

/// Seeded suite: `count` random pairs for the bounds and another `count` for convexity.
inline BoundCheckReport verify_difference_bounds(const TabularMDP& mdp, std::size_t count, std::uint64_t seed,
                                     const BoundCheckOptions& opts = {}) {
  const auto pairs = random_weight_pairs(mdp.n_objectives(), count, seed);
  const auto triples = random_weight_pairs(mdp.n_objectives(), count, seed ^ 0x9e3779b97f4a7c15ULL);
  return verify_difference_bounds(mdp, pairs, triples, opts);
}

}  // namespace morl::harness

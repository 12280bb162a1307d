#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "morl/error.hpp"

namespace morl {

using StateIndex = std::size_t;
using ActionIndex = std::size_t;

/// Scalarization weights, one per reward objective.
class WeightVector {
 public:
  WeightVector() = default;
  explicit WeightVector(std::vector<double> w) : w_(std::move(w)) {
    for (double x : w_) {
      if (!std::isfinite(x)) throw InvalidArgument("weight vector has a non-finite entry");
    }
  }
  WeightVector(std::initializer_list<double> w) : WeightVector(std::vector<double>(w)) {}

  std::size_t size() const noexcept { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  std::span<const double> values() const noexcept { return w_; }

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

 private:
  std::vector<double> w_;
};

namespace detail {

// Sparse transition structure shared between a vector-reward MDP and its
// scalarized views. Row (s, a) occupies entries [row_begin[s*A+a], row_begin[s*A+a+1]).
struct TransitionStructure {
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  double gamma = 0.9;
  std::vector<std::size_t> row_begin;
  std::vector<StateIndex> next;
  std::vector<double> prob;
  std::vector<bool> terminal;

  std::size_t row_index(StateIndex s, ActionIndex a) const { return s * n_actions + a; }
};

}  // namespace detail

/// Common read-only accessors over the transition structure.
class TransitionView {
 public:
  std::size_t n_states() const noexcept { return structure_->n_states; }
  std::size_t n_actions() const noexcept { return structure_->n_actions; }
  double gamma() const noexcept { return structure_->gamma; }
  bool is_terminal(StateIndex s) const { return structure_->terminal[s]; }

  /// Half-open range of entry indices for the row (s, a).
  std::pair<std::size_t, std::size_t> row(StateIndex s, ActionIndex a) const {
    const auto r = structure_->row_index(s, a);
    return {structure_->row_begin[r], structure_->row_begin[r + 1]};
  }
  std::size_t n_entries() const noexcept { return structure_->next.size(); }
  StateIndex next(std::size_t entry) const { return structure_->next[entry]; }
  double prob(std::size_t entry) const { return structure_->prob[entry]; }

 protected:
  TransitionView() : structure_(std::make_shared<const detail::TransitionStructure>()) {}
  explicit TransitionView(std::shared_ptr<const detail::TransitionStructure> s)
      : structure_(std::move(s)) {}

  std::shared_ptr<const detail::TransitionStructure> structure_;
};

class ScalarMDP;

/// Finite MDP whose reward is a vector of objectives, stored per transition
/// entry as R_i(s, a, s'). Terminal states are absorbing, have no outgoing
/// transitions, and carry a fixed per-objective terminal reward that becomes
/// their value once scalarized. Each entry also carries a weight-independent
/// offset channel used for reward shaping.
class TabularMDP : public TransitionView {
 public:
  class Builder;

  /// Empty MDP with no states.
  TabularMDP() = default;

  std::size_t n_objectives() const noexcept { return n_objectives_; }
  double reward(std::size_t entry, std::size_t objective) const {
    return rewards_[entry * n_objectives_ + objective];
  }
  std::span<const double> rewards(std::size_t entry) const {
    return {rewards_.data() + entry * n_objectives_, n_objectives_};
  }
  double offset(std::size_t entry) const { return offsets_[entry]; }
  double terminal_reward(StateIndex s, std::size_t objective) const {
    return terminal_rewards_[s * n_objectives_ + objective];
  }
  double terminal_offset(StateIndex s) const { return terminal_offsets_[s]; }

  /// Largest |r_i| over every transition entry and terminal reward.
  double max_abs_reward(std::size_t objective) const {
    double m = 0.0;
    for (std::size_t k = 0; k < n_entries(); ++k) m = std::max(m, std::abs(reward(k, objective)));
    for (StateIndex s = 0; s < n_states(); ++s) {
      if (is_terminal(s)) m = std::max(m, std::abs(terminal_reward(s, objective)));
    }
    return m;
  }

  /// Same transitions and rewards with `offset(entry) + delta[entry]` as the offset channel.
  TabularMDP with_offsets_added(std::span<const double> delta) const {
    if (delta.size() != n_entries()) throw InvalidArgument("offset delta has wrong length");
    TabularMDP out = *this;
    for (std::size_t k = 0; k < delta.size(); ++k) out.offsets_[k] += delta[k];
    return out;
  }

 private:
  friend class Builder;
  friend ScalarMDP scalarize(const TabularMDP&, const WeightVector&);

  std::size_t n_objectives_ = 0;
  std::vector<double> rewards_;
  std::vector<double> offsets_;
  std::vector<double> terminal_rewards_;
  std::vector<double> terminal_offsets_;
};

/// Incremental construction of a TabularMDP. `build()` validates the result.
class TabularMDP::Builder {
 public:
  Builder(std::size_t n_states, std::size_t n_actions, std::size_t n_objectives, double gamma)
      : n_states_(n_states),
        n_actions_(n_actions),
        n_objectives_(n_objectives),
        gamma_(gamma),
        rows_(n_states * n_actions),
        terminal_(n_states, false),
        terminal_rewards_(n_states * n_objectives, 0.0) {
    if (n_states == 0 || n_actions == 0) throw InvalidArgument("MDP needs at least one state and action");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidArgument("gamma must lie in [0, 1]");
  }

  Builder& set_terminal(StateIndex s, std::span<const double> terminal_rewards) {
    check_state(s);
    check_rewards(terminal_rewards);
    terminal_[s] = true;
    std::copy(terminal_rewards.begin(), terminal_rewards.end(),
              terminal_rewards_.begin() + static_cast<std::ptrdiff_t>(s * n_objectives_));
    return *this;
  }

  /// Adds p(next | s, a) with its reward vector. Repeated (s, a, next) with an
  /// identical reward vector is merged into one entry.
  Builder& add_transition(StateIndex s, ActionIndex a, StateIndex next, double prob,
                          std::span<const double> rewards) {
    check_state(s);
    check_state(next);
    if (a >= n_actions_) throw InvalidArgument("action index out of range");
    check_rewards(rewards);
    if (!std::isfinite(prob) || prob < 0.0) throw InvalidArgument("transition probability must be finite and >= 0");
    auto& row = rows_[s * n_actions_ + a];
    for (auto& e : row) {
      if (e.next == next && std::equal(e.rewards.begin(), e.rewards.end(), rewards.begin())) {
        e.prob += prob;
        return *this;
      }
    }
    row.push_back({next, prob, std::vector<double>(rewards.begin(), rewards.end())});
    return *this;
  }

  TabularMDP build() const {
    auto st = std::make_shared<detail::TransitionStructure>();
    st->n_states = n_states_;
    st->n_actions = n_actions_;
    st->gamma = gamma_;
    st->terminal = terminal_;
    st->row_begin.reserve(rows_.size() + 1);
    st->row_begin.push_back(0);

    TabularMDP mdp;
    mdp.n_objectives_ = n_objectives_;
    mdp.terminal_rewards_ = terminal_rewards_;
    mdp.terminal_offsets_.assign(n_states_, 0.0);
    for (StateIndex s = 0; s < n_states_; ++s) {
      for (ActionIndex a = 0; a < n_actions_; ++a) {
        const auto& row = rows_[s * n_actions_ + a];
        if (terminal_[s]) {
          if (!row.empty()) {
            throw InvalidArgument("terminal state " + std::to_string(s) + " has outgoing transitions");
          }
        } else {
          double total = 0.0;
          for (const auto& e : row) total += e.prob;
          if (row.empty() || std::abs(total - 1.0) > 1e-12) {
            throw InvalidArgument("transition row (" + std::to_string(s) + ", " + std::to_string(a) +
                                  ") sums to " + std::to_string(total) + ", expected 1");
          }
        }
        for (const auto& e : row) {
          st->next.push_back(e.next);
          st->prob.push_back(e.prob);
          mdp.rewards_.insert(mdp.rewards_.end(), e.rewards.begin(), e.rewards.end());
        }
        st->row_begin.push_back(st->next.size());
      }
    }
    mdp.offsets_.assign(st->next.size(), 0.0);
    mdp.structure_ = std::move(st);
    return mdp;
  }

 private:
  struct Entry {
    StateIndex next;
    double prob;
    std::vector<double> rewards;
  };

  void check_state(StateIndex s) const {
    if (s >= n_states_) throw InvalidArgument("state index " + std::to_string(s) + " out of range");
  }
  void check_rewards(std::span<const double> r) const {
    if (r.size() != n_objectives_) {
      throw InvalidArgument("reward vector has " + std::to_string(r.size()) + " entries, MDP has " +
                            std::to_string(n_objectives_) + " objectives");
    }
    for (double x : r) {
      if (!std::isfinite(x)) throw InvalidArgument("reward entries must be finite");
    }
  }

  std::size_t n_states_;
  std::size_t n_actions_;
  std::size_t n_objectives_;
  double gamma_;
  std::vector<std::vector<Entry>> rows_;
  std::vector<bool> terminal_;
  std::vector<double> terminal_rewards_;
};

/// Single-reward view of a TabularMDP: R(s, a, s') per entry and a fixed
/// value for every terminal state.
class ScalarMDP : public TransitionView {
 public:
  double reward(std::size_t entry) const { return rewards_[entry]; }
  double terminal_value(StateIndex s) const { return terminal_values_[s]; }
  std::span<const double> rewards() const noexcept { return rewards_; }
  std::span<const double> terminal_values() const noexcept { return terminal_values_; }

  /// Expected immediate reward sum_{s'} p(s'|s,a) R(s,a,s').
  double expected_reward(StateIndex s, ActionIndex a) const {
    const auto [b, e] = row(s, a);
    double r = 0.0;
    for (auto k = b; k < e; ++k) r += prob(k) * reward(k);
    return r;
  }

 private:
  friend ScalarMDP scalarize(const TabularMDP&, const WeightVector&);
  ScalarMDP(std::shared_ptr<const detail::TransitionStructure> s, std::vector<double> rewards,
            std::vector<double> terminal_values)
      : TransitionView(std::move(s)),
        rewards_(std::move(rewards)),
        terminal_values_(std::move(terminal_values)) {}

  std::vector<double> rewards_;
  std::vector<double> terminal_values_;
};

namespace detail {

// Fixed summation order: objectives 0..n-1, then the offset channel.
inline double weighted_sum(std::span<const double> r, std::span<const double> w, double offset) {
  double acc = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) acc += w[i] * r[i];
  return acc + offset;
}

}  // namespace detail

/// R(s,a,s') = sum_i w_i r_i(s,a,s') (+ the weight-independent offset channel).
inline ScalarMDP scalarize(const TabularMDP& mdp, const WeightVector& w) {
  if (w.size() != mdp.n_objectives()) {
    throw InvalidArgument("weight vector has length " + std::to_string(w.size()) + " but the MDP has " +
                          std::to_string(mdp.n_objectives()) + " objectives");
  }
  std::vector<double> rewards(mdp.n_entries());
  for (std::size_t k = 0; k < rewards.size(); ++k) {
    rewards[k] = detail::weighted_sum(mdp.rewards(k), w.values(), mdp.offset(k));
  }
  std::vector<double> terminal(mdp.n_states(), 0.0);
  const auto n = mdp.n_objectives();
  std::vector<double> tr(n);
  for (StateIndex s = 0; s < mdp.n_states(); ++s) {
    if (!mdp.is_terminal(s)) continue;
    for (std::size_t i = 0; i < n; ++i) tr[i] = mdp.terminal_reward(s, i);
    terminal[s] = detail::weighted_sum(tr, w.values(), mdp.terminal_offset(s));
  }
  return ScalarMDP(mdp.structure_, std::move(rewards), std::move(terminal));
}

struct ValueFunction {
  std::vector<double> v;

  double operator()(StateIndex s) const { return v[s]; }
  std::size_t size() const noexcept { return v.size(); }
};

class QFunction {
 public:
  QFunction() = default;
  QFunction(std::size_t n_states, std::size_t n_actions)
      : n_states_(n_states), n_actions_(n_actions), q_(n_states * n_actions, 0.0) {}

  std::size_t n_states() const noexcept { return n_states_; }
  std::size_t n_actions() const noexcept { return n_actions_; }
  double operator()(StateIndex s, ActionIndex a) const { return q_[s * n_actions_ + a]; }
  double& operator()(StateIndex s, ActionIndex a) { return q_[s * n_actions_ + a]; }
  std::span<const double> row(StateIndex s) const { return {q_.data() + s * n_actions_, n_actions_}; }
  std::span<const double> values() const noexcept { return q_; }

 private:
  std::size_t n_states_ = 0;
  std::size_t n_actions_ = 0;
  std::vector<double> q_;
};

struct Policy {
  std::vector<ActionIndex> action;

  ActionIndex operator()(StateIndex s) const { return action[s]; }
  std::size_t size() const noexcept { return action.size(); }
  friend bool operator==(const Policy&, const Policy&) = default;
};

}  // namespace morl

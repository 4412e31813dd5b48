#pragma once

// Backward induction for the stochastic viability value function
//
//   V(T, x) = 1_{A(T)}(x)
//   V(t, x) = max_{u in B(t,x)} sum_i mu_i 1_{A(t)}(x) V(t+1, f(t, x, u, w_i))
//
// plus exact evaluation of a fixed feedback and a brute-force oracle that
// enumerates every Markov feedback.

#include <cstddef>
#include <stdexcept>
#include <span>
#include <utility>
#include <vector>

#include "viab/model.hpp"
#include "viab/policy.hpp"

namespace viab {

class TransitionTable;

/// Controls within this absolute distance of the stage maximum are all argmax.
inline constexpr double kArgmaxTolerance = 1e-12;

struct ValueSlice {
  int t = 0;
  std::vector<double> values;  // indexed by state, sink last

  bool operator==(const ValueSlice&) const = default;
};

class ValueFunction {
 public:
  ValueFunction() = default;
  ValueFunction(int t0, int T, std::vector<ValueSlice> slices)
      : t0_(t0), T_(T), slices_(std::move(slices)) {}

  int t0() const noexcept { return t0_; }
  int T() const noexcept { return T_; }
  const ValueSlice& slice(int t) const { return slices_.at(static_cast<std::size_t>(t - t0_)); }
  double at(int t, StateIndex x) const { return slice(t).values.at(x); }
  const std::vector<ValueSlice>& slices() const noexcept { return slices_; }
  std::size_t total_states() const { return slices_.empty() ? 0 : slices_.front().values.size(); }

  friend bool operator==(const ValueFunction&, const ValueFunction&) = default;

 private:
  int t0_ = 0;
  int T_ = 0;
  std::vector<ValueSlice> slices_;
};

/// Maximizing controls per (t, x), t = t0..T-1. Empty for x outside A(t).
class ArgmaxPolicy {
 public:
  ArgmaxPolicy() = default;
  ArgmaxPolicy(int t0, int T, std::size_t total_states)
      : t0_(t0), T_(T), total_(total_states),
        sets_(static_cast<std::size_t>(T - t0) * total_states) {}

  const std::vector<ControlIndex>& viable(int t, StateIndex x) const { return sets_.at(offset(t, x)); }
  std::vector<ControlIndex>& viable(int t, StateIndex x) { return sets_.at(offset(t, x)); }

  int t0() const noexcept { return t0_; }
  int T() const noexcept { return T_; }
  std::size_t total_states() const noexcept { return total_; }

  friend bool operator==(const ArgmaxPolicy&, const ArgmaxPolicy&) = default;

 private:
  std::size_t offset(int t, StateIndex x) const {
    if (t < t0_ || t >= T_ || x >= total_) throw std::out_of_range("ArgmaxPolicy index");
    return static_cast<std::size_t>(t - t0_) * total_ + x;
  }

  int t0_ = 0;
  int T_ = 0;
  std::size_t total_ = 0;
  std::vector<std::vector<ControlIndex>> sets_;
};

struct Solution {
  ValueFunction value;
  ArgmaxPolicy argmax;
};

ValueSlice terminal_slice(const Model& model);

struct StepResult {
  ValueSlice slice;
  std::vector<std::vector<ControlIndex>> argmax;  // per state
};

StepResult bellman_step(const Model& model, int t, const ValueSlice& next);
StepResult bellman_step(const Model& model, const TransitionTable& transitions, int t,
                        const ValueSlice& next);

/// Full backward induction over t = T-1..t0. Throws ModelError on an invalid model.
Solution solve(const Model& model);

/// Exact success probability of a fixed feedback, from every (t, x).
ValueFunction evaluate_policy(const Model& model, const FeedbackPolicy& policy);

/// Enumeration guard for brute_force_value.
inline constexpr double kBruteForceLimit = 1e6;

/// Max over every Markov feedback of its exact success probability from
/// (t0, x0). Throws ArgumentError when the number of feedbacks exceeds the guard.
double brute_force_value(const Model& model, StateIndex x0);

}  // namespace viab

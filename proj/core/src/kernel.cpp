#include "viab/kernel.hpp"

#include <algorithm>
#include <string>

#include "viab/error.hpp"

namespace viab {

KernelSlice kernel_slice(const ValueFunction& value, int t, double beta) {
  if (!(beta > 0.0 && beta <= 1.0)) {
    throw ArgumentError("beta must lie in (0, 1], got " + std::to_string(beta));
  }
  if (t < value.t0() || t > value.T()) {
    throw ArgumentError("stage " + std::to_string(t) + " outside [" + std::to_string(value.t0()) + ", " +
                        std::to_string(value.T()) + "]");
  }
  KernelSlice out{t, beta, {}};
  const std::vector<double>& v = value.slice(t).values;
  // The last entry is the sink.
  for (StateIndex x = 0; x + 1 < v.size(); ++x) {
    if (v[x] >= beta) out.members.push_back(x);
  }
  return out;
}

bool viable_feedback_check(const Model& model, const FeedbackPolicy& policy, int t0,
                           StateIndex x0, double beta) {
  const ValueFunction pi = evaluate_policy(model, policy);
  if (t0 < pi.t0() || t0 > pi.T()) throw ArgumentError("stage " + std::to_string(t0) + " outside horizon");
  return pi.at(t0, x0) >= beta;
}

FeedbackPolicy select_feedback(const Model& model, const ArgmaxPolicy& argmax, const TieBreak& tie_break) {
  FeedbackPolicy policy(argmax.t0(), argmax.T(), argmax.total_states());
  for (int t = argmax.t0(); t < argmax.T(); ++t) {
    for (StateIndex x = 0; x < argmax.total_states(); ++x) {
      const std::vector<ControlIndex>& set = argmax.viable(t, x);
      ControlIndex pick = 0;
      if (set.empty()) {
        pick = model.admissible(t, x).front();
      } else {
        switch (tie_break.rule) {
          case TieBreak::Rule::Smallest:
            pick = *std::min_element(set.begin(), set.end());
            break;
          case TieBreak::Rule::Largest:
            pick = *std::max_element(set.begin(), set.end());
            break;
          case TieBreak::Rule::Preference: {
            pick = *std::min_element(set.begin(), set.end());
            for (ControlIndex c : tie_break.preference) {
              if (std::find(set.begin(), set.end(), c) != set.end()) {
                pick = c;
                break;
              }
            }
            break;
          }
        }
      }
      policy.set(t, x, pick);
    }
  }
  return policy;
}

}  // namespace viab

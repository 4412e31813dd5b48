#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "viab/dp.hpp"
#include "viab/model.hpp"
#include "viab/policy.hpp"

namespace viab {

/// States whose viability probability at stage t reaches beta.
struct KernelSlice {
  int t = 0;
  double beta = 1.0;
  std::vector<StateIndex> members;  // ascending, never the sink
};

/// {x : V(t, x) >= beta}, compared exactly. beta must lie in (0, 1].
KernelSlice kernel_slice(const ValueFunction& value, int t, double beta);

/// True iff the policy keeps the path from (t0, x0) viable with probability >= beta.
bool viable_feedback_check(const Model& model, const FeedbackPolicy& policy, int t0,
                           StateIndex x0, double beta);

/// How to pick one control out of a multi-element argmax set.
struct TieBreak {
  enum class Rule { Smallest, Largest, Preference };

  Rule rule = Rule::Smallest;
  std::vector<ControlIndex> preference;  // for Rule::Preference, most preferred first

  static TieBreak smallest() { return {}; }
  static TieBreak largest() { return {Rule::Largest, {}}; }
  static TieBreak prefer(std::vector<ControlIndex> order) { return {Rule::Preference, std::move(order)}; }
};

/// One control per (t, x) from the argmax sets. Where a set is empty the
/// first admissible control is used; those states have value 0 anyway.
FeedbackPolicy select_feedback(const Model& model, const ArgmaxPolicy& argmax,
                               const TieBreak& tie_break = {});

}  // namespace viab

#pragma once

// Text formats for solver output. Reals are written with 17 significant
// digits so every double survives a write/read cycle exactly. The sink has
// no coordinates: value files omit it and path files write it as
// state_index -1 with empty coordinates.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "viab/dp.hpp"
#include "viab/kernel.hpp"
#include "viab/mc.hpp"
#include "viab/model.hpp"
#include "viab/policy.hpp"

namespace viab::csv {

std::string format_real(double v);

/// t,state_index,x1..xn,value
void write_values(std::ostream& os, const StateSpace& states, const ValueFunction& value);

struct ValueTable {
  StateSpace states;
  ValueFunction value;
};

/// Inverse of write_values. The sink entry is restored with value 0.
ValueTable read_values(std::istream& is);

/// t,state_index,control_index,u1..up, one row per maximizing control.
void write_argmax(std::ostream& os, const Model& model, const ArgmaxPolicy& argmax);
ArgmaxPolicy read_argmax(std::istream& is, const Model& model);

/// t,state_index,control_index,u1..up, one row per grid state and stage.
void write_policy(std::ostream& os, const Model& model, const FeedbackPolicy& policy);

/// t,beta,state_index,x1..xn
void write_kernel(std::ostream& os, const StateSpace& states, const KernelSlice& kernel);

/// sample,t,state_index,x1..xn,control_index,success
void write_trajectories(std::ostream& os, const Model& model, const std::vector<Trajectory>& paths);

/// Wide table t,sample_0,..., holding the first state coordinate (blank once
/// a path has left the grid). Ready for a line plot.
void write_path_plot(std::ostream& os, const Model& model, const std::vector<Trajectory>& paths);

/// "mean n ci_low ci_high seed"
std::string format_estimate(const ProbabilityEstimate& est);

}  // namespace viab::csv

#pragma once

// Controlled stochastic system over a finite state grid:
//
//   x(t+1) = f(t, x(t), u(t), w(t)),   u(t) in B(t, x(t)),   x(t) in A(t),
//
// with w(t) i.i.d. from a finite law. States are addressed by index; one
// extra absorbing pseudo-state (the sink) closes the dynamics when a
// successor falls outside the grid. The sink is never a member of A(t).

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "viab/expr.hpp"

namespace viab {

using Vec = std::vector<double>;
using StateIndex = std::size_t;
using ControlIndex = std::size_t;

struct TimeGrid {
  int t0 = 0;
  int T = 1;

  int horizon() const noexcept { return T - t0; }
  bool contains(int t) const noexcept { return t >= t0 && t <= T; }
  std::size_t stage_count() const noexcept { return static_cast<std::size_t>(T - t0 + 1); }
};

class StateSpace {
 public:
  StateSpace() = default;
  explicit StateSpace(std::vector<Vec> points);

  const std::vector<Vec>& points() const noexcept { return points_; }
  const Vec& point(StateIndex x) const { return points_.at(x); }
  std::size_t dim() const noexcept { return dim_; }

  /// Number of grid points, excluding the sink.
  std::size_t size() const noexcept { return points_.size(); }
  /// Grid points plus the sink.
  std::size_t total() const noexcept { return points_.size() + 1; }
  StateIndex sink() const noexcept { return points_.size(); }
  bool is_sink(StateIndex x) const noexcept { return x == points_.size(); }

  /// Minimal positive gap between distinct coordinates, per axis (0 when the
  /// axis is degenerate).
  const Vec& spacing() const noexcept { return spacing_; }

  /// Exact lookup of a grid point by coordinates; sink() when absent.
  StateIndex find(std::span<const double> coords) const;

 private:
  std::vector<Vec> points_;
  std::size_t dim_ = 0;
  Vec spacing_;
  std::map<Vec, StateIndex> index_;  // first occurrence of each point
};

/// Nearest grid point, accepted when it lies within half the axis spacing on
/// every axis; otherwise the sink. Ties go to the smallest index.
StateIndex project_to_grid(const StateSpace& states, std::span<const double> point);

/// Admissible control sets B(t, x). Controls live in one catalogue and are
/// referred to by catalogue index.
class ControlMap {
 public:
  enum class Mode { Shared, PerState, PerStage };

  ControlMap() = default;
  static ControlMap shared(std::vector<Vec> values);
  static ControlMap per_state(std::vector<Vec> values,
                              std::vector<std::vector<ControlIndex>> lists);
  static ControlMap per_stage(std::vector<Vec> values,
                              std::vector<std::vector<std::vector<ControlIndex>>> lists);

  Mode mode() const noexcept { return mode_; }
  const std::vector<Vec>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::size_t dim() const noexcept { return values_.empty() ? 0 : values_.front().size(); }

  /// Admissible controls at stage offset `stage` (t - t0) for a grid state.
  std::span<const ControlIndex> admissible(std::size_t stage, StateIndex x) const;

  const std::vector<std::vector<ControlIndex>>& state_lists() const noexcept { return state_lists_; }
  const std::vector<std::vector<std::vector<ControlIndex>>>& stage_lists() const noexcept {
    return stage_lists_;
  }

 private:
  Mode mode_ = Mode::Shared;
  std::vector<Vec> values_;
  std::vector<ControlIndex> all_;
  std::vector<std::vector<ControlIndex>> state_lists_;
  std::vector<std::vector<std::vector<ControlIndex>>> stage_lists_;
};

/// Stationary finite disturbance law; the same marginal at every stage.
struct DisturbanceLaw {
  std::vector<Vec> support;
  std::vector<double> probs;

  std::size_t size() const noexcept { return support.size(); }
  std::size_t dim() const noexcept { return support.empty() ? 0 : support.front().size(); }
};

/// Explicit successor table. Entries are grid indices, or -1 for the sink.
/// Shape [stages][states][controls][disturbances]; stages is 1 when stationary.
struct TableDynamics {
  std::size_t stages = 1;
  std::size_t states = 0;
  std::size_t controls = 0;
  std::size_t disturbances = 0;
  std::vector<std::int64_t> next;

  std::int64_t at(std::size_t stage, StateIndex x, ControlIndex c, std::size_t w) const {
    const std::size_t s = stages == 1 ? 0 : stage;
    return next[((s * states + x) * controls + c) * disturbances + w];
  }
};

/// One expression per state coordinate, evaluated then projected to the grid.
struct ExprDynamics {
  std::vector<std::string> sources;
  std::vector<expr::Ast> coords;

  static ExprDynamics compile(std::vector<std::string> sources, expr::Dims dims);
  bool depends_on_time() const;
};

using Dynamics = std::variant<TableDynamics, ExprDynamics>;

struct IndexSet {
  std::vector<StateIndex> members;  // sorted, unique
};

struct Box {
  Vec lower;
  Vec upper;
};

using StageConstraint = std::variant<IndexSet, Box>;

/// A(t) for t = t0..T; the last entry is the target set.
struct ConstraintSets {
  std::vector<StageConstraint> stages;
};

struct Model {
  TimeGrid time;
  StateSpace states;
  ControlMap controls;
  DisturbanceLaw noise;
  Dynamics dynamics;
  ConstraintSets constraints;

  /// Membership x in A(t). The sink is never a member.
  bool member(int t, StateIndex x) const;

  /// B(t, x); a singleton dummy control for the sink.
  std::span<const ControlIndex> admissible(int t, StateIndex x) const;

  /// f(t, x, u, w) by catalogue indices. Sink maps to sink.
  StateIndex successor(int t, StateIndex x, ControlIndex c, std::size_t w) const;

  expr::Dims dims() const noexcept { return {states.dim(), controls.dim(), noise.dim()}; }
};

/// Every invariant violation found; empty iff the model is usable.
std::vector<std::string> validate(const Model& model);

/// Throws ModelError listing all violations.
void require_valid(const Model& model);

/// x(t+1) = x + u + w on {-1, 0, 1}, u in {-1, 1}, w in {-1, 0, 1} with
/// probabilities (p, 1-2p, p), and A(t) = {-1, 0, 1} at every stage.
Model make_paper_example(double p, int t0, int T);

}  // namespace viab

#include "viab/transitions.hpp"

#include <variant>

namespace viab {

TransitionTable::TransitionTable(const Model& model)
    : t0_(model.time.t0),
      states_(model.states.size()),
      controls_(model.controls.size()),
      disturbances_(model.noise.size()),
      sink_(model.states.sink()) {
  if (const auto* table = std::get_if<TableDynamics>(&model.dynamics)) {
    stationary_ = table->stages == 1 && model.controls.mode() != ControlMap::Mode::PerStage;
  } else {
    stationary_ = !std::get<ExprDynamics>(model.dynamics).depends_on_time() &&
                  model.controls.mode() != ControlMap::Mode::PerStage;
  }
  const std::size_t stages = stationary_ ? 1 : static_cast<std::size_t>(model.time.horizon());
  next_.assign(stages * states_ * controls_ * disturbances_, sink_);
  for (std::size_t s = 0; s < stages; ++s) {
    const int t = t0_ + static_cast<int>(s);
    for (StateIndex x = 0; x < states_; ++x) {
      for (ControlIndex c : model.admissible(t, x)) {
        for (std::size_t w = 0; w < disturbances_; ++w) {
          next_[((s * states_ + x) * controls_ + c) * disturbances_ + w] = model.successor(t, x, c, w);
        }
      }
    }
  }
}

}  // namespace viab

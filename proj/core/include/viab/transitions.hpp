#pragma once

#include <cstddef>
#include <vector>

#include "viab/model.hpp"

namespace viab {

/// Dense successor cache for a validated model, indexed by
/// (stage offset, state, catalogue control, disturbance). Built once per
/// solve or simulation batch so expression dynamics are evaluated at most
/// once per admissible combination. Entries for inadmissible controls are
/// the sink.
class TransitionTable {
 public:
  explicit TransitionTable(const Model& model);

  StateIndex next(int t, StateIndex x, ControlIndex c, std::size_t w) const {
    if (x == sink_) return sink_;
    const std::size_t s = stationary_ ? 0 : static_cast<std::size_t>(t - t0_);
    return next_[((s * states_ + x) * controls_ + c) * disturbances_ + w];
  }

  bool stationary() const noexcept { return stationary_; }

 private:
  int t0_ = 0;
  bool stationary_ = true;
  std::size_t states_ = 0;
  std::size_t controls_ = 0;
  std::size_t disturbances_ = 0;
  StateIndex sink_ = 0;
  std::vector<StateIndex> next_;
};

}  // namespace viab

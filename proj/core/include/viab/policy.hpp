#pragma once

#include <cstddef>
#include <vector>

#include "viab/model.hpp"

namespace viab {

/// Markov feedback u(t, x) for t = t0..T-1, stored as catalogue indices.
/// Rows cover every state including the sink (whose entry is a dummy).
class FeedbackPolicy {
 public:
  FeedbackPolicy() = default;
  FeedbackPolicy(int t0, int T, std::size_t total_states, ControlIndex fill = 0)
      : t0_(t0), T_(T), total_(total_states),
        choice_(static_cast<std::size_t>(T - t0) * total_states, fill) {}

  ControlIndex choose(int t, StateIndex x) const { return choice_.at(offset(t, x)); }
  void set(int t, StateIndex x, ControlIndex c) { choice_.at(offset(t, x)) = c; }

  int t0() const noexcept { return t0_; }
  int T() const noexcept { return T_; }
  std::size_t total_states() const noexcept { return total_; }

  friend bool operator==(const FeedbackPolicy&, const FeedbackPolicy&) = default;

 private:
  std::size_t offset(int t, StateIndex x) const {
    return static_cast<std::size_t>(t - t0_) * total_ + x;
  }

  int t0_ = 0;
  int T_ = 0;
  std::size_t total_ = 0;
  std::vector<ControlIndex> choice_;
};

}  // namespace viab

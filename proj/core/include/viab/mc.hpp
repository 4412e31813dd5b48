#pragma once

// Closed-loop Monte Carlo: scenarios, trajectories, and success-probability
// estimates. All randomness comes from a counter-based generator keyed by
// seed, so every result is a pure function of its seeds.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "viab/model.hpp"
#include "viab/policy.hpp"

namespace viab {

class TransitionTable;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stateless generator: draw k under a key is mix(key, k).
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t seed) noexcept : key_(mix64(seed)) {}

  constexpr std::uint64_t bits(std::uint64_t counter) const noexcept {
    return mix64(key_ ^ mix64(counter + 0x632be59bd9b4e019ULL));
  }
  /// Uniform on [0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t counter) const noexcept {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
};

/// Seed of Monte Carlo sample `index` under `base_seed`.
constexpr std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index) noexcept {
  return CounterRng(base_seed).bits(index);
}

/// Disturbance indices for t = t0..T-1. The terminal draw never enters the
/// dynamics or the criterion and is not stored.
struct Scenario {
  std::vector<std::size_t> draws;
  friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct Trajectory {
  std::vector<StateIndex> states;      // x(t0..T)
  std::vector<ControlIndex> controls;  // u(t0..T-1)
  Scenario scenario;
  bool success = false;
  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct ProbabilityEstimate {
  double mean = 0.0;
  std::size_t n = 0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t seed = 0;
};

struct Interval {
  double low = 0.0;
  double high = 1.0;
};

inline constexpr double kZ95 = 1.959963984540054;
inline constexpr double kZ99 = 2.5758293035489004;

/// Wilson score interval for `successes` out of `n` at normal quantile z.
Interval wilson_interval(std::size_t successes, std::size_t n, double z = kZ95);

/// Inverse-CDF draw of one disturbance index from a uniform in [0, 1).
std::size_t draw_disturbance(const DisturbanceLaw& noise, double uniform);

Scenario sample_scenario(const DisturbanceLaw& noise, std::size_t horizon, std::uint64_t seed);

Trajectory simulate(const Model& model, const FeedbackPolicy& policy, StateIndex x0, std::uint64_t seed);
Trajectory simulate(const Model& model, const TransitionTable& transitions, const FeedbackPolicy& policy,
                    StateIndex x0, std::uint64_t seed);

/// Success fraction over n trajectories; sample i uses derive_seed(base_seed, i).
/// `threads` = 0 picks the hardware concurrency; the result does not depend on it.
ProbabilityEstimate estimate_probability(const Model& model, const FeedbackPolicy& policy, StateIndex x0,
                                         std::size_t n, std::uint64_t base_seed, unsigned threads = 0);

/// Product of A(t) indicators along a stored path, recomputed from scratch.
bool viability_criterion(const Model& model, const std::vector<StateIndex>& states);

}  // namespace viab

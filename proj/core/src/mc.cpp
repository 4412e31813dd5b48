#include "viab/mc.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "viab/error.hpp"
#include "viab/transitions.hpp"

namespace viab {

Interval wilson_interval(std::size_t successes, std::size_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double phat = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (phat + z2 / (2.0 * nn)) / denom;
  const double half = z / denom * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn));
  Interval ci{std::max(0.0, center - half), std::min(1.0, center + half)};
  ci.low = std::min(ci.low, phat);
  ci.high = std::max(ci.high, phat);
  return ci;
}

std::size_t draw_disturbance(const DisturbanceLaw& noise, double uniform) {
  double cdf = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < noise.probs.size(); ++i) {
    if (noise.probs[i] <= 0.0) continue;
    last_positive = i;
    cdf += noise.probs[i];
    if (uniform < cdf) return i;
  }
  // Rounding left the cumulative sum just below 1.
  return last_positive;
}

Scenario sample_scenario(const DisturbanceLaw& noise, std::size_t horizon, std::uint64_t seed) {
  const CounterRng rng(seed);
  Scenario s;
  s.draws.resize(horizon);
  for (std::size_t k = 0; k < horizon; ++k) s.draws[k] = draw_disturbance(noise, rng.uniform(k));
  return s;
}

namespace {

void check_start(const Model& model, StateIndex x0) {
  if (x0 >= model.states.size()) {
    throw ArgumentError("initial state must be a grid state (index < " + std::to_string(model.states.size()) +
                        "), got " + std::to_string(x0));
  }
}

void check_shape(const Model& model, const FeedbackPolicy& policy) {
  if (policy.t0() != model.time.t0 || policy.T() != model.time.T ||
      policy.total_states() != model.states.total()) {
    throw ArgumentError("feedback policy does not match the model's horizon or state space");
  }
}

// Workers must not throw, so the whole policy is checked up front.
void check_admissible(const Model& model, const FeedbackPolicy& policy) {
  for (int t = model.time.t0; t < model.time.T; ++t) {
    for (StateIndex x = 0; x < model.states.size(); ++x) {
      const auto allowed = model.admissible(t, x);
      if (std::find(allowed.begin(), allowed.end(), policy.choose(t, x)) == allowed.end()) {
        throw ArgumentError("inadmissible control " + std::to_string(policy.choose(t, x)) +
                            " at t=" + std::to_string(t) + ", state " + std::to_string(x));
      }
    }
  }
}

}  // namespace

Trajectory simulate(const Model& model, const TransitionTable& transitions, const FeedbackPolicy& policy,
                    StateIndex x0, std::uint64_t seed) {
  check_start(model, x0);
  check_shape(model, policy);
  const std::size_t horizon = static_cast<std::size_t>(model.time.horizon());
  Trajectory traj;
  traj.scenario = sample_scenario(model.noise, horizon, seed);
  traj.states.reserve(horizon + 1);
  traj.controls.reserve(horizon);
  traj.states.push_back(x0);
  bool ok = model.member(model.time.t0, x0);
  StateIndex x = x0;
  for (std::size_t k = 0; k < horizon; ++k) {
    const int t = model.time.t0 + static_cast<int>(k);
    const ControlIndex c = policy.choose(t, x);
    if (!model.states.is_sink(x)) {
      const auto allowed = model.admissible(t, x);
      if (std::find(allowed.begin(), allowed.end(), c) == allowed.end()) {
        throw ArgumentError("inadmissible control " + std::to_string(c) + " at t=" + std::to_string(t) +
                            ", state " + std::to_string(x));
      }
    }
    x = transitions.next(t, x, c, traj.scenario.draws[k]);
    traj.controls.push_back(c);
    traj.states.push_back(x);
    ok = ok && model.member(t + 1, x);
  }
  traj.success = ok;
  return traj;
}

Trajectory simulate(const Model& model, const FeedbackPolicy& policy, StateIndex x0, std::uint64_t seed) {
  require_valid(model);
  const TransitionTable transitions(model);
  return simulate(model, transitions, policy, x0, seed);
}

ProbabilityEstimate estimate_probability(const Model& model, const FeedbackPolicy& policy, StateIndex x0,
                                         std::size_t n, std::uint64_t base_seed, unsigned threads) {
  if (n == 0) throw ArgumentError("estimate_probability: n must be >= 1");
  require_valid(model);
  check_start(model, x0);
  check_shape(model, policy);
  check_admissible(model, policy);
  const TransitionTable transitions(model);

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, (n + 1023) / 1024));
  threads = std::max(1u, threads);

  std::vector<std::size_t> counts(threads, 0);
  auto work = [&](unsigned worker) {
    const std::size_t begin = n * worker / threads;
    const std::size_t end = n * (worker + 1) / threads;
    std::size_t local = 0;
    for (std::size_t i = begin; i < end; ++i) {
      if (simulate(model, transitions, policy, x0, derive_seed(base_seed, i)).success) ++local;
    }
    counts[worker] = local;
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (std::thread& th : pool) th.join();
  }
  std::size_t successes = 0;
  for (std::size_t c : counts) successes += c;

  const Interval ci = wilson_interval(successes, n);
  return {static_cast<double>(successes) / static_cast<double>(n), n, ci.low, ci.high, base_seed};
}

bool viability_criterion(const Model& model, const std::vector<StateIndex>& states) {
  bool all = true;
  for (std::size_t k = 0; k < states.size(); ++k) {
    all = all && model.member(model.time.t0 + static_cast<int>(k), states[k]);
  }
  return all;
}

}  // namespace viab

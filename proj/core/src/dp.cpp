#include "viab/dp.hpp"

#include <algorithm>
#include <string>

#include "viab/error.hpp"
#include "viab/transitions.hpp"

namespace viab {
namespace {

template <typename Next>
StepResult step(const Model& model, int t, const ValueSlice& next, const Next& successor) {
  if (t < model.time.t0 || t >= model.time.T) {
    throw ArgumentError("bellman_step: stage " + std::to_string(t) + " outside [" +
                        std::to_string(model.time.t0) + ", " + std::to_string(model.time.T - 1) + "]");
  }
  if (next.t != t + 1) {
    throw ArgumentError("bellman_step: next slice is for stage " + std::to_string(next.t) +
                        ", expected " + std::to_string(t + 1));
  }
  const std::size_t total = model.states.total();
  if (next.values.size() != total) throw ArgumentError("bellman_step: next slice has wrong size");

  const std::vector<double>& probs = model.noise.probs;
  StepResult out;
  out.slice.t = t;
  out.slice.values.assign(total, 0.0);
  out.argmax.resize(total);

  std::vector<double> q;
  for (StateIndex x = 0; x < model.states.size(); ++x) {
    if (!model.member(t, x)) continue;
    const auto controls = model.admissible(t, x);
    q.assign(controls.size(), 0.0);
    double best = 0.0;
    for (std::size_t k = 0; k < controls.size(); ++k) {
      double acc = 0.0;
      for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i] * next.values[successor(x, controls[k], i)];
      }
      q[k] = acc;
      best = k == 0 ? acc : std::max(best, acc);
    }
    out.slice.values[x] = best;
    for (std::size_t k = 0; k < controls.size(); ++k) {
      if (best - q[k] <= kArgmaxTolerance) out.argmax[x].push_back(controls[k]);
    }
    std::sort(out.argmax[x].begin(), out.argmax[x].end());
  }
  return out;
}

}  // namespace

ValueSlice terminal_slice(const Model& model) {
  ValueSlice slice;
  slice.t = model.time.T;
  slice.values.assign(model.states.total(), 0.0);
  for (StateIndex x = 0; x < model.states.size(); ++x) {
    if (model.member(model.time.T, x)) slice.values[x] = 1.0;
  }
  return slice;
}

StepResult bellman_step(const Model& model, int t, const ValueSlice& next) {
  return step(model, t, next, [&](StateIndex x, ControlIndex c, std::size_t w) {
    return model.successor(t, x, c, w);
  });
}

StepResult bellman_step(const Model& model, const TransitionTable& transitions, int t,
                        const ValueSlice& next) {
  return step(model, t, next, [&](StateIndex x, ControlIndex c, std::size_t w) {
    return transitions.next(t, x, c, w);
  });
}

Solution solve(const Model& model) {
  require_valid(model);
  const TransitionTable transitions(model);
  const std::size_t stages = model.time.stage_count();

  std::vector<ValueSlice> slices(stages);
  ArgmaxPolicy argmax(model.time.t0, model.time.T, model.states.total());
  slices.back() = terminal_slice(model);
  for (int t = model.time.T - 1; t >= model.time.t0; --t) {
    const std::size_t s = static_cast<std::size_t>(t - model.time.t0);
    StepResult r = bellman_step(model, transitions, t, slices[s + 1]);
    slices[s] = std::move(r.slice);
    for (StateIndex x = 0; x < model.states.total(); ++x) argmax.viable(t, x) = std::move(r.argmax[x]);
  }
  return {ValueFunction(model.time.t0, model.time.T, std::move(slices)), std::move(argmax)};
}

namespace {

void check_policy(const Model& model, const FeedbackPolicy& policy) {
  if (policy.t0() != model.time.t0 || policy.T() != model.time.T ||
      policy.total_states() != model.states.total()) {
    throw ArgumentError("feedback policy does not match the model's horizon or state space");
  }
  for (int t = model.time.t0; t < model.time.T; ++t) {
    for (StateIndex x = 0; x < model.states.size(); ++x) {
      const ControlIndex c = policy.choose(t, x);
      const auto allowed = model.admissible(t, x);
      if (std::find(allowed.begin(), allowed.end(), c) == allowed.end()) {
        throw ArgumentError("inadmissible control " + std::to_string(c) + " at t=" + std::to_string(t) +
                            ", state " + std::to_string(x));
      }
    }
  }
}

}  // namespace

ValueFunction evaluate_policy(const Model& model, const FeedbackPolicy& policy) {
  require_valid(model);
  check_policy(model, policy);
  const TransitionTable transitions(model);
  const std::vector<double>& probs = model.noise.probs;

  std::vector<ValueSlice> slices(model.time.stage_count());
  slices.back() = terminal_slice(model);
  for (int t = model.time.T - 1; t >= model.time.t0; --t) {
    const std::size_t s = static_cast<std::size_t>(t - model.time.t0);
    const ValueSlice& next = slices[s + 1];
    ValueSlice& cur = slices[s];
    cur.t = t;
    cur.values.assign(model.states.total(), 0.0);
    for (StateIndex x = 0; x < model.states.size(); ++x) {
      if (!model.member(t, x)) continue;
      const ControlIndex c = policy.choose(t, x);
      double acc = 0.0;
      for (std::size_t i = 0; i < probs.size(); ++i) acc += probs[i] * next.values[transitions.next(t, x, c, i)];
      cur.values[x] = acc;
    }
  }
  return ValueFunction(model.time.t0, model.time.T, std::move(slices));
}

double brute_force_value(const Model& model, StateIndex x0) {
  require_valid(model);
  const std::size_t nx = model.states.size();
  if (x0 > nx) throw ArgumentError("brute_force_value: state index out of range");
  const int t0 = model.time.t0;
  const int T = model.time.T;

  // One digit per (t, grid state); digit k ranges over B(t, x).
  std::vector<std::span<const ControlIndex>> radix;
  double count = 1.0;
  for (int t = t0; t < T; ++t) {
    for (StateIndex x = 0; x < nx; ++x) {
      radix.push_back(model.admissible(t, x));
      count *= static_cast<double>(radix.back().size());
    }
  }
  if (count > kBruteForceLimit) {
    throw ArgumentError("brute_force_value: " + std::to_string(count) +
                        " feedbacks exceed the enumeration guard of 1e6");
  }
  if (model.states.is_sink(x0)) return 0.0;

  const std::vector<double>& probs = model.noise.probs;
  std::vector<std::size_t> digits(radix.size(), 0);
  std::vector<double> next(nx + 1), cur(nx + 1);
  double best = 0.0;
  for (;;) {
    for (StateIndex x = 0; x <= nx; ++x) next[x] = model.member(T, x) ? 1.0 : 0.0;
    for (int t = T - 1; t >= t0; --t) {
      std::fill(cur.begin(), cur.end(), 0.0);
      for (StateIndex x = 0; x < nx; ++x) {
        if (!model.member(t, x)) continue;
        const std::size_t d = static_cast<std::size_t>(t - t0) * nx + x;
        const ControlIndex c = radix[d][digits[d]];
        double acc = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) acc += probs[i] * next[model.successor(t, x, c, i)];
        cur[x] = acc;
      }
      std::swap(cur, next);
    }
    best = std::max(best, next[x0]);

    std::size_t k = 0;
    while (k < digits.size() && ++digits[k] == radix[k].size()) digits[k++] = 0;
    if (k == digits.size()) break;
  }
  return best;
}

}  // namespace viab

#include <gtest/gtest.h>

#include <limits>
#include <random>

#include "support/classical_kernel.hpp"
#include "support/random_models.hpp"
#include "viab/error.hpp"
#include "viab/kernel.hpp"
#include "viab/oracle_example.hpp"

namespace viab {
namespace {

using Members = std::vector<StateIndex>;

TEST(KernelSlice, ThreeStateExampleLastStage) {
  const Model m = make_paper_example(0.01, 0, 40);
  const Solution sol = solve(m);
  EXPECT_EQ(kernel_slice(sol.value, 39, 0.99).members, (Members{0, 1, 2}));
  EXPECT_EQ(kernel_slice(sol.value, 39, 0.995).members, (Members{0, 2}));
  EXPECT_EQ(kernel_slice(sol.value, 40, 1.0).members, (Members{0, 1, 2}));
}

TEST(KernelSlice, SmallestBetaGivesPositiveSupport) {
  std::mt19937_64 rng(8);
  const double tiny = std::numeric_limits<double>::denorm_min();
  for (int i = 0; i < 20; ++i) {
    const Model m = testing::random_model(rng);
    const Solution sol = solve(m);
    for (int t = m.time.t0; t <= m.time.T; ++t) {
      Members positive;
      for (StateIndex x = 0; x < m.states.size(); ++x) {
        if (sol.value.at(t, x) > 0.0) positive.push_back(x);
      }
      EXPECT_EQ(kernel_slice(sol.value, t, tiny).members, positive);
    }
  }
}

TEST(KernelSlice, RejectsBadArguments) {
  const Solution sol = solve(make_paper_example(0.01, 0, 4));
  EXPECT_THROW(kernel_slice(sol.value, 2, 0.0), ArgumentError);
  EXPECT_THROW(kernel_slice(sol.value, 2, 1.5), ArgumentError);
  EXPECT_THROW(kernel_slice(sol.value, 5, 0.5), ArgumentError);
  EXPECT_THROW(kernel_slice(sol.value, -1, 0.5), ArgumentError);
}

TEST(KernelSlice, NestedInBeta) {
  std::mt19937_64 rng(12);
  const double betas[] = {0.05, 0.2, 0.4, 0.5, 0.7, 0.9, 0.99, 1.0};
  for (int i = 0; i < 30; ++i) {
    const Model m = testing::random_model(rng);
    const Solution sol = solve(m);
    for (int t = m.time.t0; t <= m.time.T; ++t) {
      for (std::size_t k = 1; k < std::size(betas); ++k) {
        const Members lo = kernel_slice(sol.value, t, betas[k - 1]).members;
        const Members hi = kernel_slice(sol.value, t, betas[k]).members;
        EXPECT_TRUE(std::includes(lo.begin(), lo.end(), hi.begin(), hi.end()));
      }
    }
  }
}

TEST(SelectFeedback, ThreeStateExampleTable) {
  const Model m = make_paper_example(0.01, 0, 40);
  const Solution sol = solve(m);
  const FeedbackPolicy pol = select_feedback(m, sol.argmax);
  for (int t = 0; t < 40; ++t) {
    EXPECT_EQ(m.controls.values()[pol.choose(t, 0)][0], 1.0);
    EXPECT_EQ(m.controls.values()[pol.choose(t, 1)][0], -1.0);
    EXPECT_EQ(m.controls.values()[pol.choose(t, 2)][0], -1.0);
  }
  const FeedbackPolicy largest = select_feedback(m, sol.argmax, TieBreak::largest());
  const FeedbackPolicy preferred = select_feedback(m, sol.argmax, TieBreak::prefer({1}));
  for (int t = 0; t < 40; ++t) {
    EXPECT_EQ(largest.choose(t, 1), 1u);
    EXPECT_EQ(preferred.choose(t, 1), 1u);
    EXPECT_EQ(preferred.choose(t, 2), 0u);
  }
}

TEST(SelectFeedback, HopelessStatesUseFirstAdmissible) {
  Model m = make_paper_example(0.01, 0, 2);
  m.controls = ControlMap::per_state({{-1.0}, {1.0}}, {{0, 1}, {1}, {0, 1}});
  m.constraints.stages[0] = IndexSet{{0, 2}};
  const Solution sol = solve(m);
  ASSERT_TRUE(sol.argmax.viable(0, 1).empty());
  EXPECT_EQ(select_feedback(m, sol.argmax).choose(0, 1), 1u);
}

TEST(SelectFeedback, UniqueMaximizersIgnoreTieBreak) {
  std::mt19937_64 rng(99);
  testing::RandomModelOptions opt;
  opt.deterministic = true;
  int checked = 0;
  for (int i = 0; i < 100 && checked < 10; ++i) {
    const Model m = testing::random_model(rng, opt);
    const Solution sol = solve(m);
    bool unique = true;
    for (int t = m.time.t0; t < m.time.T; ++t)
      for (StateIndex x = 0; x < m.states.total(); ++x) unique = unique && sol.argmax.viable(t, x).size() <= 1;
    if (!unique) continue;
    ++checked;
    EXPECT_EQ(select_feedback(m, sol.argmax, TieBreak::smallest()),
              select_feedback(m, sol.argmax, TieBreak::largest()));
  }
  EXPECT_GT(checked, 0);
}

TEST(ViableFeedbackCheck, Examples) {
  const double p = 0.01;
  const Model m = make_paper_example(p, 0, 40);
  const Solution sol = solve(m);
  const FeedbackPolicy star = select_feedback(m, sol.argmax);
  for (StateIndex x = 0; x < 3; ++x) {
    EXPECT_TRUE(viable_feedback_check(m, star, 0, x, sol.value.at(0, x)));
    EXPECT_FALSE(viable_feedback_check(m, star, 0, x, std::nextafter(sol.value.at(0, x), 2.0)));
  }
  const FeedbackPolicy up(0, 40, m.states.total(), 1);
  EXPECT_FALSE(viable_feedback_check(m, up, 39, 2, 0.5));
  EXPECT_TRUE(viable_feedback_check(m, up, 39, 2, p));
}

TEST(KernelProperty, MembershipIffArgmaxSelectionIsViable) {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 30; ++i) {
    const Model m = testing::random_model(rng);
    const Solution sol = solve(m);
    const FeedbackPolicy star = select_feedback(m, sol.argmax);
    for (double beta : {0.1, 0.5, 0.9, 1.0}) {
      const Members k = kernel_slice(sol.value, m.time.t0, beta).members;
      for (StateIndex x = 0; x < m.states.size(); ++x) {
        const bool in = std::binary_search(k.begin(), k.end(), x);
        EXPECT_EQ(in, viable_feedback_check(m, star, m.time.t0, x, beta)) << "model " << i << " beta " << beta;
      }
    }
  }
}

TEST(KernelProperty, DeterministicReductionMatchesClassicalKernel) {
  std::mt19937_64 rng(77);
  testing::RandomModelOptions opt;
  opt.deterministic = true;
  opt.max_states = 6;
  opt.max_horizon = 5;
  for (int i = 0; i < 20; ++i) {
    const Model m = testing::random_model(rng, opt);
    const Solution sol = solve(m);
    for (int t = m.time.t0; t <= m.time.T; ++t) {
      EXPECT_EQ(kernel_slice(sol.value, t, 1.0).members, testing::classical_kernel(m, t));
    }
  }
}

TEST(KernelProperty, ThreeStateExampleTrichotomyFromDynamicsMatrix) {
  const double betas[] = {0.1, 0.3, 0.5, 0.67, 0.9, 0.99, 0.995, 1.0};
  for (double p : {0.01, 0.1, 0.3}) {
    const Solution sol = solve(make_paper_example(p, 0, 40));
    for (int t = 0; t <= 40; ++t) {
      for (double beta : betas) {
        const Members k = kernel_slice(sol.value, t, beta).members;
        const oracle::KernelShape shape = oracle::dynamics_kernel_closed_form(p, 40, t, beta);
        switch (shape) {
          case oracle::KernelShape::Full: EXPECT_EQ(k, (Members{0, 1, 2})); break;
          case oracle::KernelShape::BoundaryPair: EXPECT_EQ(k, (Members{0, 2})); break;
          case oracle::KernelShape::Empty: EXPECT_TRUE(k.empty()); break;
        }
      }
    }
  }
}

}  // namespace
}  // namespace viab

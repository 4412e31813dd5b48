#include <gtest/gtest.h>

#include <random>

#include "support/random_models.hpp"
#include "viab/error.hpp"
#include "viab/model.hpp"
#include "viab/model_io.hpp"
#include "viab/transitions.hpp"

namespace viab {
namespace {

bool mentions(const std::vector<std::string>& problems, const std::string& needle) {
  for (const auto& p : problems) {
    if (p.find(needle) != std::string::npos) return true;
  }
  return false;
}

TEST(ProjectToGrid, Examples) {
  const StateSpace grid({{-1.0}, {0.0}, {1.0}});
  const std::vector<double> zero{0.0}, two{2.0}, half{0.5};
  EXPECT_EQ(project_to_grid(grid, zero), 1u);
  EXPECT_EQ(project_to_grid(grid, two), grid.sink());
  EXPECT_EQ(project_to_grid(grid, half), 1u);
  const std::vector<double> bad{0.0, 0.0};
  EXPECT_THROW(project_to_grid(grid, bad), ArgumentError);
}

// Every midpoint between neighbouring grid points is equidistant from both;
// the rule picks the smaller index. Checked exhaustively on shuffled grids.
TEST(ProjectToGrid, MidpointTieBreakIsSmallestIndex) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec> pts;
    for (int i = -4; i <= 4; ++i) pts.push_back({0.5 * i});
    std::shuffle(pts.begin(), pts.end(), rng);
    const StateSpace grid(pts);
    for (StateIndex a = 0; a < grid.size(); ++a) {
      for (StateIndex b = 0; b < grid.size(); ++b) {
        if (std::fabs(grid.point(a)[0] - grid.point(b)[0]) != 0.5) continue;
        const std::vector<double> mid{0.5 * (grid.point(a)[0] + grid.point(b)[0])};
        EXPECT_EQ(project_to_grid(grid, mid), std::min(a, b));
      }
    }
  }
}

TEST(ProjectToGrid, TwoDimensionalCells) {
  std::vector<Vec> pts;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) pts.push_back({double(i), 10.0 * j});
  const StateSpace grid(pts);
  const std::vector<double> inside{1.2, 14.0}, outside_y{1.0, 16.0}, far{5.0, 0.0};
  EXPECT_EQ(project_to_grid(grid, inside), grid.find(std::vector<double>{1.0, 10.0}));
  EXPECT_EQ(project_to_grid(grid, outside_y), grid.sink());
  EXPECT_EQ(project_to_grid(grid, far), grid.sink());
}

TEST(ThreeStateExample, Shape) {
  const Model m = make_paper_example(0.01, 0, 40);
  EXPECT_EQ(m.states.total(), 4u);
  EXPECT_EQ(m.controls.size(), 2u);
  EXPECT_EQ(m.noise.size(), 3u);
  EXPECT_TRUE(validate(m).empty());

  const Model q = make_paper_example(0.25, 0, 5);
  EXPECT_EQ(q.noise.probs, (std::vector<double>{0.25, 0.5, 0.25}));

  // f(t, 1, +1, +1) = 3 leaves the grid.
  EXPECT_EQ(m.successor(0, 2, 1, 2), m.states.sink());
  EXPECT_EQ(m.successor(0, 0, 1, 1), 1u);
  EXPECT_EQ(m.successor(0, m.states.sink(), 0, 0), m.states.sink());
}

TEST(ThreeStateExample, RejectsBadParameters) {
  EXPECT_THROW(make_paper_example(0.0, 0, 4), ArgumentError);
  EXPECT_THROW(make_paper_example(0.5, 0, 4), ArgumentError);
  EXPECT_THROW(make_paper_example(0.6, 0, 4), ArgumentError);
  EXPECT_THROW(make_paper_example(0.1, 4, 4), ArgumentError);
}

TEST(ThreeStateExample, ValidForSeveralP) {
  for (double p : {0.01, 0.1, 0.3}) EXPECT_TRUE(validate(make_paper_example(p, 0, 40)).empty()) << p;
}

TEST(Validate, ProbabilitiesMustSumToOne) {
  Model m = make_paper_example(0.01, 0, 3);
  m.noise.probs = {0.01, 0.97, 0.01};
  const auto problems = validate(m);
  ASSERT_EQ(problems.size(), 1u);
  EXPECT_NE(problems[0].find("DisturbanceLaw"), std::string::npos);
  EXPECT_NE(problems[0].find("normalization"), std::string::npos);
}

TEST(Validate, EmptyControlList) {
  Model m = make_paper_example(0.01, 0, 3);
  m.controls = ControlMap::per_state({{-1.0}, {1.0}}, {{0, 1}, {}, {1}});
  const auto problems = validate(m);
  ASSERT_EQ(problems.size(), 1u);
  EXPECT_NE(problems[0].find("ControlMap"), std::string::npos);
  EXPECT_NE(problems[0].find("empty"), std::string::npos);
}

TEST(Validate, StructuralProblems) {
  Model m = make_paper_example(0.01, 0, 3);
  m.states = StateSpace({{-1.0}, {0.0}, {0.0}});
  EXPECT_TRUE(mentions(validate(m), "pairwise distinct"));

  m = make_paper_example(0.01, 0, 3);
  m.constraints.stages.pop_back();
  EXPECT_TRUE(mentions(validate(m), "ConstraintSets"));

  m = make_paper_example(0.01, 0, 3);
  m.constraints.stages[1] = IndexSet{{0, 7}};
  EXPECT_TRUE(mentions(validate(m), "not a grid state"));

  m = make_paper_example(0.01, 0, 3);
  m.time = {3, 3};
  EXPECT_TRUE(mentions(validate(m), "TimeGrid"));

  m = make_paper_example(0.01, 0, 3);
  m.noise.probs = {-0.1, 1.0, 0.1};
  EXPECT_TRUE(mentions(validate(m), "[0, 1]"));
}

TEST(Validate, ExpressionTotality) {
  Model m = make_paper_example(0.1, 0, 3);
  m.dynamics = ExprDynamics::compile({"1 / x"}, m.dims());
  const auto problems = validate(m);
  ASSERT_EQ(problems.size(), 1u);
  EXPECT_NE(problems[0].find("division by zero"), std::string::npos);
  EXPECT_THROW(require_valid(m), ModelError);
}

TEST(Validate, TableDynamicsRange) {
  std::mt19937_64 rng(3);
  Model m = testing::random_model(rng);
  EXPECT_TRUE(validate(m).empty());
  std::get<TableDynamics>(m.dynamics).next[0] = 99;
  EXPECT_TRUE(mentions(validate(m), "Dynamics"));
}

TEST(ModelInvariants, SuccessorsAreStatesOrSinkAndSinkAbsorbs) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 30; ++i) {
    const Model m = testing::random_model(rng);
    ASSERT_TRUE(validate(m).empty());
    const TransitionTable table(m);
    for (int t = m.time.t0; t < m.time.T; ++t) {
      EXPECT_FALSE(m.member(t, m.states.sink()));
      for (StateIndex x = 0; x <= m.states.size(); ++x) {
        for (ControlIndex c : m.admissible(t, x)) {
          for (std::size_t w = 0; w < m.noise.size(); ++w) {
            const StateIndex y = m.successor(t, x, c, w);
            EXPECT_LE(y, m.states.sink());
            EXPECT_EQ(y, table.next(t, x, c, w));
            if (m.states.is_sink(x)) EXPECT_EQ(y, m.states.sink());
          }
        }
      }
    }
  }
}

TEST(ModelInvariants, BoxConstraintMembership) {
  Model m = make_paper_example(0.1, 0, 2);
  m.constraints.stages.back() = Box{{0.0}, {10.0}};
  EXPECT_FALSE(m.member(2, 0));
  EXPECT_TRUE(m.member(2, 1));
  EXPECT_TRUE(m.member(2, 2));
  EXPECT_FALSE(m.member(2, m.states.sink()));
}

TEST(ModelIo, RoundTripPreservesModel) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 10; ++i) {
    const Model m = testing::random_model(rng);
    const std::string text = model_to_json(m);
    const Model back = model_from_json(text);
    EXPECT_EQ(model_to_json(back), text);
    EXPECT_TRUE(validate(back).empty());
  }
  const Model ex = make_paper_example(0.01, 0, 40);
  EXPECT_EQ(model_to_json(model_from_json(model_to_json(ex))), model_to_json(ex));
}

TEST(ModelIo, RejectsUnknownFields) {
  const Model ex = make_paper_example(0.01, 0, 4);
  std::string text = model_to_json(ex);
  text.insert(text.find('{') + 1, "\"colour\": 1,");
  try {
    model_from_json(text);
    FAIL();
  } catch (const ModelError& e) {
    EXPECT_NE(std::string(e.what()).find("colour"), std::string::npos);
  }
}

TEST(ModelIo, DiagnosticsNameFieldOrOffset) {
  try {
    model_from_json("{\"time\": {\"t0\": 0}}");
    FAIL();
  } catch (const ModelError& e) {
    EXPECT_NE(std::string(e.what()).find("$.time"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("'T'"), std::string::npos);
  }
  try {
    model_from_json("{\"time\": ");
    FAIL();
  } catch (const ModelError& e) {
    EXPECT_NE(std::string(e.what()).find("byte offset"), std::string::npos);
  }
}

TEST(ModelIo, BoxConstraintsWithTarget) {
  const char* text = R"({
    "time": {"t0": 0, "T": 2},
    "states": {"dim": 1, "points": [[0], [1], [2]]},
    "controls": {"mode": "shared", "values": [[0]]},
    "noise": {"support": [[0]], "probs": [1]},
    "dynamics": {"mode": "expr", "body": ["x + 1"]},
    "constraints": {"mode": "box", "stationary": {"lower": [0], "upper": [2]},
                    "target": {"lower": [2], "upper": [2]}}
  })";
  const Model m = model_from_json(text);
  EXPECT_TRUE(validate(m).empty());
  EXPECT_TRUE(m.member(0, 0));
  EXPECT_FALSE(m.member(2, 1));
  EXPECT_TRUE(m.member(2, 2));
  EXPECT_EQ(m.successor(0, 2, 0, 0), m.states.sink());
}

}  // namespace
}  // namespace viab

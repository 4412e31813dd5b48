#include "viab/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "viab/error.hpp"

namespace viab {

StateSpace::StateSpace(std::vector<Vec> points) : points_(std::move(points)) {
  dim_ = points_.empty() ? 0 : points_.front().size();
  spacing_.assign(dim_, 0.0);
  for (std::size_t k = 0; k < dim_; ++k) {
    std::vector<double> axis;
    axis.reserve(points_.size());
    for (const Vec& pt : points_) {
      if (pt.size() == dim_) axis.push_back(pt[k]);
    }
    std::sort(axis.begin(), axis.end());
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < axis.size(); ++i) {
      const double d = axis[i] - axis[i - 1];
      if (d > 0.0) gap = std::min(gap, d);
    }
    spacing_[k] = std::isfinite(gap) ? gap : 0.0;
  }
  for (StateIndex i = 0; i < points_.size(); ++i) {
    const Vec& pt = points_[i];
    if (std::all_of(pt.begin(), pt.end(), [](double c) { return std::isfinite(c); })) index_.emplace(pt, i);
  }
}

StateIndex StateSpace::find(std::span<const double> coords) const {
  if (!std::all_of(coords.begin(), coords.end(), [](double c) { return std::isfinite(c); })) return sink();
  const auto it = index_.find(Vec(coords.begin(), coords.end()));
  return it == index_.end() ? sink() : it->second;
}

StateIndex project_to_grid(const StateSpace& states, std::span<const double> point) {
  if (point.size() != states.dim()) {
    throw ArgumentError("project_to_grid: point has dimension " + std::to_string(point.size()) +
                        ", state space has " + std::to_string(states.dim()));
  }
  // Exact hits are the common case and are always the unique nearest point.
  if (const StateIndex hit = states.find(point); !states.is_sink(hit)) return hit;
  StateIndex best = states.sink();
  double best_d2 = std::numeric_limits<double>::infinity();
  for (StateIndex i = 0; i < states.size(); ++i) {
    const Vec& g = states.point(i);
    double d2 = 0.0;
    for (std::size_t k = 0; k < point.size(); ++k) {
      const double d = point[k] - g[k];
      d2 += d * d;
    }
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  if (best == states.sink()) return best;
  const Vec& g = states.point(best);
  for (std::size_t k = 0; k < point.size(); ++k) {
    if (std::fabs(point[k] - g[k]) > 0.5 * states.spacing()[k]) return states.sink();
  }
  return best;
}

ControlMap ControlMap::shared(std::vector<Vec> values) {
  ControlMap map;
  map.mode_ = Mode::Shared;
  map.values_ = std::move(values);
  map.all_.resize(map.values_.size());
  for (std::size_t i = 0; i < map.all_.size(); ++i) map.all_[i] = i;
  return map;
}

ControlMap ControlMap::per_state(std::vector<Vec> values,
                                 std::vector<std::vector<ControlIndex>> lists) {
  ControlMap map;
  map.mode_ = Mode::PerState;
  map.values_ = std::move(values);
  map.state_lists_ = std::move(lists);
  return map;
}

ControlMap ControlMap::per_stage(std::vector<Vec> values,
                                 std::vector<std::vector<std::vector<ControlIndex>>> lists) {
  ControlMap map;
  map.mode_ = Mode::PerStage;
  map.values_ = std::move(values);
  map.stage_lists_ = std::move(lists);
  return map;
}

std::span<const ControlIndex> ControlMap::admissible(std::size_t stage, StateIndex x) const {
  switch (mode_) {
    case Mode::Shared:
      return all_;
    case Mode::PerState:
      return state_lists_.at(x);
    case Mode::PerStage:
      return stage_lists_.at(stage).at(x);
  }
  return {};
}

ExprDynamics ExprDynamics::compile(std::vector<std::string> sources, expr::Dims dims) {
  ExprDynamics dyn;
  dyn.coords.reserve(sources.size());
  for (const std::string& src : sources) dyn.coords.push_back(expr::parse(src, dims));
  dyn.sources = std::move(sources);
  return dyn;
}

namespace {

bool mentions_time(const expr::Node& node) {
  if (node.kind == expr::NodeKind::Variable && node.slot == 0) return true;
  return std::any_of(node.args.begin(), node.args.end(),
                     [](const auto& child) { return mentions_time(*child); });
}

}  // namespace

bool ExprDynamics::depends_on_time() const {
  return std::any_of(coords.begin(), coords.end(),
                     [](const expr::Ast& ast) { return !ast.empty() && mentions_time(ast.root()); });
}

bool Model::member(int t, StateIndex x) const {
  if (states.is_sink(x)) return false;
  const StageConstraint& c = constraints.stages.at(static_cast<std::size_t>(t - time.t0));
  if (const auto* set = std::get_if<IndexSet>(&c)) {
    return std::binary_search(set->members.begin(), set->members.end(), x);
  }
  const Box& box = std::get<Box>(c);
  const Vec& pt = states.point(x);
  for (std::size_t k = 0; k < pt.size(); ++k) {
    if (pt[k] < box.lower[k] || pt[k] > box.upper[k]) return false;
  }
  return true;
}

std::span<const ControlIndex> Model::admissible(int t, StateIndex x) const {
  static constexpr ControlIndex kDummy[1] = {0};
  if (states.is_sink(x)) return kDummy;
  return controls.admissible(static_cast<std::size_t>(t - time.t0), x);
}

StateIndex Model::successor(int t, StateIndex x, ControlIndex c, std::size_t w) const {
  if (states.is_sink(x)) return states.sink();
  if (const auto* table = std::get_if<TableDynamics>(&dynamics)) {
    const std::int64_t next = table->at(static_cast<std::size_t>(t - time.t0), x, c, w);
    return next < 0 ? states.sink() : static_cast<StateIndex>(next);
  }
  const ExprDynamics& dyn = std::get<ExprDynamics>(dynamics);
  std::vector<double> slots;
  slots.reserve(1 + states.dim() + controls.dim() + noise.dim());
  slots.push_back(static_cast<double>(t));
  const Vec& xv = states.point(x);
  const Vec& uv = controls.values()[c];
  const Vec& wv = noise.support[w];
  slots.insert(slots.end(), xv.begin(), xv.end());
  slots.insert(slots.end(), uv.begin(), uv.end());
  slots.insert(slots.end(), wv.begin(), wv.end());
  Vec image(dyn.coords.size());
  for (std::size_t k = 0; k < dyn.coords.size(); ++k) image[k] = expr::eval(dyn.coords[k], slots);
  return project_to_grid(states, image);
}

namespace {

class Report {
 public:
  template <typename... Parts>
  void add(const Parts&... parts) {
    std::ostringstream os;
    (os << ... << parts);
    items_.push_back(os.str());
  }
  std::vector<std::string> take() { return std::move(items_); }
  std::size_t size() const { return items_.size(); }

 private:
  std::vector<std::string> items_;
};

bool same_dims(const std::vector<Vec>& vs, std::size_t dim) {
  return std::all_of(vs.begin(), vs.end(), [dim](const Vec& v) { return v.size() == dim; });
}

bool all_finite(const std::vector<Vec>& vs) {
  return std::all_of(vs.begin(), vs.end(), [](const Vec& v) {
    return std::all_of(v.begin(), v.end(), [](double d) { return std::isfinite(d); });
  });
}

void check_list(Report& r, const std::vector<ControlIndex>& list, std::size_t catalogue,
                const std::string& where) {
  if (list.empty()) {
    r.add("ControlMap: admissible control list is empty ", where);
    return;
  }
  for (ControlIndex c : list) {
    if (c >= catalogue) r.add("ControlMap: control index ", c, " out of range ", where);
  }
}

void check_dynamics_totality(Report& r, const Model& m) {
  const auto& dyn = std::get<ExprDynamics>(m.dynamics);
  const int last = dyn.depends_on_time() || m.controls.mode() == ControlMap::Mode::PerStage
                       ? m.time.T - 1
                       : m.time.t0;
  for (int t = m.time.t0; t <= last; ++t) {
    for (StateIndex x = 0; x < m.states.size(); ++x) {
      for (ControlIndex c : m.admissible(t, x)) {
        for (std::size_t w = 0; w < m.noise.size(); ++w) {
          try {
            (void)m.successor(t, x, c, w);
          } catch (const Error& e) {
            r.add("Dynamics: evaluation failed at t=", t, ", state ", x, ", control ", c,
                  ", disturbance ", w, ": ", e.what());
            return;
          }
        }
      }
    }
  }
}

}  // namespace

std::vector<std::string> validate(const Model& m) {
  Report r;
  const std::size_t nx = m.states.size();

  if (m.time.t0 >= m.time.T) r.add("TimeGrid: t0 (", m.time.t0, ") must be < T (", m.time.T, ")");

  // StateSpace
  if (nx == 0) r.add("StateSpace: no grid points");
  if (nx > 0 && m.states.dim() == 0) r.add("StateSpace: points have dimension 0");
  if (!same_dims(m.states.points(), m.states.dim())) r.add("StateSpace: inconsistent point dimensions");
  if (!all_finite(m.states.points())) r.add("StateSpace: non-finite coordinate");
  {
    std::set<Vec> seen(m.states.points().begin(), m.states.points().end());
    if (seen.size() != nx) r.add("StateSpace: points are not pairwise distinct");
  }

  // ControlMap
  const std::size_t nc = m.controls.size();
  if (nc == 0) r.add("ControlMap: empty control catalogue");
  if (!same_dims(m.controls.values(), m.controls.dim())) r.add("ControlMap: inconsistent control dimensions");
  bool controls_ok = r.size() == 0;
  const std::size_t before_controls = r.size();
  switch (m.controls.mode()) {
    case ControlMap::Mode::Shared:
      break;
    case ControlMap::Mode::PerState: {
      const auto& lists = m.controls.state_lists();
      if (lists.size() != nx) {
        r.add("ControlMap: per-state lists cover ", lists.size(), " states, expected ", nx);
        break;
      }
      for (StateIndex x = 0; x < nx; ++x) check_list(r, lists[x], nc, "for state " + std::to_string(x));
      break;
    }
    case ControlMap::Mode::PerStage: {
      const auto& lists = m.controls.stage_lists();
      const std::size_t stages = m.time.T > m.time.t0 ? static_cast<std::size_t>(m.time.horizon()) : 0;
      if (lists.size() != stages) {
        r.add("ControlMap: per-stage lists cover ", lists.size(), " stages, expected ", stages);
        break;
      }
      for (std::size_t s = 0; s < stages; ++s) {
        if (lists[s].size() != nx) {
          r.add("ControlMap: stage ", m.time.t0 + static_cast<int>(s), " lists cover ", lists[s].size(),
                " states, expected ", nx);
          continue;
        }
        for (StateIndex x = 0; x < nx; ++x) {
          check_list(r, lists[s][x], nc,
                     "at t=" + std::to_string(m.time.t0 + static_cast<int>(s)) + ", state " + std::to_string(x));
        }
      }
      break;
    }
  }
  controls_ok = controls_ok && r.size() == before_controls;

  // DisturbanceLaw
  const std::size_t nw = m.noise.size();
  bool noise_ok = true;
  if (nw == 0) {
    r.add("DisturbanceLaw: empty support");
    noise_ok = false;
  }
  if (!same_dims(m.noise.support, m.noise.dim())) {
    r.add("DisturbanceLaw: inconsistent support dimensions");
    noise_ok = false;
  }
  if (m.noise.probs.size() != nw) {
    r.add("DisturbanceLaw: ", m.noise.probs.size(), " probabilities for ", nw, " support points");
    noise_ok = false;
  } else {
    double sum = 0.0;
    bool in_range = true;
    for (double pr : m.noise.probs) {
      if (!(pr >= 0.0 && pr <= 1.0)) in_range = false;
      sum += pr;
    }
    if (!in_range) {
      r.add("DisturbanceLaw: probabilities must lie in [0, 1]");
      noise_ok = false;
    }
    if (!(std::fabs(sum - 1.0) <= 1e-12)) {
      std::ostringstream os;
      os.precision(17);
      os << sum;
      r.add("DisturbanceLaw: probabilities sum to ", os.str(), ", not 1 (normalization)");
      noise_ok = false;
    }
  }

  // Dynamics
  bool dynamics_shape_ok = true;
  if (const auto* table = std::get_if<TableDynamics>(&m.dynamics)) {
    const std::size_t horizon = m.time.T > m.time.t0 ? static_cast<std::size_t>(m.time.horizon()) : 0;
    if (table->stages != 1 && table->stages != horizon) {
      r.add("Dynamics: table has ", table->stages, " stages, expected 1 or ", horizon);
      dynamics_shape_ok = false;
    }
    if (table->states != nx || table->controls != nc || table->disturbances != nw) {
      r.add("Dynamics: table shape (", table->states, ", ", table->controls, ", ", table->disturbances,
            ") does not match (states, controls, disturbances) = (", nx, ", ", nc, ", ", nw, ")");
      dynamics_shape_ok = false;
    }
    if (table->next.size() != table->stages * table->states * table->controls * table->disturbances) {
      r.add("Dynamics: table has ", table->next.size(), " entries, shape requires ",
            table->stages * table->states * table->controls * table->disturbances);
      dynamics_shape_ok = false;
    }
    for (std::int64_t v : table->next) {
      if (v < -1 || v >= static_cast<std::int64_t>(nx)) {
        r.add("Dynamics: table entry ", v, " is neither a state index nor -1 (sink)");
        dynamics_shape_ok = false;
        break;
      }
    }
  } else {
    const auto& dyn = std::get<ExprDynamics>(m.dynamics);
    const expr::Dims dims = m.dims();
    if (dyn.coords.size() != m.states.dim()) {
      r.add("Dynamics: ", dyn.coords.size(), " expressions for state dimension ", m.states.dim());
      dynamics_shape_ok = false;
    }
    for (const expr::Ast& ast : dyn.coords) {
      if (ast.empty() || ast.dims().n != dims.n || ast.dims().p != dims.p || ast.dims().q != dims.q) {
        r.add("Dynamics: expression compiled against dimensions that differ from the model");
        dynamics_shape_ok = false;
        break;
      }
    }
  }

  // ConstraintSets
  if (m.time.T > m.time.t0 && m.constraints.stages.size() != m.time.stage_count()) {
    r.add("ConstraintSets: ", m.constraints.stages.size(), " stages, expected ", m.time.stage_count());
  }
  for (std::size_t s = 0; s < m.constraints.stages.size(); ++s) {
    const StageConstraint& c = m.constraints.stages[s];
    if (const auto* set = std::get_if<IndexSet>(&c)) {
      if (!std::is_sorted(set->members.begin(), set->members.end()) ||
          std::adjacent_find(set->members.begin(), set->members.end()) != set->members.end()) {
        r.add("ConstraintSets: stage ", s, " index set is not sorted and unique");
      }
      for (StateIndex x : set->members) {
        if (x >= nx) r.add("ConstraintSets: stage ", s, " member ", x, " is not a grid state");
      }
    } else {
      const Box& box = std::get<Box>(c);
      if (box.lower.size() != m.states.dim() || box.upper.size() != m.states.dim()) {
        r.add("ConstraintSets: stage ", s, " box dimension does not match the state dimension");
      }
    }
  }

  if (r.size() == 0 && controls_ok && noise_ok && dynamics_shape_ok &&
      std::holds_alternative<ExprDynamics>(m.dynamics)) {
    check_dynamics_totality(r, m);
  }
  return r.take();
}

void require_valid(const Model& model) {
  const std::vector<std::string> problems = validate(model);
  if (problems.empty()) return;
  std::string msg = "invalid model:";
  for (const std::string& p : problems) msg += "\n  " + p;
  throw ModelError(msg);
}

Model make_paper_example(double p, int t0, int T) {
  if (!(p > 0.0 && p < 0.5)) throw ArgumentError("p must lie in (0, 1/2)");
  if (t0 >= T) throw ArgumentError("t0 must be < T");

  Model m;
  m.time = {t0, T};
  m.states = StateSpace({{-1.0}, {0.0}, {1.0}});
  m.controls = ControlMap::shared({{-1.0}, {1.0}});
  m.noise = {{{-1.0}, {0.0}, {1.0}}, {p, 1.0 - 2.0 * p, p}};
  m.dynamics = ExprDynamics::compile({"x + u + w"}, m.dims());
  m.constraints.stages.assign(m.time.stage_count(), IndexSet{{0, 1, 2}});
  return m;
}

}  // namespace viab

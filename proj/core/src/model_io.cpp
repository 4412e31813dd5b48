#include "viab/model_io.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"
#include "viab/error.hpp"

namespace viab {
namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ModelError(path + ": " + what);
}

const json& field(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(path, std::string("missing field '") + key + "'");
  return *it;
}

void require_object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; })) {
      fail(path, "unknown field '" + it.key() + "'");
    }
  }
}

const json& array_at(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  return j;
}

double real_at(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

long long int_at(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<long long>();
}

std::size_t index_at(const json& j, const std::string& path) {
  const long long v = int_at(j, path);
  if (v < 0) fail(path, "expected a non-negative index");
  return static_cast<std::size_t>(v);
}

std::string string_at(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

Vec vec_at(const json& j, const std::string& path) {
  Vec out;
  for (std::size_t i = 0; i < array_at(j, path).size(); ++i) out.push_back(real_at(j[i], at(path, i)));
  return out;
}

std::vector<Vec> vecs_at(const json& j, const std::string& path) {
  std::vector<Vec> out;
  for (std::size_t i = 0; i < array_at(j, path).size(); ++i) out.push_back(vec_at(j[i], at(path, i)));
  return out;
}

std::vector<std::size_t> indices_at(const json& j, const std::string& path) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < array_at(j, path).size(); ++i) out.push_back(index_at(j[i], at(path, i)));
  return out;
}

StageConstraint constraint_at(const json& j, const std::string& path, bool box) {
  if (box) {
    require_object(j, path, {"lower", "upper"});
    return Box{vec_at(field(j, path, "lower"), path + ".lower"), vec_at(field(j, path, "upper"), path + ".upper")};
  }
  std::vector<std::size_t> members = indices_at(j, path);
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  return IndexSet{std::move(members)};
}

json constraint_json(const StageConstraint& c) {
  if (const auto* set = std::get_if<IndexSet>(&c)) return set->members;
  const Box& box = std::get<Box>(c);
  return json{{"lower", box.lower}, {"upper", box.upper}};
}

bool same_constraint(const StageConstraint& a, const StageConstraint& b) {
  if (a.index() != b.index()) return false;
  if (const auto* sa = std::get_if<IndexSet>(&a)) return sa->members == std::get<IndexSet>(b).members;
  const Box& ba = std::get<Box>(a);
  const Box& bb = std::get<Box>(b);
  return ba.lower == bb.lower && ba.upper == bb.upper;
}

}  // namespace

Model model_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ModelError("model file is not valid JSON (byte offset " + std::to_string(e.byte) + "): " + e.what());
  }
  require_object(doc, "$", {"description", "time", "states", "controls", "noise", "dynamics", "constraints"});
  if (auto it = doc.find("description"); it != doc.end()) (void)string_at(*it, "$.description");

  Model m;

  const json& time = field(doc, "$", "time");
  require_object(time, "$.time", {"t0", "T"});
  m.time.t0 = static_cast<int>(int_at(field(time, "$.time", "t0"), "$.time.t0"));
  m.time.T = static_cast<int>(int_at(field(time, "$.time", "T"), "$.time.T"));

  const json& states = field(doc, "$", "states");
  require_object(states, "$.states", {"dim", "points"});
  const std::size_t dim = index_at(field(states, "$.states", "dim"), "$.states.dim");
  std::vector<Vec> points = vecs_at(field(states, "$.states", "points"), "$.states.points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != dim) fail(at("$.states.points", i), "expected " + std::to_string(dim) + " coordinates");
  }
  m.states = StateSpace(std::move(points));

  const json& controls = field(doc, "$", "controls");
  require_object(controls, "$.controls", {"mode", "values", "lists"});
  const std::string cmode = string_at(field(controls, "$.controls", "mode"), "$.controls.mode");
  std::vector<Vec> values = vecs_at(field(controls, "$.controls", "values"), "$.controls.values");
  if (cmode == "shared") {
    if (controls.contains("lists")) fail("$.controls.lists", "not allowed with mode 'shared'");
    m.controls = ControlMap::shared(std::move(values));
  } else if (cmode == "per_state") {
    const json& lists = array_at(field(controls, "$.controls", "lists"), "$.controls.lists");
    std::vector<std::vector<ControlIndex>> per_state;
    for (std::size_t x = 0; x < lists.size(); ++x) per_state.push_back(indices_at(lists[x], at("$.controls.lists", x)));
    m.controls = ControlMap::per_state(std::move(values), std::move(per_state));
  } else if (cmode == "per_stage") {
    const json& lists = array_at(field(controls, "$.controls", "lists"), "$.controls.lists");
    std::vector<std::vector<std::vector<ControlIndex>>> per_stage;
    for (std::size_t s = 0; s < lists.size(); ++s) {
      const std::string sp = at("$.controls.lists", s);
      std::vector<std::vector<ControlIndex>> row;
      for (std::size_t x = 0; x < array_at(lists[s], sp).size(); ++x) row.push_back(indices_at(lists[s][x], at(sp, x)));
      per_stage.push_back(std::move(row));
    }
    m.controls = ControlMap::per_stage(std::move(values), std::move(per_stage));
  } else {
    fail("$.controls.mode", "expected 'shared', 'per_state' or 'per_stage', got '" + cmode + "'");
  }

  const json& noise = field(doc, "$", "noise");
  require_object(noise, "$.noise", {"support", "probs"});
  m.noise.support = vecs_at(field(noise, "$.noise", "support"), "$.noise.support");
  m.noise.probs = vec_at(field(noise, "$.noise", "probs"), "$.noise.probs");

  const json& dynamics = field(doc, "$", "dynamics");
  require_object(dynamics, "$.dynamics", {"mode", "stationary", "body"});
  const std::string dmode = string_at(field(dynamics, "$.dynamics", "mode"), "$.dynamics.mode");
  const json& body = array_at(field(dynamics, "$.dynamics", "body"), "$.dynamics.body");
  if (dmode == "expr") {
    if (dynamics.contains("stationary")) fail("$.dynamics.stationary", "not allowed with mode 'expr'");
    std::vector<std::string> sources;
    for (std::size_t k = 0; k < body.size(); ++k) sources.push_back(string_at(body[k], at("$.dynamics.body", k)));
    try {
      m.dynamics = ExprDynamics::compile(std::move(sources), m.dims());
    } catch (const Error& e) {
      fail("$.dynamics.body", e.what());
    }
  } else if (dmode == "table") {
    bool stationary = true;
    if (auto it = dynamics.find("stationary"); it != dynamics.end()) {
      if (!it->is_boolean()) fail("$.dynamics.stationary", "expected a boolean");
      stationary = it->get<bool>();
    }
    TableDynamics table;
    table.states = m.states.size();
    table.controls = m.controls.size();
    table.disturbances = m.noise.size();
    table.stages = stationary ? 1 : body.size();
    auto read_stage = [&](const json& stage, const std::string& sp) {
      if (array_at(stage, sp).size() != table.states) fail(sp, "expected one entry per state");
      for (std::size_t x = 0; x < table.states; ++x) {
        const std::string xp = at(sp, x);
        if (array_at(stage[x], xp).size() != table.controls) fail(xp, "expected one entry per control");
        for (std::size_t c = 0; c < table.controls; ++c) {
          const std::string cp = at(xp, c);
          if (array_at(stage[x][c], cp).size() != table.disturbances) fail(cp, "expected one entry per disturbance");
          for (std::size_t w = 0; w < table.disturbances; ++w) {
            table.next.push_back(int_at(stage[x][c][w], at(cp, w)));
          }
        }
      }
    };
    if (stationary) {
      read_stage(body, "$.dynamics.body");
    } else {
      for (std::size_t s = 0; s < body.size(); ++s) read_stage(body[s], at("$.dynamics.body", s));
    }
    m.dynamics = std::move(table);
  } else {
    fail("$.dynamics.mode", "expected 'table' or 'expr', got '" + dmode + "'");
  }

  const json& constraints = field(doc, "$", "constraints");
  require_object(constraints, "$.constraints", {"mode", "stationary", "per_stage", "target"});
  const std::string kmode = string_at(field(constraints, "$.constraints", "mode"), "$.constraints.mode");
  if (kmode != "set" && kmode != "box") fail("$.constraints.mode", "expected 'set' or 'box', got '" + kmode + "'");
  const bool box = kmode == "box";
  const bool has_stationary = constraints.contains("stationary");
  const bool has_per_stage = constraints.contains("per_stage");
  if (has_stationary == has_per_stage) fail("$.constraints", "exactly one of 'stationary' or 'per_stage' is required");
  if (has_stationary) {
    const StageConstraint c = constraint_at(constraints["stationary"], "$.constraints.stationary", box);
    const std::size_t stages = m.time.T >= m.time.t0 ? m.time.stage_count() : 0;
    m.constraints.stages.assign(stages, c);
  } else {
    const json& per_stage = array_at(constraints["per_stage"], "$.constraints.per_stage");
    for (std::size_t s = 0; s < per_stage.size(); ++s) {
      m.constraints.stages.push_back(constraint_at(per_stage[s], at("$.constraints.per_stage", s), box));
    }
  }
  if (auto it = constraints.find("target"); it != constraints.end()) {
    if (m.constraints.stages.empty()) fail("$.constraints.target", "no stages to apply the target to");
    m.constraints.stages.back() = constraint_at(*it, "$.constraints.target", box);
  }
  return m;
}

std::string model_to_json(const Model& m) {
  json doc;
  doc["time"] = {{"t0", m.time.t0}, {"T", m.time.T}};
  doc["states"] = {{"dim", m.states.dim()}, {"points", m.states.points()}};

  json controls{{"values", m.controls.values()}};
  switch (m.controls.mode()) {
    case ControlMap::Mode::Shared:
      controls["mode"] = "shared";
      break;
    case ControlMap::Mode::PerState:
      controls["mode"] = "per_state";
      controls["lists"] = m.controls.state_lists();
      break;
    case ControlMap::Mode::PerStage:
      controls["mode"] = "per_stage";
      controls["lists"] = m.controls.stage_lists();
      break;
  }
  doc["controls"] = std::move(controls);
  doc["noise"] = {{"support", m.noise.support}, {"probs", m.noise.probs}};

  if (const auto* table = std::get_if<TableDynamics>(&m.dynamics)) {
    json stages = json::array();
    std::size_t k = 0;
    for (std::size_t s = 0; s < table->stages; ++s) {
      json stage = json::array();
      for (std::size_t x = 0; x < table->states; ++x) {
        json row = json::array();
        for (std::size_t c = 0; c < table->controls; ++c) {
          json cell = json::array();
          for (std::size_t w = 0; w < table->disturbances; ++w) cell.push_back(table->next[k++]);
          row.push_back(std::move(cell));
        }
        stage.push_back(std::move(row));
      }
      stages.push_back(std::move(stage));
    }
    const bool stationary = table->stages == 1;
    doc["dynamics"] = {{"mode", "table"}, {"stationary", stationary}, {"body", stationary ? stages[0] : stages}};
  } else {
    doc["dynamics"] = {{"mode", "expr"}, {"body", std::get<ExprDynamics>(m.dynamics).sources}};
  }

  const auto& stages = m.constraints.stages;
  const bool box = !stages.empty() && std::holds_alternative<Box>(stages.front());
  json constraints{{"mode", box ? "box" : "set"}};
  if (!stages.empty() && std::all_of(stages.begin(), stages.end() - 1,
                                     [&](const StageConstraint& c) { return same_constraint(c, stages.front()); })) {
    constraints["stationary"] = constraint_json(stages.front());
    if (!same_constraint(stages.back(), stages.front())) constraints["target"] = constraint_json(stages.back());
  } else {
    json per_stage = json::array();
    for (const StageConstraint& c : stages) per_stage.push_back(constraint_json(c));
    constraints["per_stage"] = std::move(per_stage);
  }
  doc["constraints"] = std::move(constraints);
  return doc.dump(2) + "\n";
}

Model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

void save_model(const Model& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write model file '" + path + "'");
  out << model_to_json(model);
  if (!out) throw IoError("failed writing model file '" + path + "'");
}

}  // namespace viab

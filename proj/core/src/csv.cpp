#include "viab/csv.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "viab/error.hpp"

namespace viab::csv {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool next_line(std::istream& is, std::string& line) {
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) return true;
  }
  return false;
}

template <typename Int>
Int parse_int(const std::string& s, std::size_t line_no) {
  Int v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw IoError("line " + std::to_string(line_no) + ": expected an integer, got '" + s + "'");
  }
  return v;
}

double parse_real(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw IoError("line " + std::to_string(line_no) + ": expected a number, got '" + s + "'");
  }
  return v;
}

void write_coords(std::ostream& os, const Vec& v) {
  for (double c : v) os << ',' << format_real(c);
}

void write_header(std::ostream& os, const char* head, char var, std::size_t dim, const char* tail) {
  os << head;
  for (std::size_t k = 1; k <= dim; ++k) os << ',' << var << k;
  if (tail != nullptr) os << ',' << tail;
  os << '\n';
}

long long file_index(const Model& model, StateIndex x) {
  return model.states.is_sink(x) ? -1 : static_cast<long long>(x);
}

}  // namespace

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_values(std::ostream& os, const StateSpace& states, const ValueFunction& value) {
  write_header(os, "t,state_index", 'x', states.dim(), "value");
  for (const ValueSlice& slice : value.slices()) {
    for (StateIndex x = 0; x < states.size(); ++x) {
      os << slice.t << ',' << x;
      write_coords(os, states.point(x));
      os << ',' << format_real(slice.values[x]) << '\n';
    }
  }
}

ValueTable read_values(std::istream& is) {
  std::string line;
  if (!next_line(is, line)) throw IoError("value file is empty");
  const std::vector<std::string> header = split(line);
  if (header.size() < 4 || header[0] != "t" || header[1] != "state_index" || header.back() != "value") {
    throw IoError("line 1: expected header t,state_index,x1..xn,value");
  }
  const std::size_t dim = header.size() - 3;

  std::map<int, std::map<std::size_t, double>> rows;
  std::map<std::size_t, Vec> coords;
  std::size_t line_no = 1;
  while (next_line(is, line)) {
    ++line_no;
    const std::vector<std::string> cells = split(line);
    if (cells.size() != header.size()) {
      throw IoError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                    " fields, got " + std::to_string(cells.size()));
    }
    const int t = parse_int<int>(cells[0], line_no);
    const auto x = parse_int<std::size_t>(cells[1], line_no);
    Vec pt(dim);
    for (std::size_t k = 0; k < dim; ++k) pt[k] = parse_real(cells[2 + k], line_no);
    const double v = parse_real(cells.back(), line_no);
    if (auto [it, fresh] = coords.emplace(x, pt); !fresh && it->second != pt) {
      throw IoError("line " + std::to_string(line_no) + ": coordinates of state " + std::to_string(x) +
                    " change between rows");
    }
    if (!rows[t].emplace(x, v).second) {
      throw IoError("line " + std::to_string(line_no) + ": duplicate row for t=" + std::to_string(t) +
                    ", state " + std::to_string(x));
    }
  }
  if (rows.empty()) throw IoError("value file has no rows");

  const std::size_t nx = coords.size();
  std::vector<Vec> points;
  points.reserve(nx);
  for (std::size_t x = 0; x < nx; ++x) {
    auto it = coords.find(x);
    if (it == coords.end()) throw IoError("state indices are not contiguous from 0");
    points.push_back(it->second);
  }
  const int t0 = rows.begin()->first;
  const int T = rows.rbegin()->first;
  std::vector<ValueSlice> slices;
  for (int t = t0; t <= T; ++t) {
    auto it = rows.find(t);
    if (it == rows.end() || it->second.size() != nx) {
      throw IoError("stage " + std::to_string(t) + " is missing or incomplete");
    }
    ValueSlice s{t, std::vector<double>(nx + 1, 0.0)};
    for (const auto& [x, v] : it->second) s.values[x] = v;
    slices.push_back(std::move(s));
  }
  return {StateSpace(std::move(points)), ValueFunction(t0, T, std::move(slices))};
}

void write_argmax(std::ostream& os, const Model& model, const ArgmaxPolicy& argmax) {
  write_header(os, "t,state_index,control_index", 'u', model.controls.dim(), nullptr);
  for (int t = argmax.t0(); t < argmax.T(); ++t) {
    for (StateIndex x = 0; x < model.states.size(); ++x) {
      for (ControlIndex c : argmax.viable(t, x)) {
        os << t << ',' << x << ',' << c;
        write_coords(os, model.controls.values()[c]);
        os << '\n';
      }
    }
  }
}

ArgmaxPolicy read_argmax(std::istream& is, const Model& model) {
  std::string line;
  if (!next_line(is, line)) throw IoError("argmax file is empty");
  const std::size_t width = split(line).size();
  ArgmaxPolicy argmax(model.time.t0, model.time.T, model.states.total());
  std::size_t line_no = 1;
  while (next_line(is, line)) {
    ++line_no;
    const std::vector<std::string> cells = split(line);
    if (cells.size() != width) throw IoError("line " + std::to_string(line_no) + ": wrong field count");
    const int t = parse_int<int>(cells[0], line_no);
    const auto x = parse_int<std::size_t>(cells[1], line_no);
    const auto c = parse_int<std::size_t>(cells[2], line_no);
    if (t < model.time.t0 || t >= model.time.T || x >= model.states.size() || c >= model.controls.size()) {
      throw IoError("line " + std::to_string(line_no) + ": entry does not fit the model");
    }
    argmax.viable(t, x).push_back(c);
  }
  return argmax;
}

void write_policy(std::ostream& os, const Model& model, const FeedbackPolicy& policy) {
  write_header(os, "t,state_index,control_index", 'u', model.controls.dim(), nullptr);
  for (int t = policy.t0(); t < policy.T(); ++t) {
    for (StateIndex x = 0; x < model.states.size(); ++x) {
      const ControlIndex c = policy.choose(t, x);
      os << t << ',' << x << ',' << c;
      write_coords(os, model.controls.values()[c]);
      os << '\n';
    }
  }
}

void write_kernel(std::ostream& os, const StateSpace& states, const KernelSlice& kernel) {
  write_header(os, "t,beta,state_index", 'x', states.dim(), nullptr);
  for (StateIndex x : kernel.members) {
    os << kernel.t << ',' << format_real(kernel.beta) << ',' << x;
    write_coords(os, states.point(x));
    os << '\n';
  }
}

void write_trajectories(std::ostream& os, const Model& model, const std::vector<Trajectory>& paths) {
  write_header(os, "sample,t,state_index", 'x', model.states.dim(), "control_index,success");
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const Trajectory& p = paths[i];
    for (std::size_t k = 0; k < p.states.size(); ++k) {
      const StateIndex x = p.states[k];
      os << i << ',' << model.time.t0 + static_cast<int>(k) << ',' << file_index(model, x);
      if (model.states.is_sink(x)) {
        for (std::size_t d = 0; d < model.states.dim(); ++d) os << ',';
      } else {
        write_coords(os, model.states.point(x));
      }
      os << ',';
      if (k < p.controls.size() && !model.states.is_sink(x)) os << p.controls[k];
      os << ',' << (p.success ? 1 : 0) << '\n';
    }
  }
}

void write_path_plot(std::ostream& os, const Model& model, const std::vector<Trajectory>& paths) {
  os << 't';
  for (std::size_t i = 0; i < paths.size(); ++i) os << ",sample_" << i;
  os << '\n';
  for (int t = model.time.t0; t <= model.time.T; ++t) {
    os << t;
    for (const Trajectory& p : paths) {
      const StateIndex x = p.states[static_cast<std::size_t>(t - model.time.t0)];
      os << ',';
      if (!model.states.is_sink(x)) os << format_real(model.states.point(x).front());
    }
    os << '\n';
  }
}

std::string format_estimate(const ProbabilityEstimate& est) {
  return format_real(est.mean) + ' ' + std::to_string(est.n) + ' ' + format_real(est.ci_low) + ' ' +
         format_real(est.ci_high) + ' ' + std::to_string(est.seed);
}

}  // namespace viab::csv

#include "cli.hpp"

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "viab/csv.hpp"
#include "viab/dp.hpp"
#include "viab/error.hpp"
#include "viab/kernel.hpp"
#include "viab/mc.hpp"
#include "viab/model.hpp"
#include "viab/model_io.hpp"
#include "viab/oracle_example.hpp"
#include "viab/transitions.hpp"

namespace viab::cli {
namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::string model;
  std::string value;
  std::string out;
  std::string plot;
  std::string cache;
  std::string x0;
  std::string tie = "smallest";
  std::string matrix = "published";
  std::optional<double> beta;
  std::optional<int> time;
  double p = 0.0;
  int t0 = 0;
  int horizon = 0;
  std::size_t samples = 9;
  std::size_t estimate_samples = 10000;
  std::uint64_t seed = 0;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  return out;
}

void finish(std::ofstream& os, const std::string& path) {
  os.close();
  if (!os) throw IoError("failed writing '" + path + "'");
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string coords_text(const Vec& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ',';
    s += csv::format_real(v[k]);
  }
  return s;
}

void check_beta(const std::optional<double>& beta) {
  if (!beta) throw UsageError("--beta is required");
  if (!(*beta > 0.0 && *beta <= 1.0)) throw UsageError("--beta must lie in (0, 1]");
}

/// A model file together with its solution, possibly from the solve cache.
struct Loaded {
  Model model;
  Solution solution;
};

Loaded load_and_solve(const RunConfig& cfg) {
  const std::string text = read_file(cfg.model);
  Loaded l{model_from_json(text), {}};
  require_valid(l.model);

  std::string cache_dir = cfg.cache;
  if (cache_dir.empty()) {
    if (const char* env = std::getenv("VIAB_CACHE_DIR")) cache_dir = env;
  }
  std::filesystem::path value_path, argmax_path;
  if (!cache_dir.empty()) {
    char key[17];
    std::snprintf(key, sizeof key, "%016llx", static_cast<unsigned long long>(fnv1a(text)));
    value_path = std::filesystem::path(cache_dir) / (std::string(key) + ".value.csv");
    argmax_path = std::filesystem::path(cache_dir) / (std::string(key) + ".argmax.csv");
    if (std::filesystem::exists(value_path) && std::filesystem::exists(argmax_path)) {
      std::ifstream vin(value_path), ain(argmax_path);
      csv::ValueTable table = csv::read_values(vin);
      if (table.value.t0() == l.model.time.t0 && table.value.T() == l.model.time.T &&
          table.states.points() == l.model.states.points()) {
        l.solution.value = std::move(table.value);
        l.solution.argmax = csv::read_argmax(ain, l.model);
        return l;
      }
    }
  }

  l.solution = solve(l.model);
  if (!cache_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(cache_dir, ec);
    std::ofstream vout(value_path, std::ios::binary), aout(argmax_path, std::ios::binary);
    if (vout && aout) {
      csv::write_values(vout, l.model.states, l.solution.value);
      csv::write_argmax(aout, l.model, l.solution.argmax);
    }
  }
  return l;
}

StateIndex parse_state(const Model& model, const std::string& text) {
  if (text.empty()) throw UsageError("--x0 is required");
  if (text == "sink") throw ArgumentError("--x0 must be a grid state, not the sink");
  Vec coords;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      coords.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw UsageError("--x0: cannot parse coordinate '" + item + "'");
    }
  }
  if (coords.size() != model.states.dim()) {
    throw ArgumentError("--x0 has " + std::to_string(coords.size()) + " coordinates, state dimension is " +
                        std::to_string(model.states.dim()));
  }
  const StateIndex x = model.states.find(coords);
  if (model.states.is_sink(x)) throw ArgumentError("--x0 (" + text + ") is not a grid state");
  return x;
}

TieBreak parse_tie(const std::string& rule) {
  if (rule == "smallest") return TieBreak::smallest();
  if (rule == "largest") return TieBreak::largest();
  throw UsageError("--tie must be 'smallest' or 'largest'");
}

int cmd_example(const RunConfig& cfg, std::ostream& out) {
  if (!(cfg.p > 0.0 && cfg.p < 0.5)) throw UsageError("--p must lie in (0, 1/2)");
  if (cfg.horizon <= cfg.t0) throw UsageError("--horizon must exceed the initial stage");
  const Model m = make_paper_example(cfg.p, cfg.t0, cfg.horizon);
  save_model(m, cfg.out);
  out << "wrote " << cfg.out << '\n';
  return kOk;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
  const Loaded l = load_and_solve(cfg);
  const std::string value_path = cfg.out + ".value.csv";
  const std::string argmax_path = cfg.out + ".argmax.csv";
  std::ofstream vout = open_out(value_path);
  csv::write_values(vout, l.model.states, l.solution.value);
  finish(vout, value_path);
  std::ofstream aout = open_out(argmax_path);
  csv::write_argmax(aout, l.model, l.solution.argmax);
  finish(aout, argmax_path);
  const int t0 = l.model.time.t0;
  for (StateIndex x = 0; x < l.model.states.size(); ++x) {
    out << "V(" << t0 << ", " << coords_text(l.model.states.point(x)) << ") = "
        << csv::format_real(l.solution.value.at(t0, x)) << '\n';
  }
  return kOk;
}

int cmd_value(const RunConfig& cfg, std::ostream& out) {
  const Loaded l = load_and_solve(cfg);
  const int t = cfg.time.value_or(l.model.time.t0);
  if (!l.model.time.contains(t)) throw ArgumentError("stage " + std::to_string(t) + " outside the horizon");
  if (!cfg.x0.empty()) {
    const StateIndex x = parse_state(l.model, cfg.x0);
    out << csv::format_real(l.solution.value.at(t, x)) << '\n';
    return kOk;
  }
  for (StateIndex x = 0; x < l.model.states.size(); ++x) {
    out << coords_text(l.model.states.point(x)) << ' ' << csv::format_real(l.solution.value.at(t, x)) << '\n';
  }
  return kOk;
}

int cmd_kernel(const RunConfig& cfg, std::ostream& out) {
  check_beta(cfg.beta);
  if (!cfg.time) throw UsageError("--time is required");
  StateSpace states;
  ValueFunction value;
  if (!cfg.value.empty()) {
    std::ifstream in(cfg.value, std::ios::binary);
    if (!in) throw IoError("cannot open '" + cfg.value + "'");
    csv::ValueTable table = csv::read_values(in);
    states = std::move(table.states);
    value = std::move(table.value);
  } else if (!cfg.model.empty()) {
    Loaded l = load_and_solve(cfg);
    states = l.model.states;
    value = std::move(l.solution.value);
  } else {
    throw UsageError("kernel needs --value or --model");
  }
  const KernelSlice k = kernel_slice(value, *cfg.time, *cfg.beta);
  for (StateIndex x : k.members) out << coords_text(states.point(x)) << '\n';
  if (!cfg.out.empty()) {
    std::ofstream os = open_out(cfg.out);
    csv::write_kernel(os, states, k);
    finish(os, cfg.out);
  }
  return kOk;
}

int cmd_policy(const RunConfig& cfg, std::ostream& out) {
  const Loaded l = load_and_solve(cfg);
  const FeedbackPolicy policy = select_feedback(l.model, l.solution.argmax, parse_tie(cfg.tie));
  if (cfg.out.empty()) {
    csv::write_policy(out, l.model, policy);
  } else {
    std::ofstream os = open_out(cfg.out);
    csv::write_policy(os, l.model, policy);
    finish(os, cfg.out);
  }
  return kOk;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  if (cfg.samples == 0) throw UsageError("--samples must be >= 1");
  const Loaded l = load_and_solve(cfg);
  const StateIndex x0 = parse_state(l.model, cfg.x0);
  const FeedbackPolicy policy = select_feedback(l.model, l.solution.argmax, parse_tie(cfg.tie));
  const TransitionTable transitions(l.model);
  std::vector<Trajectory> paths;
  paths.reserve(cfg.samples);
  std::size_t successes = 0;
  for (std::size_t i = 0; i < cfg.samples; ++i) {
    paths.push_back(simulate(l.model, transitions, policy, x0, derive_seed(cfg.seed, i)));
    successes += paths.back().success ? 1 : 0;
  }
  if (!cfg.out.empty()) {
    std::ofstream os = open_out(cfg.out);
    csv::write_trajectories(os, l.model, paths);
    finish(os, cfg.out);
  }
  if (!cfg.plot.empty()) {
    std::ofstream os = open_out(cfg.plot);
    csv::write_path_plot(os, l.model, paths);
    finish(os, cfg.plot);
  }
  out << "samples " << cfg.samples << " successes " << successes << " violations " << cfg.samples - successes
      << " success_fraction "
      << csv::format_real(static_cast<double>(successes) / static_cast<double>(cfg.samples)) << '\n';
  return kOk;
}

int cmd_estimate(const RunConfig& cfg, std::ostream& out) {
  if (cfg.estimate_samples == 0) throw UsageError("--samples must be >= 1");
  const Loaded l = load_and_solve(cfg);
  const StateIndex x0 = parse_state(l.model, cfg.x0);
  const FeedbackPolicy policy = select_feedback(l.model, l.solution.argmax, parse_tie(cfg.tie));
  const ProbabilityEstimate est = estimate_probability(l.model, policy, x0, cfg.estimate_samples, cfg.seed);
  const std::string line = csv::format_estimate(est);
  out << line << '\n';
  if (!cfg.out.empty()) {
    std::ofstream os = open_out(cfg.out);
    os << line << '\n';
    finish(os, cfg.out);
  }
  return kOk;
}

int cmd_oracle(const RunConfig& cfg, std::ostream& out) {
  if (!(cfg.p > 0.0 && cfg.p < 0.5)) throw UsageError("--p must lie in (0, 1/2)");
  if (cfg.horizon <= cfg.t0) throw UsageError("--horizon must exceed the initial stage");
  const bool published = cfg.matrix == "published";
  if (!published && cfg.matrix != "dynamics") throw UsageError("--matrix must be 'published' or 'dynamics'");
  if (cfg.beta) check_beta(cfg.beta);
  if (cfg.time && (*cfg.time < cfg.t0 || *cfg.time > cfg.horizon)) {
    throw ArgumentError("stage " + std::to_string(*cfg.time) + " outside the horizon");
  }
  const int first = cfg.time.value_or(cfg.t0);
  const int last = cfg.time.value_or(cfg.horizon);
  out << (cfg.beta ? "t,v_minus1,v_0,v_plus1,kernel\n" : "t,v_minus1,v_0,v_plus1\n");
  for (int t = first; t <= last; ++t) {
    out << t;
    for (int x = -1; x <= 1; ++x) {
      const double v = published ? oracle::matrix_value(cfg.p, cfg.horizon, t, x)
                                 : oracle::dynamics_matrix_value(cfg.p, cfg.horizon, t, x);
      out << ',' << csv::format_real(v);
    }
    if (cfg.beta) {
      const oracle::KernelShape shape = published
                                            ? oracle::kernel_closed_form(cfg.p, cfg.horizon, t, *cfg.beta)
                                            : oracle::dynamics_kernel_closed_form(cfg.p, cfg.horizon, t, *cfg.beta);
      out << ',' << oracle::to_string(shape);
    }
    out << '\n';
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Stochastic viability kernels, value functions and viable feedbacks"};
  app.require_subcommand(1);

  auto add_model = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--model", cfg.model, "model file (JSON)");
    if (required) opt->required();
    sub->add_option("--cache", cfg.cache, "solve cache directory (default: $VIAB_CACHE_DIR)");
  };

  auto* example = app.add_subcommand("example", "write the three-state example model");
  example->add_option("--p", cfg.p, "probability of w = -1 and of w = +1")->required();
  example->add_option("--horizon", cfg.horizon, "final stage T")->required();
  example->add_option("--t0", cfg.t0, "initial stage");
  example->add_option("--out", cfg.out, "output model file")->required();

  auto* solve_cmd = app.add_subcommand("solve", "value function and argmax controls");
  add_model(solve_cmd, true);
  solve_cmd->add_option("--out", cfg.out, "output prefix: <out>.value.csv, <out>.argmax.csv")->required();

  auto* value = app.add_subcommand("value", "print V(t, x)");
  add_model(value, true);
  value->add_option("--time", cfg.time, "stage (default t0)");
  value->add_option("--x0", cfg.x0, "state coordinates, comma separated");

  auto* kernel = app.add_subcommand("kernel", "states with V(t, x) >= beta");
  add_model(kernel, false);
  kernel->add_option("--value", cfg.value, "value CSV written by solve");
  kernel->add_option("--time", cfg.time, "stage");
  kernel->add_option("--beta", cfg.beta, "confidence level in (0, 1]");
  kernel->add_option("--out", cfg.out, "kernel CSV");

  auto* policy = app.add_subcommand("policy", "export one viable feedback");
  add_model(policy, true);
  policy->add_option("--out", cfg.out, "policy CSV (default: standard output)");
  policy->add_option("--tie", cfg.tie, "tie break: smallest | largest");

  auto* simulate_cmd = app.add_subcommand("simulate", "closed-loop trajectories under the viable feedback");
  add_model(simulate_cmd, true);
  simulate_cmd->add_option("--x0", cfg.x0, "initial state coordinates")->required();
  simulate_cmd->add_option("--samples", cfg.samples, "number of trajectories (default 9)");
  simulate_cmd->add_option("--seed", cfg.seed, "base seed");
  simulate_cmd->add_option("--out", cfg.out, "trajectory CSV");
  simulate_cmd->add_option("--plot", cfg.plot, "wide CSV of state paths for plotting");
  simulate_cmd->add_option("--tie", cfg.tie, "tie break: smallest | largest");

  auto* estimate = app.add_subcommand("estimate", "Monte Carlo success probability");
  add_model(estimate, true);
  estimate->add_option("--x0", cfg.x0, "initial state coordinates")->required();
  estimate->add_option("--samples", cfg.estimate_samples, "number of trajectories (default 10000)");
  estimate->add_option("--seed", cfg.seed, "base seed");
  estimate->add_option("--out", cfg.out, "report file");
  estimate->add_option("--tie", cfg.tie, "tie break: smallest | largest");

  auto* oracle_cmd = app.add_subcommand("oracle", "closed-form values for the three-state example");
  oracle_cmd->add_option("--p", cfg.p, "noise parameter")->required();
  oracle_cmd->add_option("--horizon", cfg.horizon, "final stage T")->required();
  oracle_cmd->add_option("--t0", cfg.t0, "initial stage");
  oracle_cmd->add_option("--time", cfg.time, "single stage (default: all)");
  oracle_cmd->add_option("--beta", cfg.beta, "also report the kernel shape at this level");
  oracle_cmd->add_option("--matrix", cfg.matrix, "published | dynamics");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (example->parsed()) return cmd_example(cfg, out);
    if (solve_cmd->parsed()) return cmd_solve(cfg, out);
    if (value->parsed()) return cmd_value(cfg, out);
    if (kernel->parsed()) return cmd_kernel(cfg, out);
    if (policy->parsed()) return cmd_policy(cfg, out);
    if (simulate_cmd->parsed()) return cmd_simulate(cfg, out);
    if (estimate->parsed()) return cmd_estimate(cfg, out);
    if (oracle_cmd->parsed()) return cmd_oracle(cfg, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace viab::cli

// Copyright 2026 The bincz Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// bincz command-line driver.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bincz/diagnostics.hpp"
#include "bincz/errors.hpp"
#include "bincz/grape.hpp"
#include "bincz/pipeline.hpp"
#include "bincz/tomography.hpp"
#include "bincz/units.hpp"

using namespace bincz;

namespace {

constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

struct Common {
  std::string system = "paper";
  std::string pulses;
  double dt_ns = 2.0;
  std::uint64_t seed = 1;
  std::string out = "out";
  std::size_t truncation = 0;  // 0: per-experiment default
  bool postselect = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--system", c.system, "System profile file, or \"paper\"");
  app->add_option("--pulses", c.pulses, "Pulse CSV, or a directory of <stage>_pulses.csv files");
  app->add_option("--dt-ns", c.dt_ns, "Time step in ns");
  app->add_option("--seed", c.seed, "Random seed");
  app->add_option("--out", c.out, "Output directory");
  app->add_option("--truncation", c.truncation, "Cavity truncation");
  app->add_flag("--postselect", c.postselect, "Post-select on the coupler in |g>");
}

std::size_t truncation_or(const Common& c, std::size_t fallback) { return c.truncation ? c.truncation : fallback; }

// Pulse file for `stage`: the --pulses path itself when it is a file, else
// <dir>/<stage>_pulses.csv.
PulseSet stage_pulses(const Common& c, const std::string& stage) {
  if (c.pulses.empty()) throw SchemaError("pulses", "no --pulses given for stage " + stage + " (or pass --ideal)");
  std::filesystem::path p(c.pulses);
  if (std::filesystem::is_directory(p)) p /= stage + "_pulses.csv";
  if (!std::filesystem::exists(p)) throw SchemaError("pulses", "missing pulse file " + p.string());
  return read_pulses_file(p.string());
}

ErrorChannelSet parse_channels(const std::string& text, const SystemSpec& system) {
  if (text.empty() || text == "none") return ErrorChannelSet::none();
  if (text == "all") return ErrorChannelSet::all(system);
  // Comma list of LABEL:T1, LABEL:T2 or LABEL:T1T2.
  ErrorChannelSet set;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw SchemaError("channels", "expected LABEL:T1, LABEL:T2 or LABEL:T1T2, got " + item);
    const auto label = item.substr(0, colon);
    const auto kinds = item.substr(colon + 1);
    const bool t1 = kinds.find("T1") != std::string::npos;
    const bool t2 = kinds.find("T2") != std::string::npos;
    if (!t1 && !t2) throw SchemaError("channels", "no channel in " + item);
    const auto prev = set.get(label);
    set.set(label, prev.relaxation || t1, prev.dephasing || t2);
  }
  set.validate(system);
  return set;
}

void print_report(const ExperimentReport& r) {
  std::cout << r.experiment << "\n";
  for (const auto& [k, v] : r.scalars) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    std::cout << "  " << k << " = " << buf << "\n";
  }
  for (const auto& f : r.files) std::cout << "  wrote " << f << "\n";
}

// ---------------------------------------------------------------------------

struct OptimizeArgs {
  std::string kind;
  double duration_us = 0.0;
  std::size_t iters = 500;
  std::string method = "momentum";
  double amp_max_mhz = 10.0;
  double lambda_amp = 0.0;
  double lambda_smooth = 0.0;
  double target_cost = 0.0;
  bool reduced = false;
};

int run_optimize(const Common& c, const OptimizeArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  const SystemSpec profile = load_system_from(c.system);
  GrapeConfig cfg;
  cfg.max_iters = a.iters;
  cfg.method = parse_method(a.method);
  cfg.amp_max = units::mhz_to_rad_per_s(a.amp_max_mhz);
  cfg.lambda_amp = a.lambda_amp;
  cfg.lambda_smooth = a.lambda_smooth;
  cfg.target_cost = a.target_cost;
  cfg.seed = c.seed;
  const double dt = c.dt_ns * 1e-9;

  std::optional<SystemSpec> sys;
  std::optional<ConstraintSet> constraints;
  std::optional<ControlModel> model;
  double duration_us = a.duration_us;
  if (a.kind == "cz") {
    sys = profile.subsystem(gate_modes, {"QC"}).with_cavity_dim(truncation_or(c, 6));
    constraints = cz_constraints(sys->dims()).restricted(cz_subspace_indices(sys->dims()));
    model = ControlModel::sectors(block_decompose(*sys));
    if (duration_us <= 0) duration_us = 1.0;
  } else if (a.kind == "hadamard") {
    sys = profile.subsystem(gate_modes, {"QC", "S2"}).with_cavity_dim(truncation_or(c, 6));
    constraints = hadamard_constraints(sys->dims());
    model = ControlModel::dense(build_static(*sys), build_drive_ops(*sys));
    if (duration_us <= 0) duration_us = 1.0;
  } else if (a.kind == "encode" || a.kind == "decode") {
    const bool encode = a.kind == "encode";
    if (a.reduced) {
      sys = profile.subsystem({"Q1", "S1"}, {"Q1", "S1"}).with_cavity_dim(truncation_or(c, 8));
      if (!encode) throw SchemaError("reduced", "--reduced applies to encode only");
      constraints = single_encode_constraints(sys->dims());
    } else {
      sys = profile.subsystem(encode_modes, encode_modes).with_cavity_dim(truncation_or(c, 8));
      constraints = encode ? encode_constraints(sys->dims()) : decode_constraints(sys->dims());
    }
    model = ControlModel::dense(build_static(*sys), build_drive_ops(*sys));
    if (duration_us <= 0) duration_us = 3.0;
  } else {
    throw SchemaError("optimize", "unknown target " + a.kind);
  }

  const auto n_steps = static_cast<std::size_t>(std::llround(duration_us * 1e-6 / dt));
  const PulseSet init = initial_pulses(drive_labels(*sys), n_steps, dt, cfg);
  const GrapeResult res = optimize(cfg, *constraints, *model, init);

  ExperimentReport rep;
  rep.experiment = "optimize_" + a.kind + (a.reduced ? "_reduced" : "");
  rep.config = {{"system", c.system},       {"dims", [&] {
                                               std::ostringstream s;
                                               for (std::size_t i = 0; i < sys->dims().size(); ++i)
                                                 s << (i ? "x" : "") << sys->dims()[i];
                                               return s.str();
                                             }()},
                {"duration_us", std::to_string(duration_us)}, {"dt_ns", std::to_string(c.dt_ns)},
                {"seed", std::to_string(c.seed)},            {"method", a.method},
                {"constraints", std::to_string(constraints->size())}};
  rep.scalars = {{"final_cost", res.history.back()},
                 {"mean_constraint_fidelity", mean_fidelity(res.fidelities)},
                 {"iterations", static_cast<double>(res.iterations)},
                 {"evaluations", static_cast<double>(res.evaluations)}};
  std::filesystem::create_directories(c.out);
  const auto pulse_path = (std::filesystem::path(c.out) / (a.kind + "_pulses.csv")).string();
  write_pulses_file(pulse_path, res.pulses);
  rep.files.push_back(pulse_path);
  const auto hist_path = (std::filesystem::path(c.out) / (a.kind + "_history.csv")).string();
  {
    std::ofstream h(hist_path);
    h << "iteration,cost\n";
    char buf[64];
    for (std::size_t i = 0; i < res.history.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, res.history[i]);
      h << buf;
    }
  }
  rep.files.push_back(hist_path);
  rep.config.emplace_back("stop_reason", std::string(to_string(res.reason)));
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rep.write(c.out);
  print_report(rep);
  return 0;
}

struct PipelineArgs {
  bool ideal = false;
  std::string gate = "cz";
  std::string channels = "none";
  std::optional<double> s2_t2_us;
  std::vector<double> durations_us;
  std::string shape = "gaussian";
  double extent = 2.5;
  double step = 0.1;
  std::string state = "vacuum";
};

int run_qpt_cmd(const Common& c, const PipelineArgs& a) {
  const SystemSpec sys = load_system_from(c.system).with_cavity_dim(truncation_or(c, 8));
  QptOptions o;
  if (a.gate != "cz" && a.gate != "identity") throw SchemaError("gate", "expected identity or cz");
  o.gate = a.gate == "cz" ? QptGate::cz : QptGate::identity;
  o.channels = parse_channels(a.channels, sys);
  o.postselect = c.postselect;
  o.out_dir = c.out;
  auto stage = [&](const std::string& name, const std::vector<std::string>& modes, Stage (*ideal)(const SystemSpec&)) {
    return a.ideal ? ideal(sys) : Stage::driven(name, modes, stage_pulses(c, name));
  };
  const Stage enc = stage("encode", encode_modes, ideal_encode);
  const Stage dec = stage("decode", encode_modes, ideal_decode);
  std::optional<Stage> cz;
  if (o.gate == QptGate::cz) cz = stage("cz", gate_modes, ideal_cz);
  print_report(run_qpt(sys, enc, dec, cz, o));
  return 0;
}

int run_budget_cmd(const Common& c, const PipelineArgs& a) {
  const SystemSpec sys = load_system_from(c.system);
  BudgetOptions o;
  o.truncation = truncation_or(c, 6);
  if (a.s2_t2_us) o.s2_t2 = *a.s2_t2_us * 1e-6;
  o.out_dir = c.out;
  ExperimentReport rep;
  run_error_budget(sys, stage_pulses(c, "cz"), o, &rep);
  print_report(rep);
  return 0;
}

int run_bell_cmd(const Common& c, const PipelineArgs& a) {
  const SystemSpec sys = load_system_from(c.system).with_cavity_dim(truncation_or(c, 8));
  BellOptions o;
  o.channels = parse_channels(a.channels, sys);
  o.wigner_extent = a.extent;
  o.wigner_step = a.step;
  o.out_dir = c.out;
  auto stage = [&](const std::string& name, const std::vector<std::string>& modes, Stage (*ideal)(const SystemSpec&)) {
    return a.ideal ? ideal(sys) : Stage::driven(name, modes, stage_pulses(c, name));
  };
  const auto res = run_bell(sys, stage("encode", encode_modes, ideal_encode), stage("cz", gate_modes, ideal_cz),
                            stage("hadamard", gate_modes, ideal_hadamard), o);
  print_report(res.report);
  return 0;
}

int run_sweep_cmd(const Common& c, const PipelineArgs& a) {
  const SystemSpec sys = load_system_from(c.system);
  BaselineOptions o;
  o.truncation = truncation_or(c, 6);
  if (a.shape != "gaussian" && a.shape != "square") throw SchemaError("shape", "expected gaussian or square");
  o.shape = a.shape == "gaussian" ? PulseShape::gaussian : PulseShape::square;
  o.out_dir = c.out;
  std::vector<double> durations = default_baseline_durations();
  if (!a.durations_us.empty()) {
    durations.clear();
    for (double d : a.durations_us) durations.push_back(d * 1e-6);
  }
  ExperimentReport rep;
  run_baseline_sweep(sys, durations, o, &rep);
  print_report(rep);
  return 0;
}

// Single-mode Wigner function of a named state: vacuum, fock:N or a logical
// label (g, e, +, -, +i, -i).
int run_wigner_cmd(const Common& c, const PipelineArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t dim = truncation_or(c, 25);
  StateVector psi = fock_state(dim, 0);
  if (a.state.rfind("fock:", 0) == 0) {
    psi = fock_state(dim, std::stoul(a.state.substr(5)));
  } else if (a.state != "vacuum") {
    psi = logical_state(parse_logical_label(a.state), dim);
  }
  const auto pts = square_grid(a.extent, a.step);
  const auto grid = wigner_single(psi.amplitudes() * psi.amplitudes().adjoint(), pts, "S");
  double sum = 0.0;
  for (double w : grid.values) sum += w * a.step * a.step;
  ExperimentReport rep;
  rep.experiment = "wigner";
  rep.config = {{"state", a.state}, {"dim", std::to_string(dim)}};
  rep.scalars = {{"W(0)", wigner_single(psi.amplitudes() * psi.amplitudes().adjoint(), {0.0}).values[0]},
                 {"grid_integral", sum}};
  std::filesystem::create_directories(c.out);
  const auto path = (std::filesystem::path(c.out) / "wigner.csv").string();
  std::ofstream out(path);
  write_wigner_csv(out, grid);
  rep.files.push_back(path);
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rep.write(c.out);
  print_report(rep);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bincz: binomial-code CZ gate design and characterization"};
  app.require_subcommand(1);
  Common common;
  OptimizeArgs opt;
  PipelineArgs pipe;

  auto* optimize = app.add_subcommand("optimize", "GRAPE-optimize cz, encode, decode or hadamard pulses");
  add_common(optimize, common);
  optimize->add_option("target", opt.kind, "cz | encode | decode | hadamard")
      ->required()
      ->check(CLI::IsMember({"cz", "encode", "decode", "hadamard"}));
  optimize->add_option("--duration-us", opt.duration_us, "Pulse duration (default 1 for cz/hadamard, 3 for encode/decode)");
  optimize->add_option("--iters", opt.iters, "Maximum iterations");
  optimize->add_option("--method", opt.method, "plain | momentum | lbfgs");
  optimize->add_option("--amp-max-mhz", opt.amp_max_mhz, "Amplitude bound in MHz");
  optimize->add_option("--lambda-amp", opt.lambda_amp, "Amplitude penalty weight");
  optimize->add_option("--lambda-smooth", opt.lambda_smooth, "Smoothness penalty weight");
  optimize->add_option("--target-cost", opt.target_cost, "Stop once the cost reaches this value");
  optimize->add_flag("--reduced", opt.reduced, "Encode on (Q1, S1) only, 6 conditions");

  auto* qpt = app.add_subcommand("qpt", "Process tomography of encode/decode and encode-CZ-decode");
  add_common(qpt, common);
  qpt->add_option("--gate", pipe.gate, "identity | cz");
  qpt->add_flag("--ideal", pipe.ideal, "Inject ideal unitaries instead of pulses");
  qpt->add_option("--channels", pipe.channels, "none | all | LABEL:T1T2,...");

  auto* budget = app.add_subcommand("error-budget", "Per-channel infidelity of the CZ pulses");
  add_common(budget, common);
  budget->add_option("--s2-t2-us", pipe.s2_t2_us, "Override T2 of S2 in microseconds");

  auto* bell = app.add_subcommand("bell", "Bell-state preparation with joint Wigner cross-sections");
  add_common(bell, common);
  bell->add_flag("--ideal", pipe.ideal, "Inject ideal unitaries instead of pulses");
  bell->add_option("--channels", pipe.channels, "none | all | LABEL:T1T2,...");
  bell->add_option("--extent", pipe.extent, "Largest |Re β|, |Im β|");
  bell->add_option("--step", pipe.step, "Grid spacing");

  auto* sweep = app.add_subcommand("baseline-sweep", "Selective-gate infidelity versus duration");
  add_common(sweep, common);
  sweep->add_option("--durations-us", pipe.durations_us, "Durations in microseconds");
  sweep->add_option("--shape", pipe.shape, "gaussian | square");

  auto* wigner = app.add_subcommand("wigner", "Single-mode Wigner function of a named state");
  add_common(wigner, common);
  wigner->add_option("--state", pipe.state, "vacuum | fock:N | g | e | + | - | +i | -i");
  wigner->add_option("--extent", pipe.extent, "Largest |Re β|, |Im β|");
  wigner->add_option("--step", pipe.step, "Grid spacing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_config;
  }

  set_warning_handler([](const std::string& m) { std::cerr << "warning: " << m << "\n"; });
  try {
    if (*optimize) return run_optimize(common, opt);
    if (*qpt) return run_qpt_cmd(common, pipe);
    if (*budget) return run_budget_cmd(common, pipe);
    if (*bell) return run_bell_cmd(common, pipe);
    if (*sweep) return run_sweep_cmd(common, pipe);
    if (*wigner) return run_wigner_cmd(common, pipe);
  } catch (const SchemaError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const DimensionError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return exit_numerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

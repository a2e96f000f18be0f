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

#include "bincz/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "bincz/errors.hpp"

namespace bincz {

using Eigen::Index;
using Eigen::Matrix4cd;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

Index idx(std::size_t i) { return static_cast<Index>(i); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string join_dims(const Dims& dims) {
  std::ostringstream s;
  for (std::size_t i = 0; i < dims.size(); ++i) s << (i ? "x" : "") << dims[i];
  return s.str();
}

std::string describe(const ErrorChannelSet& channels) {
  std::ostringstream s;
  bool first = true;
  for (const auto& [label, t] : channels.toggles()) {
    if (!t.relaxation && !t.dephasing) continue;
    s << (first ? "" : " ") << label << ":" << (t.relaxation ? "T1" : "") << (t.dephasing ? "T2" : "");
    first = false;
  }
  return first ? "none" : s.str();
}

std::filesystem::path ensure_dir(const std::string& dir) {
  std::filesystem::create_directories(dir);
  return std::filesystem::path(dir);
}

template <typename Writer>
void emit(ExperimentReport& report, const std::string& dir, const std::string& name, Writer&& write) {
  if (dir.empty()) return;
  const auto path = ensure_dir(dir) / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write(out);
  report.files.push_back(path.string());
}

// Basis state with the given Fock/qubit level per mode, in system order.
StateVector product_state(const SystemSpec& system, const std::vector<std::pair<std::string, std::size_t>>& levels) {
  std::vector<StateVector> factors;
  for (const auto& m : system.modes()) {
    std::size_t n = 0;
    for (const auto& [label, level] : levels)
      if (label == m.label) n = level;
    factors.push_back(fock_state(m.dim, n));
  }
  return tensor(factors);
}

Matrix4cd logical_cz4() {
  Matrix4cd u = Matrix4cd::Identity();
  u(3, 3) = -1.0;
  return u;
}

}  // namespace

// ---------------------------------------------------------------------------
// ExperimentReport

double ExperimentReport::scalar(const std::string& name) const {
  for (const auto& [k, v] : scalars)
    if (k == name) return v;
  throw std::out_of_range("report has no scalar '" + name + "'");
}

std::string ExperimentReport::to_json() const {
  nlohmann::ordered_json j;
  j["experiment"] = experiment;
  j["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config) j["config"][k] = v;
  j["scalars"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : scalars) j["scalars"][k] = v;
  j["files"] = files;
  j["wall_seconds"] = wall_seconds;
  return j.dump(2);
}

void ExperimentReport::write(const std::string& dir) {
  const auto path = ensure_dir(dir) / "report.json";
  files.push_back(path.string());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json() << '\n';
}

// ---------------------------------------------------------------------------
// Stages

Stage Stage::ideal(std::string name, std::vector<std::string> modes, MatrixXcd u) {
  return Stage{std::move(name), std::move(modes), std::nullopt, std::move(u)};
}

Stage Stage::driven(std::string name, std::vector<std::string> modes, PulseSet pulses) {
  return Stage{std::move(name), std::move(modes), std::move(pulses), std::nullopt};
}

namespace {

Dims dims_of(const SystemSpec& system, const std::vector<std::string>& modes) {
  Dims d;
  for (const auto& m : modes) d.push_back(system.mode(m).dim);
  return d;
}

}  // namespace

Stage ideal_encode(const SystemSpec& system) {
  return Stage::ideal("encode", encode_modes, logical_encoder(dims_of(system, encode_modes)));
}

Stage ideal_decode(const SystemSpec& system) {
  return Stage::ideal("decode", encode_modes, logical_encoder(dims_of(system, encode_modes)).adjoint());
}

Stage ideal_cz(const SystemSpec& system) {
  return Stage::ideal("cz", gate_modes, logical_cz(dims_of(system, gate_modes)));
}

Stage ideal_hadamard(const SystemSpec& system) {
  return Stage::ideal("hadamard", gate_modes, logical_hadamard_s2(dims_of(system, gate_modes)));
}

StageSimulator::StageSimulator(SystemSpec system, ErrorChannelSet channels, LindbladOptions options)
    : system_(std::move(system)), channels_(std::move(channels)), options_(options) {
  channels_.validate(system_);
  static_diag_ = build_static(system_).matrix().diagonal();
}

namespace {

// Drive targets named by the pulse labels, in order of first appearance.
std::vector<std::string> pulse_targets(const PulseSet& p) {
  std::vector<std::string> targets;
  for (const auto& l : p.labels) {
    if (l.size() < 3 || (l.compare(l.size() - 2, 2, "_I") != 0 && l.compare(l.size() - 2, 2, "_Q") != 0)) {
      throw SchemaError("pulses", "label '" + l + "' does not end in _I or _Q");
    }
    const auto t = l.substr(0, l.size() - 2);
    if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
  }
  return targets;
}

// Rows of `p` reordered to `labels`; missing rows are an error.
PulseSet reorder(const PulseSet& p, const std::vector<std::string>& labels) {
  PulseSet out = PulseSet::zeros(labels, p.n_steps(), p.dt);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto it = std::find(p.labels.begin(), p.labels.end(), labels[i]);
    if (it == p.labels.end()) throw SchemaError("pulses", "missing control " + labels[i]);
    out.amplitudes.row(idx(i)) = p.amplitudes.row(it - p.labels.begin());
  }
  return out;
}

MatrixXcd block_diag(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd m = MatrixXcd::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  m.topLeftCorner(a.rows(), a.cols()) = a;
  m.bottomRightCorner(b.rows(), b.cols()) = b;
  return m;
}

}  // namespace

void StageSimulator::apply(const Stage& stage, std::vector<MatrixXcd>& rhos) const {
  const Dims dims = system_.dims();
  const auto n_full = idx(product(dims));
  for (const auto& r : rhos)
    if (r.rows() != n_full || r.cols() != n_full) throw DimensionError("stage " + stage.name + ": state dimension mismatch");
  if (stage.pulses.has_value() == stage.unitary.has_value()) {
    throw std::invalid_argument("stage " + stage.name + ": needs exactly one of pulses or unitary");
  }
  std::vector<std::size_t> mode_idx;
  for (const auto& m : stage.modes) mode_idx.push_back(system_.index_of(m));
  const ModeSplit split(dims, mode_idx);
  const auto ns = idx(split.sub_dim());
  const std::size_t n_rest = split.rest_dim();

  auto get_block = [&](const MatrixXcd& rho, std::size_t r, std::size_t rp) {
    MatrixXcd x(ns, ns);
    for (Index i = 0; i < ns; ++i)
      for (Index j = 0; j < ns; ++j)
        x(i, j) = rho(idx(split.full_index(std::size_t(i), r)), idx(split.full_index(std::size_t(j), rp)));
    return x;
  };
  auto put_block = [&](MatrixXcd& rho, std::size_t r, std::size_t rp, const MatrixXcd& x) {
    for (Index i = 0; i < ns; ++i)
      for (Index j = 0; j < ns; ++j)
        rho(idx(split.full_index(std::size_t(i), r)), idx(split.full_index(std::size_t(j), rp))) = x(i, j);
  };

  // Spectator configurations carrying population.
  std::vector<std::size_t> active;
  for (std::size_t r = 0; r < n_rest; ++r) {
    bool any = false;
    for (const auto& rho : rhos) {
      for (Index i = 0; i < ns && !any; ++i) any = rho(idx(split.full_index(std::size_t(i), r)), idx(split.full_index(std::size_t(i), r))) != cplx(0.0);
      if (any) break;
    }
    if (any) active.push_back(r);
  }

  std::vector<MatrixXcd> out(rhos.size(), MatrixXcd::Zero(n_full, n_full));

  if (stage.unitary) {
    const MatrixXcd& u = *stage.unitary;
    if (u.rows() != ns || u.cols() != ns) {
      throw DimensionError("stage " + stage.name + ": unitary does not match modes " + join_dims(split.sub_dims()));
    }
    for (std::size_t b = 0; b < rhos.size(); ++b)
      for (auto r : active)
        for (auto rp : active) put_block(out[b], r, rp, u * get_block(rhos[b], r, rp) * u.adjoint());
    rhos = std::move(out);
    return;
  }

  const SystemSpec sub = system_.subsystem(stage.modes, pulse_targets(*stage.pulses));
  const auto controls = build_drive_ops(sub);
  const PulseSet pulses = reorder(*stage.pulses, drive_labels(sub));
  ErrorChannelSet local;
  for (const auto& [label, t] : channels_.toggles())
    if (std::find(stage.modes.begin(), stage.modes.end(), label) != stage.modes.end())
      local.set(label, t.relaxation, t.dephasing);
  const auto collapse = collapse_ops(sub, local);

  auto h_static = [&](std::size_t r) {
    VectorXcd d(ns);
    for (Index i = 0; i < ns; ++i) d(i) = static_diag_(idx(split.full_index(std::size_t(i), r)));
    return MatrixXcd(d.asDiagonal());
  };

  if (collapse.empty()) {
    std::vector<MatrixXcd> us;
    for (auto r : active) us.push_back(propagator(Operator(sub.dims(), h_static(r), true), controls, pulses).matrix());
    for (std::size_t b = 0; b < rhos.size(); ++b)
      for (std::size_t i = 0; i < active.size(); ++i)
        for (std::size_t j = 0; j < active.size(); ++j)
          put_block(out[b], active[i], active[j], us[i] * get_block(rhos[b], active[i], active[j]) * us[j].adjoint());
    rhos = std::move(out);
    return;
  }

  for (std::size_t i = 0; i < active.size(); ++i) {
    for (std::size_t j = i; j < active.size(); ++j) {
      const auto r = active[i], rp = active[j];
      std::vector<MatrixXcd> xs;
      if (r == rp) {
        LindbladSolver solver(Operator(sub.dims(), h_static(r), true), controls, collapse, options_);
        for (const auto& rho : rhos) xs.push_back(get_block(rho, r, r));
        solver.evolve(xs, pulses);
        for (std::size_t b = 0; b < rhos.size(); ++b) put_block(out[b], r, r, xs[b]);
        continue;
      }
      // Off-diagonal spectator block: evolve [[0, X], [0, 0]] under
      // diag(H_r, H_r') with doubled controls and jumps.
      const Dims doubled{2 * split.sub_dim()};
      std::vector<Operator> c2, l2;
      for (const auto& c : controls) c2.emplace_back(doubled, block_diag(c.matrix(), c.matrix()), true);
      for (const auto& l : collapse) l2.emplace_back(doubled, block_diag(l.matrix(), l.matrix()));
      LindbladSolver solver(Operator(doubled, block_diag(h_static(r), h_static(rp)), true), c2, l2, options_);
      for (const auto& rho : rhos) {
        MatrixXcd big = MatrixXcd::Zero(2 * ns, 2 * ns);
        big.topRightCorner(ns, ns) = get_block(rho, r, rp);
        xs.push_back(std::move(big));
      }
      solver.evolve(xs, pulses);
      for (std::size_t b = 0; b < rhos.size(); ++b) {
        const MatrixXcd x = xs[b].topRightCorner(ns, ns);
        put_block(out[b], r, rp, x);
        put_block(out[b], rp, r, x.adjoint());
      }
    }
  }
  for (auto& o : out) o = 0.5 * (o + o.adjoint()).eval();
  rhos = std::move(out);
}

// ---------------------------------------------------------------------------
// QPT

namespace {

std::vector<MatrixXcd> qpt_inputs(const SystemSpec& system) {
  std::vector<VectorXcd> basis;
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) basis.push_back(product_state(system, {{"Q1", a}, {"Q2", b}}).amplitudes());
  std::vector<MatrixXcd> rhos;
  for (const auto& c : qpt_input_coefficients()) {
    VectorXcd psi = VectorXcd::Zero(basis.front().size());
    for (std::size_t k = 0; k < 4; ++k) psi += c(idx(k)) * basis[k];
    rhos.emplace_back(psi * psi.adjoint());
  }
  return rhos;
}

struct Readout {
  std::vector<Matrix4cd> outputs;
  double mean_success = 1.0;
};

Readout read_qubits(const SystemSpec& system, const std::vector<MatrixXcd>& rhos, bool postselect) {
  const Dims dims = system.dims();
  const std::vector<std::size_t> keep{system.index_of("Q1"), system.index_of("Q2")};
  const std::size_t coupler = system.index_of("QC");
  Readout r;
  double total = 0.0;
  for (const auto& rho : rhos) {
    MatrixXcd m = rho;
    if (postselect) {
      const auto ps = postselect_ground(DensityMatrix(dims, 0.5 * (rho + rho.adjoint()), 1e-6), coupler);
      m = ps.rho.matrix();
      total += ps.probability;
    }
    r.outputs.emplace_back(partial_trace(m, dims, keep));
  }
  if (postselect) r.mean_success = total / static_cast<double>(rhos.size());
  return r;
}

void echo_system(ExperimentReport& rep, const SystemSpec& system) {
  std::ostringstream labels;
  for (std::size_t i = 0; i < system.size(); ++i) labels << (i ? "," : "") << system.modes()[i].label;
  rep.config.emplace_back("modes", labels.str());
  rep.config.emplace_back("dims", join_dims(system.dims()));
}

std::string stage_kind(const Stage& s) {
  if (s.unitary) return "ideal";
  char buf[64];
  std::snprintf(buf, sizeof buf, "pulses %zu steps, dt %.6g ns", s.pulses->n_steps(), s.pulses->dt * 1e9);
  return buf;
}

}  // namespace

ExperimentReport run_qpt(const SystemSpec& system, const Stage& encode, const Stage& decode,
                         const std::optional<Stage>& cz, const QptOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  if (options.gate == QptGate::cz && !cz) throw SchemaError("pulses", "the CZ pipeline needs a cz stage");
  ExperimentReport rep;
  rep.experiment = options.gate == QptGate::cz ? "qpt_cz" : "qpt_identity";
  echo_system(rep, system);
  rep.config.emplace_back("encode", stage_kind(encode));
  rep.config.emplace_back("decode", stage_kind(decode));
  if (options.gate == QptGate::cz) rep.config.emplace_back("cz", stage_kind(*cz));
  rep.config.emplace_back("channels", describe(options.channels));
  rep.config.emplace_back("postselect", options.postselect ? "true" : "false");

  const StageSimulator sim(system, options.channels);
  std::vector<MatrixXcd> encoded = qpt_inputs(system);
  sim.apply(encode, encoded);

  std::vector<MatrixXcd> ref = encoded;
  sim.apply(decode, ref);
  const auto ref_out = read_qubits(system, ref, options.postselect);
  const auto r_ref = pauli_transfer(ref_out.outputs);
  const double f_ref = process_fidelity(r_ref, unitary_ptm(Matrix4cd::Identity()));
  rep.scalars.emplace_back("F_reference", f_ref);
  if (options.postselect) rep.scalars.emplace_back("success_probability_reference", ref_out.mean_success);
  emit(rep, options.out_dir, "ptm_reference.csv", [&](std::ostream& o) { write_ptm_csv(o, r_ref); });

  if (options.gate == QptGate::identity) {
    rep.scalars.emplace_back("F_full", f_ref);
  } else {
    std::vector<MatrixXcd> full = std::move(encoded);
    sim.apply(*cz, full);
    sim.apply(decode, full);
    const auto full_out = read_qubits(system, full, options.postselect);
    const auto r_full = pauli_transfer(full_out.outputs);
    const double f_full = process_fidelity(r_full, unitary_ptm(logical_cz4()));
    rep.scalars.emplace_back("F_full", f_full);
    rep.scalars.emplace_back("F_normalized", f_full / f_ref);
    if (options.postselect) rep.scalars.emplace_back("success_probability_full", full_out.mean_success);
    emit(rep, options.out_dir, "ptm_full.csv", [&](std::ostream& o) { write_ptm_csv(o, r_full); });
  }
  rep.wall_seconds = seconds_since(t0);
  if (!options.out_dir.empty()) rep.write(options.out_dir);
  return rep;
}

PauliTransferMatrix encoded_cz_ptm(const SystemSpec& gate_system, const Stage& cz, const ErrorChannelSet& channels,
                                   LindbladOptions options) {
  const Dims dims = gate_system.dims();
  if (dims.size() != 3) throw DimensionError("encoded_cz_ptm: expected the (S1, QC, S2) system");
  std::vector<VectorXcd> basis;
  for (auto a : {LogicalLabel::g, LogicalLabel::e})
    for (auto b : {LogicalLabel::g, LogicalLabel::e})
      basis.push_back(tensor({logical_state(a, dims[0]), fock_state(dims[1], 0), logical_state(b, dims[2])}).amplitudes());
  MatrixXcd bm(basis.front().size(), 4);
  for (Index k = 0; k < 4; ++k) bm.col(k) = basis[std::size_t(k)];
  std::vector<MatrixXcd> rhos;
  for (const auto& c : qpt_input_coefficients()) {
    const VectorXcd psi = bm * c;
    rhos.emplace_back(psi * psi.adjoint());
  }
  const StageSimulator sim(gate_system, channels, options);
  sim.apply(cz, rhos);
  std::vector<Matrix4cd> outputs;
  for (const auto& r : rhos) outputs.emplace_back(bm.adjoint() * r * bm);
  return pauli_transfer(outputs);
}

// ---------------------------------------------------------------------------
// Error budget

std::vector<BudgetRow> run_error_budget(const SystemSpec& system, const PulseSet& cz_pulses,
                                        const BudgetOptions& options, ExperimentReport* report) {
  const auto t0 = std::chrono::steady_clock::now();
  SystemSpec gate = system.subsystem(gate_modes, {"QC"}).with_cavity_dim(options.truncation);
  if (options.s2_t2) gate = gate.with_coherence("S2", gate.mode("S2").T1, *options.s2_t2);
  const Stage stage = Stage::driven("cz", gate_modes, cz_pulses);
  const auto ideal = unitary_ptm(logical_cz4());
  auto infidelity = [&](const ErrorChannelSet& ch) { return 1.0 - process_fidelity(encoded_cz_ptm(gate, stage, ch), ideal); };

  struct Channel {
    std::string label, mode;
    bool relaxation;
  };
  const std::vector<Channel> channels = {{"S1 relaxation", "S1", true}, {"S1 dephasing", "S1", false},
                                         {"S2 relaxation", "S2", true}, {"S2 dephasing", "S2", false},
                                         {"QC relaxation", "QC", true}, {"QC dephasing", "QC", false}};
  std::vector<BudgetRow> rows;
  const double control = infidelity(ErrorChannelSet::none());
  rows.push_back({"control infidelity", control, control});
  ErrorChannelSet cumulative;
  for (const auto& c : channels) {
    ErrorChannelSet single;
    single.set(c.mode, c.relaxation, !c.relaxation);
    const auto prev = cumulative.get(c.mode);
    cumulative.set(c.mode, prev.relaxation || c.relaxation, prev.dephasing || !c.relaxation);
    rows.push_back({c.label, infidelity(single), infidelity(cumulative)});
  }
  rows.push_back({"all channels", rows.back().cumulative, rows.back().cumulative});

  if (report) {
    ExperimentReport& rep = *report;
    rep = {};
    rep.experiment = "error_budget";
    echo_system(rep, gate);
    rep.config.emplace_back("cz", stage_kind(stage));
    if (options.s2_t2) rep.config.emplace_back("S2_T2_us", std::to_string(*options.s2_t2 * 1e6));
    for (const auto& r : rows) {
      rep.scalars.emplace_back("infidelity[" + r.label + "]", r.infidelity);
      rep.scalars.emplace_back("cumulative[" + r.label + "]", r.cumulative);
    }
    rep.scalars.emplace_back("all_on_fidelity", 1.0 - rows.back().infidelity);
    emit(rep, options.out_dir, "error_budget.csv", [&](std::ostream& o) {
      o << "channel,infidelity,cumulative\n";
      char buf[160];
      for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g\n", r.label.c_str(), r.infidelity, r.cumulative);
        o << buf;
      }
    });
    rep.wall_seconds = seconds_since(t0);
    if (!options.out_dir.empty()) rep.write(options.out_dir);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Bell state

BellResult run_bell(const SystemSpec& system, const Stage& encode, const Stage& cz, const Stage& hadamard,
                    const BellOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  BellResult res;
  ExperimentReport& rep = res.report;
  rep.experiment = "bell";
  echo_system(rep, system);
  rep.config.emplace_back("encode", stage_kind(encode));
  rep.config.emplace_back("cz", stage_kind(cz));
  rep.config.emplace_back("hadamard", stage_kind(hadamard));
  rep.config.emplace_back("channels", describe(options.channels));

  const Dims dims = system.dims();
  const std::vector<std::size_t> cavities{system.index_of("S1"), system.index_of("S2")};
  const Dims cav_dims{dims[cavities[0]], dims[cavities[1]]};

  VectorXcd psi = VectorXcd::Zero(idx(product(dims)));
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) psi += 0.5 * product_state(system, {{"Q1", a}, {"Q2", b}}).amplitudes();
  std::vector<MatrixXcd> rho{psi * psi.adjoint()};

  const StageSimulator sim(system, options.channels);
  const auto sweep = square_grid(options.wigner_extent, options.wigner_step);
  std::vector<double> axis;
  const auto n_axis = static_cast<long>(std::floor(options.wigner_extent / options.wigner_step + 1e-9));
  for (long k = -n_axis; k <= n_axis; ++k) axis.push_back(double(k) * options.wigner_step);

  const VectorXcd plus_plus =
      tensor(logical_state(LogicalLabel::plus, cav_dims[0]), logical_state(LogicalLabel::plus, cav_dims[1])).amplitudes();
  const VectorXcd bell = (tensor(logical_state(LogicalLabel::g, cav_dims[0]), logical_state(LogicalLabel::e, cav_dims[1])) +
                          tensor(logical_state(LogicalLabel::e, cav_dims[0]), logical_state(LogicalLabel::g, cav_dims[1])))
                             .normalized()
                             .amplitudes();

  for (const Stage* s : {&encode, &cz, &hadamard}) {
    sim.apply(*s, rho);
    const MatrixXcd cav = partial_trace(rho[0], dims, cavities);
    auto cuts = wigner_cross_sections(cav, cav_dims, sweep, options.fixed_beta, axis);
    const std::pair<const char*, const WignerGrid*> parts[] = {{"sweep_b1", &cuts.sweep_beta1},
                                                               {"sweep_b2", &cuts.sweep_beta2},
                                                               {"real_cut", &cuts.real_cut},
                                                               {"imag_cut", &cuts.imag_cut}};
    for (const auto& [tag, grid] : parts) {
      emit(rep, options.out_dir, "wigner_" + s->name + "_" + tag + ".csv",
           [&](std::ostream& o) { write_wigner_csv(o, *grid); });
    }
    res.wigner.push_back(std::move(cuts));
    if (s == &encode) rep.scalars.emplace_back("product_fidelity_after_encode", plus_plus.dot(cav * plus_plus).real());
    if (s == &hadamard) res.bell_fidelity = bell.dot(cav * bell).real();
  }
  rep.scalars.emplace_back("bell_fidelity", res.bell_fidelity);
  rep.wall_seconds = seconds_since(t0);
  if (!options.out_dir.empty()) rep.write(options.out_dir);
  return res;
}

// ---------------------------------------------------------------------------
// Baseline sweep

std::vector<double> default_baseline_durations() { return {0.25e-6, 0.5e-6, 1e-6, 2e-6, 5e-6, 10e-6, 20e-6}; }

std::vector<BaselinePoint> run_baseline_sweep(const SystemSpec& system, const std::vector<double>& durations,
                                              const BaselineOptions& options, ExperimentReport* report) {
  const auto t0 = std::chrono::steady_clock::now();
  const SystemSpec gate = system.subsystem(gate_modes, {"QC"}).with_cavity_dim(options.truncation);
  const auto blocks = block_decompose(gate);
  const Operator h0 = build_static(gate);
  const auto controls = build_drive_ops(gate);
  const auto collapse = collapse_ops(gate, ErrorChannelSet::all(gate));
  const LindbladSolver solver(h0, controls, collapse);
  const auto constraints = cz_constraints(gate.dims());
  const auto model = ControlModel::sectors(blocks);
  const auto sub = cz_subspace_indices(gate.dims());
  const auto restricted = constraints.restricted(sub);

  std::vector<BaselinePoint> points;
  for (double duration : durations) {
    if (!(duration > 0)) throw std::invalid_argument("run_baseline_sweep: durations must be positive");
    const double dt = std::min(2e-9, duration / 100.0);
    const PulseSet p = selective_baseline(blocks, 2, 2, options.shape, duration, dt, drive_labels(gate));
    const double t = p.duration();
    // Targets follow the static evolution so only gate errors count.
    const VectorXcd free_phase = (cplx(0.0, -t) * h0.matrix().diagonal()).array().exp();

    const MatrixXcd u = propagator(model, p);
    double f_unitary = 0.0;
    for (std::size_t k = 0; k < restricted.size(); ++k) {
      const VectorXcd& in = restricted.pairs()[k].initial.amplitudes();
      VectorXcd target = restricted.pairs()[k].target.amplitudes();
      for (std::size_t i = 0; i < sub.size(); ++i) target(idx(i)) *= free_phase(idx(sub[i]));
      f_unitary += std::norm(target.dot(u * in));
    }
    f_unitary /= static_cast<double>(restricted.size());

    std::vector<MatrixXcd> xs;
    for (const auto& c : constraints.pairs()) xs.emplace_back(c.initial.amplitudes() * c.initial.amplitudes().adjoint());
    solver.evolve(xs, p);
    double f_lindblad = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      const VectorXcd target = free_phase.cwiseProduct(constraints.pairs()[k].target.amplitudes());
      f_lindblad += target.dot(xs[k] * target).real();
    }
    f_lindblad /= static_cast<double>(xs.size());
    points.push_back({t, dt, 1.0 - f_unitary, 1.0 - f_lindblad});
  }

  if (report) {
    ExperimentReport& rep = *report;
    rep = {};
    rep.experiment = "baseline_sweep";
    echo_system(rep, gate);
    rep.config.emplace_back("shape", options.shape == PulseShape::gaussian ? "gaussian" : "square");
    for (const auto& pt : points) {
      char key[64];
      std::snprintf(key, sizeof key, "%.6g", pt.duration * 1e6);
      rep.scalars.emplace_back(std::string("unitary_infidelity[") + key + "us]", pt.unitary_infidelity);
      rep.scalars.emplace_back(std::string("lindblad_infidelity[") + key + "us]", pt.lindblad_infidelity);
    }
    emit(rep, options.out_dir, "baseline_sweep.csv", [&](std::ostream& o) {
      o << "duration_us,dt_ns,unitary_infidelity,lindblad_infidelity\n";
      char buf[160];
      for (const auto& pt : points) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", pt.duration * 1e6, pt.dt * 1e9,
                      pt.unitary_infidelity, pt.lindblad_infidelity);
        o << buf;
      }
    });
    rep.wall_seconds = seconds_since(t0);
    if (!options.out_dir.empty()) rep.write(options.out_dir);
  }
  return points;
}

}  // namespace bincz

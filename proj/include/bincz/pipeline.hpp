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

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bincz/dynamics.hpp"
#include "bincz/grape.hpp"
#include "bincz/hamiltonian.hpp"
#include "bincz/tomography.hpp"

namespace bincz {

/// Scalars, config echo and emitted files of one experiment run.
struct ExperimentReport {
  std::string experiment;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::pair<std::string, double>> scalars;
  std::vector<std::string> files;
  double wall_seconds = 0.0;

  /// Throws std::out_of_range for unknown names.
  double scalar(const std::string& name) const;
  std::string to_json() const;
  /// Writes report.json into `dir` (appending it to `files`).
  void write(const std::string& dir);
};

/// One pipeline stage acting on `modes` (in that order). Either an ideal
/// unitary on those modes or pulses on drive targets among them; pulse labels
/// name the targets ("QC_I", "QC_Q", ...).
struct Stage {
  std::string name;
  std::vector<std::string> modes;
  std::optional<PulseSet> pulses;
  std::optional<Eigen::MatrixXcd> unitary;

  static Stage ideal(std::string name, std::vector<std::string> modes, Eigen::MatrixXcd u);
  static Stage driven(std::string name, std::vector<std::string> modes, PulseSet pulses);
};

/// Modes of the standard stages.
inline const std::vector<std::string> encode_modes = {"Q1", "S1", "S2", "Q2"};
inline const std::vector<std::string> gate_modes = {"S1", "QC", "S2"};

/// Ideal stages for `system` (mode labels Q1, S1, QC, S2, Q2).
Stage ideal_encode(const SystemSpec& system);
Stage ideal_decode(const SystemSpec& system);
Stage ideal_cz(const SystemSpec& system);
Stage ideal_hadamard(const SystemSpec& system);

/// Pushes density matrices on the full system through stages. Modes outside
/// a stage are spectators: their static couplings to the stage modes are kept
/// exactly by evolving each block of spectator basis states separately, and
/// they carry no decoherence. Ideal unitaries ignore spectators.
class StageSimulator {
 public:
  StageSimulator(SystemSpec system, ErrorChannelSet channels = ErrorChannelSet::none(),
                 LindbladOptions options = {});
  const SystemSpec& system() const { return system_; }
  void apply(const Stage& stage, std::vector<Eigen::MatrixXcd>& rhos) const;

 private:
  SystemSpec system_;
  ErrorChannelSet channels_;
  LindbladOptions options_;
  Eigen::VectorXcd static_diag_;
};

enum class QptGate { identity, cz };

struct QptOptions {
  QptGate gate = QptGate::cz;
  ErrorChannelSet channels;
  bool postselect = false;
  /// Empty: no files are written.
  std::string out_dir;
};

/// QPT of encode → (CZ) → decode on the decoded qubits Q1, Q2. Reports
/// F_reference (encode/decode), and for the CZ also F_full and the normalized
/// F_full / F_reference. With postselection the coupler is projected onto |g>
/// before the qubits are read and the mean success probability is reported.
ExperimentReport run_qpt(const SystemSpec& system, const Stage& encode, const Stage& decode,
                         const std::optional<Stage>& cz, const QptOptions& options);

/// PTM of a CZ stage on the encoded space |m_L, g, n_L> of (S1, QC, S2).
PauliTransferMatrix encoded_cz_ptm(const SystemSpec& gate_system, const Stage& cz, const ErrorChannelSet& channels,
                                   LindbladOptions options = {});

struct BudgetRow {
  std::string label;
  /// Process infidelity with only this channel enabled.
  double infidelity = 0.0;
  /// Process infidelity with this and every earlier channel enabled.
  double cumulative = 0.0;
};

struct BudgetOptions {
  /// Cavity truncation of the (S1, QC, S2) simulation.
  std::size_t truncation = 6;
  /// Replaces T2 of S2 when set (T1 kept).
  std::optional<double> s2_t2;
  std::string out_dir;
};

/// Rows: control infidelity, S1 relaxation, S1 dephasing, S2 relaxation,
/// S2 dephasing, QC relaxation, QC dephasing, all channels.
std::vector<BudgetRow> run_error_budget(const SystemSpec& system, const PulseSet& cz_pulses,
                                        const BudgetOptions& options, ExperimentReport* report = nullptr);

struct BellOptions {
  ErrorChannelSet channels;
  double wigner_extent = 2.5;
  double wigner_step = 0.1;
  /// β held fixed on the other cavity in the swept cross-sections.
  cplx fixed_beta = 0.0;
  std::string out_dir;
};

struct BellResult {
  ExperimentReport report;
  /// Cross-sections after encode, CZ and Hadamard.
  std::vector<WignerCuts> wigner;
  double bell_fidelity = 0.0;
};

/// Encodes |+_L +_L>, applies CZ then the S2 Hadamard, and reports the
/// fidelity to (|0_L 1_L> + |1_L 0_L>)/√2 of the reduced cavity state.
BellResult run_bell(const SystemSpec& system, const Stage& encode, const Stage& cz, const Stage& hadamard,
                    const BellOptions& options);

struct BaselinePoint {
  double duration = 0.0;
  double dt = 0.0;
  double unitary_infidelity = 0.0;
  double lindblad_infidelity = 0.0;
};

struct BaselineOptions {
  PulseShape shape = PulseShape::gaussian;
  std::size_t truncation = 6;
  std::string out_dir;
};

/// Selective (2,2)-sector baseline at each duration, dt = min(2 ns, T/100).
/// Infidelity is 1 − mean state fidelity over the 16 CZ pairs, with targets
/// carried through the static evolution exp(−i H0 T).
std::vector<BaselinePoint> run_baseline_sweep(const SystemSpec& system, const std::vector<double>& durations,
                                              const BaselineOptions& options, ExperimentReport* report = nullptr);

/// Default durations 0.25, 0.5, 1, 2, 5, 10 and 20 μs.
std::vector<double> default_baseline_durations();

}  // namespace bincz

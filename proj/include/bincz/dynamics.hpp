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

#include <cstddef>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bincz/hamiltonian.hpp"
#include "bincz/hilbert.hpp"

namespace bincz {

/// Piecewise-constant control amplitudes. Row j of `amplitudes` is control j
/// (rad/s), column k is step k; every step lasts `dt` seconds.
struct PulseSet {
  double dt = 0.0;
  std::vector<std::string> labels;
  Eigen::MatrixXd amplitudes;

  static PulseSet zeros(std::vector<std::string> labels, std::size_t n_steps, double dt);

  std::size_t n_steps() const { return static_cast<std::size_t>(amplitudes.cols()); }
  std::size_t n_controls() const { return static_cast<std::size_t>(amplitudes.rows()); }
  double duration() const { return dt * static_cast<double>(n_steps()); }
  double max_abs() const;

  /// dt > 0, finite amplitudes, one label per row, and |ε| <= amp_max when given.
  void validate(std::optional<double> amp_max = std::nullopt) const;
  /// `this` followed by `next` (same dt and labels).
  PulseSet concat(const PulseSet& next) const;
};

/// Pulse CSV: header "t_ns, <label>_I_MHz, <label>_Q_MHz, ...", one row per
/// step, t_ns the end time of the step, amplitudes in linear MHz.
void write_pulses(std::ostream& out, const PulseSet& pulses);
PulseSet read_pulses(std::istream& in);
void write_pulses_file(const std::string& path, const PulseSet& pulses);
PulseSet read_pulses_file(const std::string& path);

/// Hermitian, unit-trace, positive semidefinite matrix over `dims`.
class DensityMatrix {
 public:
  /// Validates all three properties to `tol` (eigenvalues >= −tol).
  DensityMatrix(Dims dims, Eigen::MatrixXcd matrix, double tol = 1e-10);
  static DensityMatrix pure(const StateVector& psi);

  const Dims& dims() const { return dims_; }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  std::size_t size() const { return static_cast<std::size_t>(matrix_.rows()); }
  /// <ψ|ρ|ψ>
  double fidelity(const StateVector& psi) const;

 private:
  Dims dims_;
  Eigen::MatrixXcd matrix_;
};

struct ChannelToggle {
  bool relaxation = false;
  bool dephasing = false;
};

/// Per-mode relaxation/dephasing switches. Modes not listed are noiseless.
class ErrorChannelSet {
 public:
  static ErrorChannelSet none() { return {}; }
  static ErrorChannelSet all(const SystemSpec& system);

  ErrorChannelSet& set(const std::string& label, bool relaxation, bool dephasing);
  ChannelToggle get(const std::string& label) const;
  bool empty() const;
  const std::map<std::string, ChannelToggle>& toggles() const { return toggles_; }
  /// Throws SchemaError when a toggled label is not a mode of `system`.
  void validate(const SystemSpec& system) const;

 private:
  std::map<std::string, ChannelToggle> toggles_;
};

/// Relaxation √(1/T1)·a (σ⁻ for qubits) and pure dephasing √(2/Tφ)·n̂
/// (√(1/(2Tφ))·σz for qubits), 1/Tφ = 1/T2 − 1/(2T1), embedded in the system.
std::vector<Operator> collapse_ops(const SystemSpec& system, const ErrorChannelSet& channels);

/// A Hamiltonian split into independent blocks. Each block lists the indices
/// it occupies in the model space, its static part and its control operators
/// restricted to those indices. A single block covering every index is the
/// plain dense model.
struct ModelBlock {
  std::vector<std::size_t> indices;
  Eigen::MatrixXcd h0;
  std::vector<Eigen::MatrixXcd> controls;
};

class ControlModel {
 public:
  ControlModel(std::size_t dim, std::size_t n_controls, std::vector<ModelBlock> blocks);

  /// Single dense block.
  static ControlModel dense(const Operator& h0, const std::vector<Operator>& controls);
  /// Dense model restricted to `indices` (exact only if the span is invariant).
  static ControlModel restricted(const Operator& h0, const std::vector<Operator>& controls,
                                 const std::vector<std::size_t>& indices);
  /// Nine coupler sectors on the 18-dim CZ subspace (see cz_subspace_indices).
  static ControlModel sectors(const BlockSystem& blocks);

  std::size_t dim() const { return dim_; }
  std::size_t n_controls() const { return n_controls_; }
  const std::vector<ModelBlock>& blocks() const { return blocks_; }

  /// Block Hamiltonian for one step.
  Eigen::MatrixXcd block_hamiltonian(std::size_t block, const Eigen::VectorXd& eps) const;

 private:
  std::size_t dim_;
  std::size_t n_controls_;
  std::vector<ModelBlock> blocks_;
};

/// U(T) = ∏ exp(−i(H0 + Σ ε_j[k] C_j) dt), later steps on the left.
Operator propagator(const Operator& h0, const std::vector<Operator>& controls, const PulseSet& pulses);
Eigen::MatrixXcd propagator(const ControlModel& model, const PulseSet& pulses);

/// Propagates the columns of `states`. When `trajectory` is non-null it
/// receives the states after every step (n_steps + 1 entries, including the
/// input).
Eigen::MatrixXcd propagate_states(const ControlModel& model, const PulseSet& pulses,
                                  const Eigen::MatrixXcd& states,
                                  std::vector<Eigen::MatrixXcd>* trajectory = nullptr);
StateVector propagate_state(const Operator& h0, const std::vector<Operator>& controls,
                            const PulseSet& pulses, const StateVector& psi0,
                            std::vector<StateVector>* trajectory = nullptr);

struct LindbladOptions {
  /// Upper bound on dt_sub·(‖H_offdiag‖ + Σ‖L†L‖) per substep.
  double max_phase = 0.02;
  /// Relative trace drift that aborts the integration.
  double trace_tolerance = 1e-6;
};

/// Master-equation propagator for piecewise-constant controls. The diagonal of
/// the effective Hamiltonian is integrated exactly (integrating factor) and the
/// remainder with classical RK4. Acts linearly on arbitrary square matrices so
/// off-diagonal blocks of a larger density matrix can be pushed through it.
class LindbladSolver {
 public:
  LindbladSolver(const Operator& h0, const std::vector<Operator>& controls,
                 const std::vector<Operator>& collapse, LindbladOptions options = {});

  /// Evolves every matrix in `xs` through `pulses`. Throws NumericalError on
  /// trace drift.
  void evolve(std::vector<Eigen::MatrixXcd>& xs, const PulseSet& pulses) const;
  std::size_t dim() const { return dim_; }

 private:
  struct Impl;
  std::size_t dim_;
  std::shared_ptr<const Impl> impl_;
};

DensityMatrix lindblad_evolve(const Operator& h0, const std::vector<Operator>& controls,
                              const PulseSet& pulses, const std::vector<Operator>& collapse,
                              const DensityMatrix& rho0, LindbladOptions options = {});

/// Largest elementwise |A − B|.
double max_abs_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

}  // namespace bincz

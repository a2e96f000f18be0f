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

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bincz/dynamics.hpp"
#include "bincz/hilbert.hpp"

namespace bincz {

// ---------------------------------------------------------------------------
// Pauli transfer matrices

/// R_ij = (1/d) Re Tr[P_i E(P_j)] in the normalized two-qubit Pauli basis
/// II, IX, IY, IZ, XI, ..., ZZ.
struct PauliTransferMatrix {
  std::size_t d = 4;
  Eigen::MatrixXd matrix;

  static const std::vector<std::string>& labels();
};

/// The 16 two-qubit Pauli operators in PTM order.
const std::vector<Eigen::Matrix4cd>& two_qubit_paulis();

/// Logical coefficients (4-vectors) of the 16 tomography inputs, products of
/// {g, e, +, +i} on each qubit, first qubit major.
std::vector<Eigen::Vector4cd> qpt_input_coefficients();

/// PTM from the 4×4 logical output matrices E(ρ_m) of the 16 qpt inputs.
PauliTransferMatrix pauli_transfer(const std::vector<Eigen::Matrix4cd>& outputs);

using Process = std::function<DensityMatrix(const DensityMatrix&)>;

/// PTM of `process`. Inputs are prepared in the span of `input_basis` (four
/// orthonormal states); outputs are read out in `output_basis` (defaults to
/// the input basis).
PauliTransferMatrix pauli_transfer(const Process& process, const std::vector<StateVector>& input_basis,
                                   const std::vector<StateVector>& output_basis = {});

/// R of ρ -> U ρ U† for a 4×4 unitary.
PauliTransferMatrix unitary_ptm(const Eigen::Matrix4cd& u);

/// F = (Tr(R_ideal^T R_exp) + d) / (d² + d).
double process_fidelity(const PauliTransferMatrix& r_exp, const PauliTransferMatrix& r_ideal);

void write_ptm_csv(std::ostream& out, const PauliTransferMatrix& r);

// ---------------------------------------------------------------------------
// Wigner functions

/// Sample points and values. Single-mode grids leave beta2 at zero.
struct WignerGrid {
  std::vector<std::string> modes;
  std::vector<cplx> beta1;
  std::vector<cplx> beta2;
  std::vector<double> values;
};

/// Square grid of points β = x + iy, |x|, |y| <= extent, spacing `step`.
std::vector<cplx> square_grid(double extent, double step);

/// Top-left dim×dim block of D(β) Π D(β)†, evaluated in a padded space large
/// enough that the block is converged.
class DisplacedParity {
 public:
  explicit DisplacedParity(std::size_t dim, double max_abs_beta = 4.0);
  Eigen::MatrixXcd operator()(cplx beta) const;
  /// Block of D(β) (I ± Π)/2 D(β)†.
  Eigen::MatrixXcd projector(cplx beta, bool even) const;
  std::size_t dim() const { return dim_; }
  std::size_t working_dim() const { return working_; }

 private:
  // First `dim` rows of D(β) in the working space.
  Eigen::MatrixXcd displaced_rows(cplx beta) const;
  std::size_t dim_;
  std::size_t working_;
  double max_abs_beta_;
  Eigen::MatrixXcd vectors_;
  Eigen::VectorXd values_;
};

/// W(β) = (2/π) Tr[ρ D Π D†].
WignerGrid wigner_single(const Eigen::MatrixXcd& rho, const std::vector<cplx>& points,
                         const std::string& mode = "S");
/// W(β1, β2) = (4/π²) Tr[ρ (D1 Π1 D1†) ⊗ (D2 Π2 D2†)] at the paired points.
WignerGrid wigner_joint(const Eigen::MatrixXcd& rho, const Dims& dims, const std::vector<cplx>& beta1,
                        const std::vector<cplx>& beta2,
                        const std::vector<std::string>& modes = {"S1", "S2"});

/// Cross-sections: β2 = fixed with β1 swept over `sweep`, β1 = fixed with β2
/// swept, and the real/imaginary diagonal cuts β1 = β2 = x and β1 = β2 = ix.
struct WignerCuts {
  WignerGrid sweep_beta1;
  WignerGrid sweep_beta2;
  WignerGrid real_cut;
  WignerGrid imag_cut;
};
WignerCuts wigner_cross_sections(const Eigen::MatrixXcd& rho, const Dims& dims, const std::vector<cplx>& sweep,
                                 cplx fixed, const std::vector<double>& axis,
                                 const std::vector<std::string>& modes = {"S1", "S2"});

/// Columns re_b1, im_b1, re_b2, im_b2, W.
void write_wigner_csv(std::ostream& out, const WignerGrid& grid);

// ---------------------------------------------------------------------------
// Readout

/// Column-stochastic 4×4 matrix: rows measured {gg, ge, eg, ee}, columns
/// prepared.
class BayesMatrix {
 public:
  explicit BayesMatrix(const Eigen::Matrix4d& m);
  static BayesMatrix identity() { return BayesMatrix(Eigen::Matrix4d::Identity()); }
  /// Independent symmetric misassignment `error` on each qubit.
  static BayesMatrix symmetric(double error = 0.02);

  const Eigen::Matrix4d& matrix() const { return m_; }
  double condition_number() const;

 private:
  Eigen::Matrix4d m_;
};

void write_bayes_csv(std::ostream& out, const BayesMatrix& b);
BayesMatrix read_bayes_csv(std::istream& in);

inline const std::array<std::string, 4> outcome_labels = {"gg", "ge", "eg", "ee"};

/// Four-outcome measurement: POVM elements in outcome order gg, ge, eg, ee.
struct MeasurementSetting {
  std::string name;
  std::array<Eigen::MatrixXcd, 4> povm;
};

/// Joint displaced-parity measurement on two cavities: ancilla j reports g
/// for even displaced parity of cavity j.
MeasurementSetting displaced_parity_setting(const Dims& dims, cplx beta1, cplx beta2);
/// Projective measurement of qubit 1 along `a` and qubit 2 along `b`
/// ('X', 'Y' or 'Z'); g is the +1 eigenvector.
MeasurementSetting pauli_setting(char a, char b);
/// The nine Pauli settings XX, XY, ..., ZZ.
std::vector<MeasurementSetting> pauli_settings();

/// Exact outcome probabilities Tr[ρ E_o].
Eigen::Vector4d outcome_probabilities(const Eigen::MatrixXcd& rho, const MeasurementSetting& setting);

/// Multinomial counts of the Bayes-corrupted outcome distribution.
std::array<std::int64_t, 4> emulate_outcomes(const Eigen::MatrixXcd& rho, const MeasurementSetting& setting,
                                             std::int64_t shots, const BayesMatrix& bayes, std::uint64_t seed);

struct BayesCorrection {
  Eigen::Vector4d probabilities;
  double condition_number = 0.0;
  /// True when the unconstrained inverse left the simplex.
  bool constrained = false;
};

/// Solves B p = p_meas for p on the probability simplex (least squares when
/// the exact inverse is infeasible). Throws NumericalError if B is singular.
BayesCorrection bayes_correct(const Eigen::Vector4d& measured, const BayesMatrix& bayes);
BayesCorrection bayes_correct(const std::array<std::int64_t, 4>& counts, const BayesMatrix& bayes);

/// One measurement setting with (possibly fractional) outcome counts.
struct MeasurementRecord {
  std::vector<Eigen::MatrixXcd> povm;
  std::vector<double> counts;
};

struct MleOptions {
  std::size_t max_iters = 3000;
  double tolerance = 0.0;  // 0 runs until the line search stalls
};

struct MleResult {
  DensityMatrix rho;
  double log_likelihood = 0.0;
  std::size_t iterations = 0;
  bool stalled = false;
};

/// Maximum-likelihood state, ρ = T†T / Tr(T†T) with lower-triangular T started
/// at I/√d. Warns when the POVM elements are not informationally complete.
MleResult mle_reconstruct(const std::vector<MeasurementRecord>& records, const Dims& dims,
                          const MleOptions& options = {});

// ---------------------------------------------------------------------------
// Post-selection

struct PostSelection {
  DensityMatrix rho;
  double probability = 0.0;
};

/// Projects the qubit at `coupler` onto |g> and renormalizes.
PostSelection postselect_ground(const DensityMatrix& rho, std::size_t coupler);

}  // namespace bincz

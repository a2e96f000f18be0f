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

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bincz/dynamics.hpp"
#include "bincz/hamiltonian.hpp"
#include "bincz/hilbert.hpp"
#include "bincz/optim.hpp"
#include "bincz/units.hpp"

namespace bincz {

struct ConstraintPair {
  StateVector initial;
  StateVector target;
  double weight = 1.0;
};

/// Weighted (initial, target) pairs sharing one set of dims.
class ConstraintSet {
 public:
  ConstraintSet(std::string name, std::vector<ConstraintPair> pairs);

  const std::string& name() const { return name_; }
  const std::vector<ConstraintPair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  const Dims& dims() const { return pairs_.front().initial.dims(); }
  double total_weight() const;

  /// Same pairs expressed in the coordinates of `indices` (e.g. the 18-dim CZ
  /// subspace). Throws DimensionError if any state has weight outside.
  ConstraintSet restricted(const std::vector<std::size_t>& indices) const;
  /// Every target multiplied by `phase`.
  ConstraintSet with_target_phase(cplx phase) const;

  /// Initial states as columns, targets as columns, and the weight vector.
  Eigen::MatrixXcd initial_matrix() const;
  Eigen::MatrixXcd target_matrix() const;
  Eigen::VectorXd weights() const;

 private:
  std::string name_;
  std::vector<ConstraintPair> pairs_;
};

/// Labels used by the gate constraint families, one per cavity.
inline constexpr LogicalLabel gate_labels[] = {LogicalLabel::g, LogicalLabel::e, LogicalLabel::plus,
                                               LogicalLabel::minus_i};

/// Diagonal logical CZ on (S1, QC, S2): −1 where both cavities hold exactly
/// two photons, +1 elsewhere.
Eigen::MatrixXcd logical_cz(const Dims& dims);

/// Logical R_y(π/2) on the second cavity of (S1, QC, S2): |0_L> -> |+_L>,
/// |1_L> -> −|−_L>. Completed to a unitary outside the code space.
Eigen::MatrixXcd logical_hadamard_s2(const Dims& dims);

/// Logical encoder on (Q1, S1, S2, Q2): |a, 0, 0, b> -> |g, a_L, b_L, g>,
/// completed to a unitary.
Eigen::MatrixXcd logical_encoder(const Dims& dims);

/// 16 pairs |m_L, g, n_L> -> U_CZ |m_L, g, n_L>, m, n over gate_labels.
ConstraintSet cz_constraints(const Dims& dims);
/// 36 pairs |m, 0, 0, n> -> |g, m_L, n_L, g> over all six labels.
ConstraintSet encode_constraints(const Dims& dims);
/// The encode pairs with the arrows reversed.
ConstraintSet decode_constraints(const Dims& dims);
/// 16 pairs with the S2 label sent through R_y(π/2) plus the weighted Bell
/// pair CZ|+_L +_L> -> (|0_L 1_L> + |1_L 0_L>)/√2.
ConstraintSet hadamard_constraints(const Dims& dims, double bell_weight = 4.0);
/// Single-cavity encoder on (qubit, cavity): 6 pairs |m, 0> -> |g, m_L>.
ConstraintSet single_encode_constraints(const Dims& dims);

struct GrapeConfig {
  std::size_t max_iters = 500;
  Method method = Method::momentum;
  double step = 1.0;
  double momentum = 0.9;
  double convergence_tol = 1e-12;
  /// Stop once the cost drops to this value.
  double target_cost = 0.0;
  double amp_max = units::mhz_to_rad_per_s(10.0);
  double lambda_amp = 0.0;
  double lambda_smooth = 0.0;
  std::uint64_t seed = 1;
  /// Cap on memory used to cache per-step eigendecompositions.
  std::size_t cache_bytes = std::size_t{256} << 20;
};

struct CostGradient {
  double cost = 0.0;
  /// 1 − |Σ w⟨t|U|i⟩|² / (Σw)², the penalty-free part.
  double infidelity = 0.0;
  cplx overlap;
  Eigen::MatrixXd gradient;  // d cost / d ε, same shape as the amplitudes
};

/// C = 1 − |Σ_k w_k <t_k|U|i_k>|²/(Σw)² + λ_amp Σ ε² dt + λ_smooth Σ (Δε)²,
/// with the exact gradient from per-step eigendecompositions.
CostGradient cost_and_gradient(const PulseSet& pulses, const ConstraintSet& constraints, const ControlModel& model,
                               const GrapeConfig& config = {});
CostGradient cost_and_gradient(const PulseSet& pulses, const ConstraintSet& constraints, const Operator& h0,
                               const std::vector<Operator>& controls, const GrapeConfig& config = {});

/// |<t_k|U|i_k>|² per pair.
std::vector<double> constraint_fidelities(const PulseSet& pulses, const ConstraintSet& constraints,
                                          const ControlModel& model);
double mean_fidelity(const std::vector<double>& fidelities);

/// Low-pass filtered Gaussian noise with standard deviation 0.01·amp_max,
/// reproducible from config.seed.
PulseSet initial_pulses(const std::vector<std::string>& labels, std::size_t n_steps, double dt,
                        const GrapeConfig& config);

struct GrapeResult {
  PulseSet pulses;
  std::vector<double> history;
  StopReason reason = StopReason::max_iters;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  std::vector<double> fidelities;
  double wall_seconds = 0.0;
};

/// Minimizes the cost over ε/amp_max ∈ [−1, 1].
GrapeResult optimize(const GrapeConfig& config, const ConstraintSet& constraints, const ControlModel& model,
                     const PulseSet& initial);

enum class PulseShape { square, gaussian };

/// Single-tone coupler drive resonant with the sector (n_a, n_b) that performs
/// one full 2π rotation there. Gaussian envelopes use σ = T/6 and a 1-d root
/// solve for the peak amplitude; samples are taken at step midpoints and
/// compensated for zero-order hold.
PulseSet selective_baseline(const BlockSystem& blocks, int n_a, int n_b, PulseShape shape, double duration,
                            double dt, const std::vector<std::string>& labels = {"QC_I", "QC_Q"});

}  // namespace bincz

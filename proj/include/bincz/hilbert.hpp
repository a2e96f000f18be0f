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
#include <complex>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace bincz {

using cplx = std::complex<double>;
using Dims = std::vector<std::size_t>;

std::size_t product(const Dims& dims);

/// Dense pure state over an ordered list of truncated modes. The first mode
/// is the most significant tensor index.
class StateVector {
 public:
  StateVector(Dims dims, Eigen::VectorXcd amplitudes);

  const Dims& dims() const { return dims_; }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  std::size_t size() const { return static_cast<std::size_t>(amplitudes_.size()); }
  cplx operator[](std::size_t i) const { return amplitudes_(static_cast<Eigen::Index>(i)); }

  double norm() const { return amplitudes_.norm(); }
  StateVector normalized() const;
  /// <this|other>
  cplx inner(const StateVector& other) const;

  StateVector operator*(cplx s) const { return {dims_, amplitudes_ * s}; }
  StateVector operator+(const StateVector& other) const;
  StateVector operator-(const StateVector& other) const;

 private:
  Dims dims_;
  Eigen::VectorXcd amplitudes_;
};

/// Dense operator on ∏dims. When `hermitian` is set the constructor verifies
/// max|M - M†| < 1e-12 (relative to the largest entry when that exceeds 1).
class Operator {
 public:
  Operator(Dims dims, Eigen::MatrixXcd matrix, bool hermitian = false);

  const Dims& dims() const { return dims_; }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  bool hermitian() const { return hermitian_; }
  std::size_t size() const { return static_cast<std::size_t>(matrix_.rows()); }

  StateVector apply(const StateVector& psi) const;
  Operator adjoint() const;
  Operator operator*(const Operator& other) const;
  Operator operator+(const Operator& other) const;
  Operator operator*(cplx s) const;

 private:
  Dims dims_;
  Eigen::MatrixXcd matrix_;
  bool hermitian_;
};

StateVector tensor(const StateVector& a, const StateVector& b);
StateVector tensor(const std::vector<StateVector>& factors);
Operator kron(const Operator& a, const Operator& b);
Operator identity(const Dims& dims);

StateVector fock_state(std::size_t dim, std::size_t n);
Operator annihilation(std::size_t dim);
Operator creation(std::size_t dim);
Operator number(std::size_t dim);

struct QubitOps {
  Operator sigma_x;
  Operator sigma_y;
  Operator excited_projector;
};
/// Pauli operators in the {|g>, |e>} basis (index 0 = g).
QubitOps qubit_ops();
Operator sigma_z();      // |g><g| - |e><e|
Operator sigma_minus();  // |g><e|

/// identity ⊗ ... ⊗ op ⊗ ... ⊗ identity at `mode`.
Operator embed(const Operator& op, const Dims& system_dims, std::size_t mode);

enum class LogicalLabel { g, e, plus, minus, plus_i, minus_i };

inline constexpr LogicalLabel all_logical_labels[] = {
    LogicalLabel::g,    LogicalLabel::e,      LogicalLabel::plus,
    LogicalLabel::minus, LogicalLabel::plus_i, LogicalLabel::minus_i};

std::string_view to_string(LogicalLabel label);
LogicalLabel parse_logical_label(std::string_view text);

/// Coefficients (c0, c1) of `label` on the pair (|0>, |1>) of a two-level
/// encoding: g -> (1,0), + -> (1,1)/√2, +i -> (1,i)/√2, ...
std::array<cplx, 2> label_coefficients(LogicalLabel label);

/// Physical qubit state for `label`.
StateVector qubit_state(LogicalLabel label);

/// Lowest-order binomial codeword: |0_L> = (|0>+|4>)/√2, |1_L> = |2>, and the
/// superpositions built from them with `label_coefficients`.
StateVector logical_state(LogicalLabel label, std::size_t dim);

/// D(β) = exp(β a† - β* a) on the truncated space. Warns when |β|² > dim/4.
Operator displacement(std::size_t dim, cplx beta);
/// Π = exp(iπ a†a), diagonal (-1)^n.
Operator parity(std::size_t dim);

/// Reusable displacement evaluator. Diagonalizes i(a† - a) once and applies
/// the phase rotation exp(iθ n) for complex β.
class Displacer {
 public:
  explicit Displacer(std::size_t dim);
  std::size_t dim() const { return dim_; }
  Eigen::MatrixXcd operator()(cplx beta) const;

 private:
  std::size_t dim_;
  Eigen::MatrixXcd eigenvectors_;
  Eigen::VectorXd eigenvalues_;
};

/// exp(-i H t) for Hermitian H via eigendecomposition.
Eigen::MatrixXcd expm_hermitian(const Eigen::MatrixXcd& h, double t);

/// Splits full-space indices into (subsystem, rest) parts for a chosen list of
/// modes. The subsystem index uses the order given in `modes`; the rest index
/// keeps system order.
class ModeSplit {
 public:
  ModeSplit(const Dims& dims, const std::vector<std::size_t>& modes);

  std::size_t sub_dim() const { return sub_dim_; }
  std::size_t rest_dim() const { return rest_dim_; }
  std::size_t full_index(std::size_t sub, std::size_t rest) const {
    return full_index_[sub * rest_dim_ + rest];
  }
  const Dims& sub_dims() const { return sub_dims_; }
  const Dims& rest_dims() const { return rest_dims_; }

 private:
  Dims sub_dims_;
  Dims rest_dims_;
  std::size_t sub_dim_ = 1;
  std::size_t rest_dim_ = 1;
  std::vector<std::size_t> full_index_;
};

/// Operator acting as `op` on `modes` (in that order) and identity elsewhere.
Eigen::MatrixXcd lift(const Eigen::MatrixXcd& op, const Dims& full_dims,
                      const std::vector<std::size_t>& modes);

/// Reduced matrix on `keep` (kept in the listed order).
Eigen::MatrixXcd partial_trace(const Eigen::MatrixXcd& rho, const Dims& dims,
                               const std::vector<std::size_t>& keep);

/// Orthonormal-basis completion: returns a unitary U with U·inputs[k] = targets[k]
/// for every k. Both lists must be orthonormal (within 1e-10) and of equal size.
Eigen::MatrixXcd complete_unitary(const std::vector<Eigen::VectorXcd>& inputs,
                                  const std::vector<Eigen::VectorXcd>& targets);

}  // namespace bincz

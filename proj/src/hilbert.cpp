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

#include "bincz/hilbert.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "bincz/diagnostics.hpp"
#include "bincz/errors.hpp"

namespace bincz {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

std::size_t product(const Dims& dims) {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

// ---------------------------------------------------------------------------
// StateVector / Operator

StateVector::StateVector(Dims dims, VectorXcd amplitudes)
    : dims_(std::move(dims)), amplitudes_(std::move(amplitudes)) {
  if (product(dims_) != static_cast<std::size_t>(amplitudes_.size())) {
    throw DimensionError("state length " + std::to_string(amplitudes_.size()) +
                         " does not match product of dims " +
                         std::to_string(product(dims_)));
  }
}

StateVector StateVector::normalized() const {
  const double n = norm();
  if (n == 0.0) throw NumericalError("cannot normalize the zero vector");
  return {dims_, amplitudes_ / n};
}

cplx StateVector::inner(const StateVector& other) const {
  if (other.size() != size()) throw DimensionError("inner product of mismatched states");
  return amplitudes_.dot(other.amplitudes_);
}

StateVector StateVector::operator+(const StateVector& other) const {
  if (other.dims_ != dims_) throw DimensionError("sum of mismatched states");
  return {dims_, amplitudes_ + other.amplitudes_};
}

StateVector StateVector::operator-(const StateVector& other) const {
  if (other.dims_ != dims_) throw DimensionError("difference of mismatched states");
  return {dims_, amplitudes_ - other.amplitudes_};
}

Operator::Operator(Dims dims, MatrixXcd matrix, bool hermitian)
    : dims_(std::move(dims)), matrix_(std::move(matrix)), hermitian_(hermitian) {
  const auto n = product(dims_);
  if (static_cast<std::size_t>(matrix_.rows()) != n ||
      static_cast<std::size_t>(matrix_.cols()) != n) {
    throw DimensionError("operator side does not match product of dims");
  }
  if (hermitian_) {
    const double scale = std::max(1.0, matrix_.cwiseAbs().maxCoeff());
    const double asym = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
    if (asym >= 1e-12 * scale) {
      throw std::invalid_argument("operator flagged hermitian but max|M - M†| = " +
                                  std::to_string(asym));
    }
  }
}

StateVector Operator::apply(const StateVector& psi) const {
  if (psi.size() != size()) throw DimensionError("operator/state dimension mismatch");
  return {psi.dims(), matrix_ * psi.amplitudes()};
}

Operator Operator::adjoint() const { return {dims_, matrix_.adjoint(), hermitian_}; }

Operator Operator::operator*(const Operator& other) const {
  if (other.dims_ != dims_) throw DimensionError("product of mismatched operators");
  return {dims_, matrix_ * other.matrix_};
}

Operator Operator::operator+(const Operator& other) const {
  if (other.dims_ != dims_) throw DimensionError("sum of mismatched operators");
  return {dims_, matrix_ + other.matrix_, hermitian_ && other.hermitian_};
}

Operator Operator::operator*(cplx s) const {
  return {dims_, matrix_ * s, hermitian_ && s.imag() == 0.0};
}

StateVector tensor(const StateVector& a, const StateVector& b) {
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  VectorXcd v(static_cast<Index>(a.size() * b.size()));
  const auto nb = static_cast<Index>(b.size());
  for (Index i = 0; i < static_cast<Index>(a.size()); ++i) {
    v.segment(i * nb, nb) = a.amplitudes()(i) * b.amplitudes();
  }
  return {std::move(dims), std::move(v)};
}

StateVector tensor(const std::vector<StateVector>& factors) {
  if (factors.empty()) throw DimensionError("tensor of an empty list");
  StateVector out = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) out = tensor(out, factors[i]);
  return out;
}

namespace {

MatrixXcd kron_matrix(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

Operator kron(const Operator& a, const Operator& b) {
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  return {std::move(dims), kron_matrix(a.matrix(), b.matrix()),
          a.hermitian() && b.hermitian()};
}

Operator identity(const Dims& dims) {
  const auto n = static_cast<Index>(product(dims));
  return {dims, MatrixXcd::Identity(n, n), true};
}

// ---------------------------------------------------------------------------
// Single-mode building blocks

StateVector fock_state(std::size_t dim, std::size_t n) {
  if (dim == 0) throw DimensionError("fock_state: dim must be positive");
  if (n >= dim) {
    throw std::out_of_range("fock_state: photon number " + std::to_string(n) +
                            " outside truncation " + std::to_string(dim));
  }
  VectorXcd v = VectorXcd::Zero(static_cast<Index>(dim));
  v(static_cast<Index>(n)) = 1.0;
  return {Dims{dim}, std::move(v)};
}

Operator annihilation(std::size_t dim) {
  if (dim < 2) throw DimensionError("annihilation: dim must be >= 2");
  MatrixXcd a = MatrixXcd::Zero(static_cast<Index>(dim), static_cast<Index>(dim));
  for (std::size_t n = 1; n < dim; ++n)
    a(static_cast<Index>(n - 1), static_cast<Index>(n)) = std::sqrt(static_cast<double>(n));
  return {Dims{dim}, std::move(a), false};
}

Operator creation(std::size_t dim) { return annihilation(dim).adjoint(); }

Operator number(std::size_t dim) {
  if (dim == 0) throw DimensionError("number: dim must be positive");
  MatrixXcd n = MatrixXcd::Zero(static_cast<Index>(dim), static_cast<Index>(dim));
  for (std::size_t k = 0; k < dim; ++k) n(static_cast<Index>(k), static_cast<Index>(k)) = double(k);
  return {Dims{dim}, std::move(n), true};
}

QubitOps qubit_ops() {
  MatrixXcd sx(2, 2), sy(2, 2), pe(2, 2);
  sx << 0, 1, 1, 0;
  sy << 0, cplx(0, -1), cplx(0, 1), 0;
  pe << 0, 0, 0, 1;
  return {Operator({2}, sx, true), Operator({2}, sy, true), Operator({2}, pe, true)};
}

Operator sigma_z() {
  MatrixXcd sz(2, 2);
  sz << 1, 0, 0, -1;
  return {Dims{2}, sz, true};
}

Operator sigma_minus() {
  MatrixXcd sm(2, 2);
  sm << 0, 1, 0, 0;
  return {Dims{2}, sm, false};
}

Operator embed(const Operator& op, const Dims& system_dims, std::size_t mode) {
  if (mode >= system_dims.size()) {
    throw DimensionError("embed: mode index " + std::to_string(mode) + " out of range");
  }
  if (op.dims().size() != 1 || op.dims()[0] != system_dims[mode]) {
    throw DimensionError("embed: operator dimension " + std::to_string(op.size()) +
                         " does not match mode dimension " +
                         std::to_string(system_dims[mode]));
  }
  std::size_t left = 1, right = 1;
  for (std::size_t i = 0; i < mode; ++i) left *= system_dims[i];
  for (std::size_t i = mode + 1; i < system_dims.size(); ++i) right *= system_dims[i];
  MatrixXcd m = kron_matrix(
      kron_matrix(MatrixXcd::Identity(static_cast<Index>(left), static_cast<Index>(left)),
                  op.matrix()),
      MatrixXcd::Identity(static_cast<Index>(right), static_cast<Index>(right)));
  return {system_dims, std::move(m), op.hermitian()};
}

// ---------------------------------------------------------------------------
// Logical labels and binomial codewords

std::string_view to_string(LogicalLabel label) {
  switch (label) {
    case LogicalLabel::g: return "g";
    case LogicalLabel::e: return "e";
    case LogicalLabel::plus: return "+";
    case LogicalLabel::minus: return "-";
    case LogicalLabel::plus_i: return "+i";
    case LogicalLabel::minus_i: return "-i";
  }
  return "?";
}

LogicalLabel parse_logical_label(std::string_view text) {
  for (auto label : all_logical_labels)
    if (to_string(label) == text) return label;
  throw std::invalid_argument("unknown logical label '" + std::string(text) + "'");
}

std::array<cplx, 2> label_coefficients(LogicalLabel label) {
  const double r = std::numbers::sqrt2 / 2.0;
  switch (label) {
    case LogicalLabel::g: return {1.0, 0.0};
    case LogicalLabel::e: return {0.0, 1.0};
    case LogicalLabel::plus: return {r, r};
    case LogicalLabel::minus: return {r, -r};
    case LogicalLabel::plus_i: return {r, cplx(0, r)};
    case LogicalLabel::minus_i: return {r, cplx(0, -r)};
  }
  return {1.0, 0.0};
}

StateVector qubit_state(LogicalLabel label) {
  const auto c = label_coefficients(label);
  VectorXcd v(2);
  v << c[0], c[1];
  return {Dims{2}, v};
}

StateVector logical_state(LogicalLabel label, std::size_t dim) {
  if (dim < 5) {
    throw DimensionError("logical_state: truncation " + std::to_string(dim) +
                         " too small for the binomial codewords (need >= 5)");
  }
  const auto c = label_coefficients(label);
  const double r = std::numbers::sqrt2 / 2.0;
  VectorXcd v = VectorXcd::Zero(static_cast<Index>(dim));
  v(0) = c[0] * r;
  v(4) = c[0] * r;
  v(2) = c[1];
  return {Dims{dim}, v};
}

// ---------------------------------------------------------------------------
// Displacement and parity

Displacer::Displacer(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw DimensionError("Displacer: dim must be positive");
  const auto n = static_cast<Index>(dim);
  // X = i(a† - a) is Hermitian; D(r) = exp(r(a† - a)) = exp(-i r X).
  MatrixXcd x = MatrixXcd::Zero(n, n);
  for (Index k = 1; k < n; ++k) {
    const double s = std::sqrt(static_cast<double>(k));
    x(k, k - 1) = cplx(0, s);   // i a†
    x(k - 1, k) = cplx(0, -s);  // -i a
  }
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(x);
  eigenvectors_ = es.eigenvectors();
  eigenvalues_ = es.eigenvalues();
}

MatrixXcd Displacer::operator()(cplx beta) const {
  const double r = std::abs(beta);
  const double theta = std::arg(beta);
  const auto n = static_cast<Index>(dim_);
  VectorXcd phase(n);
  for (Index k = 0; k < n; ++k) phase(k) = std::exp(cplx(0, -r * eigenvalues_(k)));
  MatrixXcd d = eigenvectors_ * phase.asDiagonal() * eigenvectors_.adjoint();
  // exp(iθn) D(r) exp(-iθn)
  VectorXcd rot(n);
  for (Index k = 0; k < n; ++k) rot(k) = std::exp(cplx(0, theta * double(k)));
  return rot.asDiagonal() * d * rot.conjugate().asDiagonal();
}

Operator displacement(std::size_t dim, cplx beta) {
  if (std::norm(beta) > static_cast<double>(dim) / 4.0) {
    std::ostringstream msg;
    msg << "displacement |beta|^2 = " << std::norm(beta) << " exceeds dim/4 = "
        << static_cast<double>(dim) / 4.0 << "; truncation may distort D(beta)";
    warn(msg.str());
  }
  return {Dims{dim}, Displacer(dim)(beta), false};
}

Operator parity(std::size_t dim) {
  if (dim == 0) throw DimensionError("parity: dim must be positive");
  MatrixXcd p = MatrixXcd::Zero(static_cast<Index>(dim), static_cast<Index>(dim));
  for (std::size_t k = 0; k < dim; ++k)
    p(static_cast<Index>(k), static_cast<Index>(k)) = (k % 2 == 0) ? 1.0 : -1.0;
  return {Dims{dim}, std::move(p), true};
}

MatrixXcd expm_hermitian(const MatrixXcd& h, double t) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h);
  const auto& lam = es.eigenvalues();
  VectorXcd phase(lam.size());
  for (Index k = 0; k < lam.size(); ++k) phase(k) = std::exp(cplx(0, -lam(k) * t));
  return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

// ---------------------------------------------------------------------------
// Subsystem index bookkeeping

ModeSplit::ModeSplit(const Dims& dims, const std::vector<std::size_t>& modes) {
  std::vector<bool> in_sub(dims.size(), false);
  for (auto m : modes) {
    if (m >= dims.size()) throw DimensionError("ModeSplit: mode index out of range");
    if (in_sub[m]) throw DimensionError("ModeSplit: repeated mode index");
    in_sub[m] = true;
    sub_dims_.push_back(dims[m]);
  }
  std::vector<std::size_t> rest_modes;
  for (std::size_t m = 0; m < dims.size(); ++m) {
    if (!in_sub[m]) {
      rest_modes.push_back(m);
      rest_dims_.push_back(dims[m]);
    }
  }
  sub_dim_ = product(sub_dims_);
  rest_dim_ = product(rest_dims_);

  // Stride of each mode in the full index.
  std::vector<std::size_t> stride(dims.size(), 1);
  for (std::size_t m = dims.size(); m-- > 1;) stride[m - 1] = stride[m] * dims[m];

  full_index_.assign(sub_dim_ * rest_dim_, 0);
  std::vector<std::size_t> digits;
  for (std::size_t s = 0; s < sub_dim_; ++s) {
    std::size_t sub_offset = 0, rem = s;
    for (std::size_t k = modes.size(); k-- > 0;) {
      sub_offset += (rem % sub_dims_[k]) * stride[modes[k]];
      rem /= sub_dims_[k];
    }
    for (std::size_t r = 0; r < rest_dim_; ++r) {
      std::size_t rest_offset = 0, rr = r;
      for (std::size_t k = rest_modes.size(); k-- > 0;) {
        rest_offset += (rr % rest_dims_[k]) * stride[rest_modes[k]];
        rr /= rest_dims_[k];
      }
      full_index_[s * rest_dim_ + r] = sub_offset + rest_offset;
    }
  }
}

MatrixXcd lift(const MatrixXcd& op, const Dims& full_dims, const std::vector<std::size_t>& modes) {
  const ModeSplit split(full_dims, modes);
  if (static_cast<std::size_t>(op.rows()) != split.sub_dim() || op.rows() != op.cols()) {
    throw DimensionError("lift: operator does not match subsystem dimension");
  }
  const auto n = static_cast<Index>(product(full_dims));
  MatrixXcd out = MatrixXcd::Zero(n, n);
  for (std::size_t r = 0; r < split.rest_dim(); ++r)
    for (std::size_t a = 0; a < split.sub_dim(); ++a)
      for (std::size_t b = 0; b < split.sub_dim(); ++b)
        out(static_cast<Index>(split.full_index(a, r)), static_cast<Index>(split.full_index(b, r))) =
            op(static_cast<Index>(a), static_cast<Index>(b));
  return out;
}

MatrixXcd partial_trace(const MatrixXcd& rho, const Dims& dims, const std::vector<std::size_t>& keep) {
  const ModeSplit split(dims, keep);
  if (static_cast<std::size_t>(rho.rows()) != product(dims)) {
    throw DimensionError("partial_trace: matrix does not match dims");
  }
  const auto ns = static_cast<Index>(split.sub_dim());
  MatrixXcd out = MatrixXcd::Zero(ns, ns);
  for (std::size_t a = 0; a < split.sub_dim(); ++a)
    for (std::size_t b = 0; b < split.sub_dim(); ++b) {
      cplx acc = 0.0;
      for (std::size_t r = 0; r < split.rest_dim(); ++r)
        acc += rho(static_cast<Index>(split.full_index(a, r)), static_cast<Index>(split.full_index(b, r)));
      out(static_cast<Index>(a), static_cast<Index>(b)) = acc;
    }
  return out;
}

namespace {

// Orthonormal basis of the complement of span(vectors).
MatrixXcd complement_basis(const std::vector<VectorXcd>& vectors, Index n) {
  MatrixXcd proj = MatrixXcd::Identity(n, n);
  for (const auto& v : vectors) proj -= v * v.adjoint();
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(proj);
  const auto k = n - static_cast<Index>(vectors.size());
  // Eigenvalues ascend: the trailing k are the unit eigenvalues.
  return es.eigenvectors().rightCols(k);
}

void check_orthonormal(const std::vector<VectorXcd>& vs, const char* what) {
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t j = 0; j < vs.size(); ++j) {
      const cplx ip = vs[i].dot(vs[j]);
      if (std::abs(ip - (i == j ? 1.0 : 0.0)) > 1e-10) {
        throw std::invalid_argument(std::string("complete_unitary: ") + what +
                                    " are not orthonormal");
      }
    }
}

}  // namespace

MatrixXcd complete_unitary(const std::vector<VectorXcd>& inputs, const std::vector<VectorXcd>& targets) {
  if (inputs.size() != targets.size() || inputs.empty()) {
    throw DimensionError("complete_unitary: need equal, nonempty input/target lists");
  }
  const Index n = inputs.front().size();
  for (const auto& v : inputs)
    if (v.size() != n) throw DimensionError("complete_unitary: ragged inputs");
  for (const auto& v : targets)
    if (v.size() != n) throw DimensionError("complete_unitary: ragged targets");
  check_orthonormal(inputs, "inputs");
  check_orthonormal(targets, "targets");

  MatrixXcd u = MatrixXcd::Zero(n, n);
  for (std::size_t k = 0; k < inputs.size(); ++k) u += targets[k] * inputs[k].adjoint();
  if (static_cast<Index>(inputs.size()) < n) {
    u += complement_basis(targets, n) * complement_basis(inputs, n).adjoint();
  }
  return u;
}

}  // namespace bincz

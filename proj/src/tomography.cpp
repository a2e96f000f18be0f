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

#include "bincz/tomography.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "bincz/diagnostics.hpp"
#include "bincz/errors.hpp"
#include "bincz/optim.hpp"

namespace bincz {

using Eigen::Index;
using Eigen::Matrix4cd;
using Eigen::MatrixXcd;
using Eigen::Vector4cd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

namespace {

Eigen::Matrix<cplx, 16, 1> flatten(const Matrix4cd& m) {
  Eigen::Matrix<cplx, 16, 1> v;
  for (Index r = 0; r < 4; ++r)
    for (Index c = 0; c < 4; ++c) v(4 * r + c) = m(r, c);
  return v;
}

// Solves ρ_m-expansion coefficients for every Pauli once.
const Eigen::Matrix<cplx, 16, 16>& pauli_expansion() {
  static const Eigen::Matrix<cplx, 16, 16> alpha = [] {
    const auto inputs = qpt_input_coefficients();
    Eigen::Matrix<cplx, 16, 16> a;
    for (Index m = 0; m < 16; ++m) {
      const Vector4cd& c = inputs[static_cast<std::size_t>(m)];
      a.col(m) = flatten(c * c.adjoint());
    }
    Eigen::Matrix<cplx, 16, 16> p;
    const auto& paulis = two_qubit_paulis();
    for (Index j = 0; j < 16; ++j) p.col(j) = flatten(paulis[static_cast<std::size_t>(j)]);
    // Column j holds the weights of P_j on the 16 input projectors.
    return Eigen::Matrix<cplx, 16, 16>(a.fullPivLu().solve(p));
  }();
  return alpha;
}

MatrixXcd basis_matrix(const std::vector<StateVector>& basis, const char* what) {
  if (basis.size() != 4) throw DimensionError(std::string(what) + ": expected four basis states");
  const auto n = static_cast<Index>(basis.front().size());
  MatrixXcd b(n, 4);
  for (Index k = 0; k < 4; ++k) {
    const auto& s = basis[static_cast<std::size_t>(k)];
    if (s.dims() != basis.front().dims()) throw DimensionError(std::string(what) + ": basis dims differ");
    b.col(k) = s.amplitudes();
  }
  if ((b.adjoint() * b - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff() > 1e-8) {
    throw NumericalError(std::string(what) + ": basis is not orthonormal");
  }
  return b;
}

}  // namespace

const std::vector<std::string>& PauliTransferMatrix::labels() {
  static const std::vector<std::string> l = [] {
    std::vector<std::string> out;
    const char names[] = {'I', 'X', 'Y', 'Z'};
    for (char a : names)
      for (char b : names) out.push_back(std::string{a, b});
    return out;
  }();
  return l;
}

const std::vector<Matrix4cd>& two_qubit_paulis() {
  static const std::vector<Matrix4cd> paulis = [] {
    std::array<Eigen::Matrix2cd, 4> s;
    s[0] = Eigen::Matrix2cd::Identity();
    s[1] << 0, 1, 1, 0;
    s[2] << 0, cplx(0, -1), cplx(0, 1), 0;
    s[3] << 1, 0, 0, -1;
    std::vector<Matrix4cd> out;
    for (const auto& a : s)
      for (const auto& b : s) {
        Matrix4cd k;
        for (Index r = 0; r < 4; ++r)
          for (Index c = 0; c < 4; ++c) k(r, c) = a(r / 2, c / 2) * b(r % 2, c % 2);
        out.push_back(k);
      }
    return out;
  }();
  return paulis;
}

std::vector<Vector4cd> qpt_input_coefficients() {
  const LogicalLabel labels[] = {LogicalLabel::g, LogicalLabel::e, LogicalLabel::plus, LogicalLabel::plus_i};
  std::vector<Vector4cd> out;
  for (auto la : labels) {
    const auto ca = label_coefficients(la);
    for (auto lb : labels) {
      const auto cb = label_coefficients(lb);
      Vector4cd v;
      v << ca[0] * cb[0], ca[0] * cb[1], ca[1] * cb[0], ca[1] * cb[1];
      out.push_back(v);
    }
  }
  return out;
}

PauliTransferMatrix pauli_transfer(const std::vector<Matrix4cd>& outputs) {
  if (outputs.size() != 16) throw DimensionError("pauli_transfer: expected 16 output matrices");
  const auto& alpha = pauli_expansion();
  const auto& paulis = two_qubit_paulis();
  PauliTransferMatrix r;
  r.matrix = Eigen::MatrixXd::Zero(16, 16);
  for (Index j = 0; j < 16; ++j) {
    Matrix4cd image = Matrix4cd::Zero();
    for (Index m = 0; m < 16; ++m) image += alpha(m, j) * outputs[static_cast<std::size_t>(m)];
    for (Index i = 0; i < 16; ++i) {
      r.matrix(i, j) = (paulis[static_cast<std::size_t>(i)] * image).trace().real() / 4.0;
    }
  }
  return r;
}

PauliTransferMatrix pauli_transfer(const Process& process, const std::vector<StateVector>& input_basis,
                                   const std::vector<StateVector>& output_basis) {
  const MatrixXcd in = basis_matrix(input_basis, "pauli_transfer input basis");
  const MatrixXcd out = output_basis.empty() ? in : basis_matrix(output_basis, "pauli_transfer output basis");
  const Dims& in_dims = input_basis.front().dims();
  std::vector<Matrix4cd> outputs;
  for (const auto& c : qpt_input_coefficients()) {
    const VectorXcd psi = in * c;
    const DensityMatrix rho_out = process(DensityMatrix::pure(StateVector(in_dims, psi)));
    if (rho_out.size() != static_cast<std::size_t>(out.rows())) {
      throw DimensionError("pauli_transfer: process output does not match the output basis");
    }
    outputs.emplace_back(out.adjoint() * rho_out.matrix() * out);
  }
  return pauli_transfer(outputs);
}

PauliTransferMatrix unitary_ptm(const Matrix4cd& u) {
  std::vector<Matrix4cd> outputs;
  for (const auto& c : qpt_input_coefficients()) {
    const Vector4cd v = u * c;
    outputs.emplace_back(v * v.adjoint());
  }
  return pauli_transfer(outputs);
}

double process_fidelity(const PauliTransferMatrix& r_exp, const PauliTransferMatrix& r_ideal) {
  if (r_exp.matrix.rows() != r_ideal.matrix.rows() || r_exp.matrix.cols() != r_ideal.matrix.cols() ||
      r_exp.matrix.rows() != r_exp.matrix.cols()) {
    throw DimensionError("process_fidelity: PTM shapes differ");
  }
  const double d = std::sqrt(static_cast<double>(r_exp.matrix.rows()));
  const double overlap = (r_ideal.matrix.transpose() * r_exp.matrix).trace();
  return (overlap + d) / (d * d + d);
}

void write_ptm_csv(std::ostream& out, const PauliTransferMatrix& r) {
  const auto& labels = PauliTransferMatrix::labels();
  out << "row";
  for (const auto& l : labels) out << ',' << l;
  out << '\n';
  char buf[32];
  for (Index i = 0; i < r.matrix.rows(); ++i) {
    out << labels[static_cast<std::size_t>(i)];
    for (Index j = 0; j < r.matrix.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.12g", r.matrix(i, j));
      out << ',' << buf;
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Maximum likelihood

namespace {

struct Cholesky {
  Index d;
  MatrixXcd unpack(const VectorXd& x) const {
    MatrixXcd t = MatrixXcd::Zero(d, d);
    Index k = 0;
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j <= i; ++j) t(i, j) = x(k++);
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < i; ++j) t(i, j) += cplx(0, x(k++));
    return t;
  }
  VectorXd pack_gradient(const MatrixXcd& m) const {
    // m = G'T†, d/dRe T_ij = 2 Re m_ji, d/dIm T_ij = −2 Im m_ji.
    VectorXd g(d * d);
    Index k = 0;
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j <= i; ++j) g(k++) = 2.0 * m(j, i).real();
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < i; ++j) g(k++) = -2.0 * m(j, i).imag();
    return g;
  }
};

}  // namespace

MleResult mle_reconstruct(const std::vector<MeasurementRecord>& records, const Dims& dims,
                          const MleOptions& options) {
  const auto d = static_cast<Index>(product(dims));
  std::vector<MatrixXcd> elements;
  std::vector<double> counts;
  for (const auto& rec : records) {
    if (rec.povm.size() != rec.counts.size()) throw DimensionError("mle_reconstruct: POVM and counts differ in size");
    for (std::size_t o = 0; o < rec.povm.size(); ++o) {
      if (rec.povm[o].rows() != d || rec.povm[o].cols() != d) {
        throw DimensionError("mle_reconstruct: POVM element does not match dims");
      }
      if (!(rec.counts[o] >= 0)) throw std::invalid_argument("mle_reconstruct: negative count");
      elements.push_back(rec.povm[o]);
      counts.push_back(rec.counts[o]);
    }
  }
  double total = 0.0;
  for (double c : counts) total += c;
  if (elements.empty() || !(total > 0)) throw std::invalid_argument("mle_reconstruct: no data");

  MatrixXcd span(static_cast<Index>(elements.size()), d * d);
  for (std::size_t k = 0; k < elements.size(); ++k) {
    span.row(static_cast<Index>(k)) = Eigen::Map<const Eigen::RowVectorXcd>(elements[k].data(), d * d);
  }
  Eigen::FullPivLU<MatrixXcd> lu(span);
  lu.setThreshold(1e-9);
  if (lu.rank() < d * d) {
    std::ostringstream msg;
    msg << "mle_reconstruct: measurements span " << lu.rank() << " of " << d * d
        << " operator dimensions; the estimate is not unique";
    warn(msg.str());
  }

  const Cholesky chol{d};
  Objective f = [&](const VectorXd& x, VectorXd& grad) {
    const MatrixXcd t = chol.unpack(x);
    const MatrixXcd a = t.adjoint() * t;
    const double tau = a.trace().real();
    const MatrixXcd rho = a / tau;
    double ll = 0.0;
    MatrixXcd g = MatrixXcd::Zero(d, d);
    for (std::size_t k = 0; k < elements.size(); ++k) {
      if (counts[k] == 0.0) continue;
      const double p = std::max((elements[k] * rho).trace().real(), 1e-300);
      ll += counts[k] * std::log(p);
      g += (counts[k] / p) * elements[k];
    }
    const cplx grho = (g * rho).trace();
    const MatrixXcd gp = (g - grho.real() * MatrixXcd::Identity(d, d)) / tau;
    grad = -chol.pack_gradient(gp * t.adjoint()) / total;
    return -ll / total;
  };

  VectorXd x0 = VectorXd::Zero(d * d);
  {
    Index k = 0;
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j <= i; ++j, ++k)
        if (i == j) x0(k) = 1.0 / std::sqrt(static_cast<double>(d));
  }
  OptimOptions opts;
  opts.method = Method::lbfgs;
  opts.max_iters = options.max_iters;
  opts.convergence_tol = options.tolerance;
  opts.lbfgs_memory = 20;
  const auto res = minimize(f, x0, opts);

  const MatrixXcd t = chol.unpack(res.x);
  MatrixXcd rho = t.adjoint() * t;
  rho /= rho.trace().real();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return MleResult{DensityMatrix(dims, rho, 1e-8), -res.value * total, res.iterations,
                   res.reason == StopReason::stalled};
}

// ---------------------------------------------------------------------------

PostSelection postselect_ground(const DensityMatrix& rho, std::size_t coupler) {
  const Dims& dims = rho.dims();
  if (coupler >= dims.size()) throw DimensionError("postselect_ground: coupler index out of range");
  MatrixXcd g = MatrixXcd::Zero(static_cast<Index>(dims[coupler]), static_cast<Index>(dims[coupler]));
  g(0, 0) = 1.0;
  const MatrixXcd p = lift(g, dims, {coupler});
  MatrixXcd projected = p * rho.matrix() * p;
  const double prob = projected.trace().real();
  if (!(prob > 1e-12)) throw NumericalError("postselect_ground: coupler ground-state probability is zero");
  projected /= prob;
  projected = 0.5 * (projected + projected.adjoint()).eval();
  return PostSelection{DensityMatrix(dims, projected, 1e-8), prob};
}

}  // namespace bincz

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

#include "bincz/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Sparse>

#include "bincz/errors.hpp"

namespace bincz {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

namespace {

Index idx(std::size_t i) { return static_cast<Index>(i); }

MatrixXcd step_unitary(const MatrixXcd& h, double dt) { return expm_hermitian(h, dt); }

void check_model_pulses(const ControlModel& model, const PulseSet& pulses) {
  pulses.validate();
  if (pulses.n_controls() != model.n_controls()) {
    throw DimensionError("pulse set has " + std::to_string(pulses.n_controls()) + " controls, model has " +
                         std::to_string(model.n_controls()));
  }
}

MatrixXcd gather_rows(const MatrixXcd& m, const std::vector<std::size_t>& rows) {
  MatrixXcd out(idx(rows.size()), m.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(idx(r)) = m.row(idx(rows[r]));
  return out;
}

void scatter_rows(MatrixXcd& m, const std::vector<std::size_t>& rows, const MatrixXcd& part) {
  for (std::size_t r = 0; r < rows.size(); ++r) m.row(idx(rows[r])) = part.row(idx(r));
}

}  // namespace

// ---------------------------------------------------------------------------
// PulseSet

PulseSet PulseSet::zeros(std::vector<std::string> labels, std::size_t n_steps, double dt) {
  PulseSet p;
  p.dt = dt;
  p.amplitudes = MatrixXd::Zero(idx(labels.size()), idx(n_steps));
  p.labels = std::move(labels);
  return p;
}

double PulseSet::max_abs() const { return amplitudes.size() ? amplitudes.cwiseAbs().maxCoeff() : 0.0; }

void PulseSet::validate(std::optional<double> amp_max) const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("pulse dt must be positive and finite");
  if (labels.size() != n_controls()) throw DimensionError("pulse labels do not match amplitude rows");
  if (!amplitudes.allFinite()) throw std::invalid_argument("pulse amplitudes must be finite");
  if (amp_max && max_abs() > *amp_max * (1.0 + 1e-12)) {
    throw std::invalid_argument("pulse amplitude exceeds amp_max");
  }
}

PulseSet PulseSet::concat(const PulseSet& next) const {
  if (next.labels != labels) throw DimensionError("concat: control labels differ");
  if (std::abs(next.dt - dt) > 1e-15 * dt) throw std::invalid_argument("concat: dt differs");
  PulseSet out;
  out.dt = dt;
  out.labels = labels;
  out.amplitudes.resize(amplitudes.rows(), amplitudes.cols() + next.amplitudes.cols());
  out.amplitudes << amplitudes, next.amplitudes;
  return out;
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(Dims dims, MatrixXcd matrix, double tol)
    : dims_(std::move(dims)), matrix_(std::move(matrix)) {
  const auto n = product(dims_);
  if (idx(n) != matrix_.rows() || matrix_.rows() != matrix_.cols()) {
    throw DimensionError("density matrix side does not match dims");
  }
  if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > tol) {
    throw NumericalError("density matrix is not Hermitian");
  }
  const cplx tr = matrix_.trace();
  if (std::abs(tr - 1.0) > tol) {
    std::ostringstream msg;
    msg << "density matrix trace " << tr.real() << " differs from 1";
    throw NumericalError(msg.str());
  }
  const MatrixXcd herm = 0.5 * (matrix_ + matrix_.adjoint());
  const double min_eig = Eigen::SelfAdjointEigenSolver<MatrixXcd>(herm, Eigen::EigenvaluesOnly).eigenvalues()(0);
  if (min_eig < -tol) {
    std::ostringstream msg;
    msg << "density matrix has negative eigenvalue " << min_eig;
    throw NumericalError(msg.str());
  }
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  return {psi.dims(), psi.amplitudes() * psi.amplitudes().adjoint()};
}

double DensityMatrix::fidelity(const StateVector& psi) const {
  if (psi.size() != size()) throw DimensionError("fidelity: dimension mismatch");
  return psi.amplitudes().dot(matrix_ * psi.amplitudes()).real();
}

// ---------------------------------------------------------------------------
// Error channels

ErrorChannelSet ErrorChannelSet::all(const SystemSpec& system) {
  ErrorChannelSet s;
  for (const auto& m : system.modes()) s.set(m.label, true, true);
  return s;
}

ErrorChannelSet& ErrorChannelSet::set(const std::string& label, bool relaxation, bool dephasing) {
  toggles_[label] = {relaxation, dephasing};
  return *this;
}

ChannelToggle ErrorChannelSet::get(const std::string& label) const {
  auto it = toggles_.find(label);
  return it == toggles_.end() ? ChannelToggle{} : it->second;
}

bool ErrorChannelSet::empty() const {
  return std::none_of(toggles_.begin(), toggles_.end(),
                      [](const auto& kv) { return kv.second.relaxation || kv.second.dephasing; });
}

void ErrorChannelSet::validate(const SystemSpec& system) const {
  for (const auto& [label, _] : toggles_)
    if (!system.find(label)) throw SchemaError("channels." + label, "not a mode of this system");
}

std::vector<Operator> collapse_ops(const SystemSpec& system, const ErrorChannelSet& channels) {
  channels.validate(system);
  const auto dims = system.dims();
  std::vector<Operator> ops;
  for (std::size_t i = 0; i < system.size(); ++i) {
    const auto& m = system.modes()[i];
    const auto t = channels.get(m.label);
    if (t.relaxation && std::isfinite(m.T1)) {
      const double s = std::sqrt(1.0 / m.T1);
      const auto lower = m.kind == ModeKind::qubit ? sigma_minus() : annihilation(m.dim);
      ops.push_back(embed(lower * cplx(s), dims, i));
    }
    if (t.dephasing) {
      const double gamma_phi = 1.0 / m.T2 - (std::isfinite(m.T1) ? 0.5 / m.T1 : 0.0);
      if (gamma_phi * m.T2 < -1e-12) {
        throw SchemaError("mode[" + std::to_string(i) + "].T2",
                          "unphysical coherence times for " + m.label + ": T2 > 2*T1");
      }
      if (gamma_phi <= 0.0) continue;
      if (m.kind == ModeKind::qubit) {
        ops.push_back(embed(sigma_z() * cplx(std::sqrt(0.5 * gamma_phi)), dims, i));
      } else {
        ops.push_back(embed(number(m.dim) * cplx(std::sqrt(2.0 * gamma_phi)), dims, i));
      }
    }
  }
  return ops;
}

// ---------------------------------------------------------------------------
// ControlModel

ControlModel::ControlModel(std::size_t dim, std::size_t n_controls, std::vector<ModelBlock> blocks)
    : dim_(dim), n_controls_(n_controls), blocks_(std::move(blocks)) {
  std::vector<int> seen(dim, 0);
  for (const auto& b : blocks_) {
    const auto n = idx(b.indices.size());
    if (b.h0.rows() != n || b.h0.cols() != n) throw DimensionError("model block h0 has the wrong size");
    if (b.controls.size() != n_controls) throw DimensionError("model block has the wrong control count");
    for (const auto& c : b.controls)
      if (c.rows() != n || c.cols() != n) throw DimensionError("model block control has the wrong size");
    for (auto i : b.indices) {
      if (i >= dim) throw DimensionError("model block index out of range");
      ++seen[i];
    }
  }
  for (auto s : seen)
    if (s != 1) throw DimensionError("model blocks must partition the index range");
}

ControlModel ControlModel::dense(const Operator& h0, const std::vector<Operator>& controls) {
  std::vector<std::size_t> all(h0.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return restricted(h0, controls, all);
}

ControlModel ControlModel::restricted(const Operator& h0, const std::vector<Operator>& controls,
                                      const std::vector<std::size_t>& indices) {
  auto sub = [&](const MatrixXcd& m) {
    MatrixXcd out(idx(indices.size()), idx(indices.size()));
    for (std::size_t r = 0; r < indices.size(); ++r)
      for (std::size_t c = 0; c < indices.size(); ++c) out(idx(r), idx(c)) = m(idx(indices[r]), idx(indices[c]));
    return out;
  };
  ModelBlock b;
  b.h0 = sub(h0.matrix());
  for (const auto& c : controls) {
    if (c.size() != h0.size()) throw DimensionError("control and static Hamiltonian dims differ");
    b.controls.push_back(sub(c.matrix()));
  }
  b.indices.resize(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) b.indices[i] = i;
  return {indices.size(), controls.size(), {std::move(b)}};
}

ControlModel ControlModel::sectors(const BlockSystem& blocks) {
  const auto q = qubit_ops();
  std::vector<ModelBlock> out;
  for (std::size_t ia = 0; ia < 3; ++ia)
    for (std::size_t ib = 0; ib < 3; ++ib) {
      const auto& s = blocks.sectors[ia * 3 + ib];
      ModelBlock b;
      b.indices = {ia * 6 + ib, ia * 6 + 3 + ib};
      b.h0 = MatrixXcd::Zero(2, 2);
      b.h0(0, 0) = s.phase_rate;
      b.h0(1, 1) = s.phase_rate + s.detuning;
      b.controls = {q.sigma_x.matrix(), q.sigma_y.matrix()};
      out.push_back(std::move(b));
    }
  return {18, 2, std::move(out)};
}

MatrixXcd ControlModel::block_hamiltonian(std::size_t block, const VectorXd& eps) const {
  const auto& b = blocks_[block];
  MatrixXcd h = b.h0;
  for (std::size_t j = 0; j < n_controls_; ++j)
    if (eps(idx(j)) != 0.0) h += eps(idx(j)) * b.controls[j];
  return h;
}

// ---------------------------------------------------------------------------
// Unitary propagation

MatrixXcd propagator(const ControlModel& model, const PulseSet& pulses) {
  check_model_pulses(model, pulses);
  MatrixXcd u = MatrixXcd::Zero(idx(model.dim()), idx(model.dim()));
  for (std::size_t bi = 0; bi < model.blocks().size(); ++bi) {
    const auto& b = model.blocks()[bi];
    const auto n = idx(b.indices.size());
    MatrixXcd ub = MatrixXcd::Identity(n, n);
    for (std::size_t k = 0; k < pulses.n_steps(); ++k)
      ub = step_unitary(model.block_hamiltonian(bi, pulses.amplitudes.col(idx(k))), pulses.dt) * ub;
    for (Index r = 0; r < n; ++r)
      for (Index c = 0; c < n; ++c) u(idx(b.indices[r]), idx(b.indices[c])) = ub(r, c);
  }
  return u;
}

Operator propagator(const Operator& h0, const std::vector<Operator>& controls, const PulseSet& pulses) {
  for (const auto& c : controls)
    if (c.dims() != h0.dims()) throw DimensionError("propagator: control dims differ from H0 dims");
  return {h0.dims(), propagator(ControlModel::dense(h0, controls), pulses)};
}

MatrixXcd propagate_states(const ControlModel& model, const PulseSet& pulses, const MatrixXcd& states,
                           std::vector<MatrixXcd>* trajectory) {
  check_model_pulses(model, pulses);
  if (states.rows() != idx(model.dim())) throw DimensionError("propagate_states: state dimension mismatch");
  MatrixXcd psi = states;
  if (trajectory) {
    trajectory->clear();
    trajectory->reserve(pulses.n_steps() + 1);
    trajectory->push_back(psi);
  }
  if (!trajectory) {
    // Block by block: each block only needs its own rows.
    for (std::size_t bi = 0; bi < model.blocks().size(); ++bi) {
      const auto& rows = model.blocks()[bi].indices;
      MatrixXcd part = gather_rows(psi, rows);
      for (std::size_t k = 0; k < pulses.n_steps(); ++k)
        part = step_unitary(model.block_hamiltonian(bi, pulses.amplitudes.col(idx(k))), pulses.dt) * part;
      scatter_rows(psi, rows, part);
    }
    return psi;
  }
  for (std::size_t k = 0; k < pulses.n_steps(); ++k) {
    for (std::size_t bi = 0; bi < model.blocks().size(); ++bi) {
      const auto& rows = model.blocks()[bi].indices;
      const MatrixXcd part = gather_rows(psi, rows);
      scatter_rows(psi, rows,
                   step_unitary(model.block_hamiltonian(bi, pulses.amplitudes.col(idx(k))), pulses.dt) * part);
    }
    trajectory->push_back(psi);
  }
  return psi;
}

StateVector propagate_state(const Operator& h0, const std::vector<Operator>& controls, const PulseSet& pulses,
                            const StateVector& psi0, std::vector<StateVector>* trajectory) {
  if (psi0.size() != h0.size()) throw DimensionError("propagate_state: state dimension mismatch");
  const auto model = ControlModel::dense(h0, controls);
  if (!trajectory) return {psi0.dims(), propagate_states(model, pulses, psi0.amplitudes())};
  std::vector<MatrixXcd> traj;
  MatrixXcd out = propagate_states(model, pulses, psi0.amplitudes(), &traj);
  trajectory->clear();
  for (const auto& m : traj) trajectory->emplace_back(psi0.dims(), m.col(0));
  return {psi0.dims(), out.col(0)};
}

double max_abs_diff(const MatrixXcd& a, const MatrixXcd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("max_abs_diff: shape mismatch");
  return a.size() ? (a - b).cwiseAbs().maxCoeff() : 0.0;
}

// ---------------------------------------------------------------------------
// Lindblad

using SpCol = Eigen::SparseMatrix<cplx, Eigen::ColMajor>;
using SpRow = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

// Matrices are handled as vectors over a support of (row, col) entries,
// vec index r + c·n. The support is closed under the Liouvillian, so entries
// outside it stay exactly zero.
struct LindbladSolver::Impl {
  Index n = 0;
  VectorXcd h0_diag;
  VectorXcd decay_diag;  // diagonal of (1/2) Σ L†L
  // Off-diagonal parts, column access (left products) and row access (right
  // products).
  SpCol static_off;  // H0_off − (i/2)(Σ L†L)_off
  SpRow static_off_adj_rows;
  std::vector<VectorXcd> ctrl_diag;
  std::vector<SpCol> ctrl_off;
  std::vector<SpRow> ctrl_off_rows;
  std::vector<double> ctrl_off_norm;  // Gershgorin bound of the off-diagonal part
  double h0_off_norm = 0.0;
  std::vector<SpCol> jumps;
  double dissipation_norm = 0.0;
  LindbladOptions options;
};

namespace {

SpCol to_sparse(const MatrixXcd& m, bool off_diagonal_only) {
  std::vector<Eigen::Triplet<cplx>> t;
  for (Index c = 0; c < m.cols(); ++c)
    for (Index r = 0; r < m.rows(); ++r) {
      if (off_diagonal_only && r == c) continue;
      if (m(r, c) != cplx(0.0)) t.emplace_back(r, c, m(r, c));
    }
  SpCol s(m.rows(), m.cols());
  s.setFromTriplets(t.begin(), t.end());
  return s;
}

double row_sum_norm(const MatrixXcd& m, bool off_diagonal_only) {
  double best = 0.0;
  for (Index r = 0; r < m.rows(); ++r) {
    double s = 0.0;
    for (Index c = 0; c < m.cols(); ++c)
      if (!(off_diagonal_only && r == c)) s += std::abs(m(r, c));
    best = std::max(best, s);
  }
  return best;
}

// Visits every (target vec index, value) produced from entry (r, c) by
// X -> a·A X (left), X -> a·X B (right) and X -> L X L†.
template <typename F>
void left_terms(const SpCol& a, Index r, Index c, Index n, F&& emit) {
  for (SpCol::InnerIterator it(a, r); it; ++it) emit(it.row() + c * n, it.value());
}
template <typename F>
void right_terms(const SpRow& b, Index r, Index c, Index n, F&& emit) {
  for (SpRow::InnerIterator it(b, c); it; ++it) emit(r + it.col() * n, it.value());
}
template <typename F>
void jump_terms(const SpCol& l, Index r, Index c, Index n, F&& emit) {
  for (SpCol::InnerIterator a(l, r); a; ++a)
    for (SpCol::InnerIterator b(l, c); b; ++b) emit(a.row() + b.row() * n, a.value() * std::conj(b.value()));
}

}  // namespace

LindbladSolver::LindbladSolver(const Operator& h0, const std::vector<Operator>& controls,
                               const std::vector<Operator>& collapse, LindbladOptions options)
    : dim_(h0.size()) {
  auto impl = std::make_shared<Impl>();
  impl->n = idx(dim_);
  impl->options = options;
  impl->h0_diag = h0.matrix().diagonal();
  impl->h0_off_norm = row_sum_norm(h0.matrix(), true);
  MatrixXcd ltl = MatrixXcd::Zero(impl->n, impl->n);
  for (const auto& l : collapse) {
    if (l.size() != dim_) throw DimensionError("LindbladSolver: collapse operator dimension mismatch");
    impl->jumps.push_back(to_sparse(l.matrix(), false));
    ltl += l.matrix().adjoint() * l.matrix();
  }
  ltl *= 0.5;
  impl->decay_diag = ltl.diagonal();
  impl->dissipation_norm = 2.0 * row_sum_norm(ltl, false);
  const MatrixXcd v0 = h0.matrix() - cplx(0.0, 1.0) * ltl;
  impl->static_off = to_sparse(v0, true);
  impl->static_off_adj_rows = SpRow(to_sparse(v0.adjoint(), true));
  for (const auto& c : controls) {
    if (c.size() != dim_) throw DimensionError("LindbladSolver: control dimension mismatch");
    impl->ctrl_diag.push_back(c.matrix().diagonal());
    impl->ctrl_off.push_back(to_sparse(c.matrix(), true));
    impl->ctrl_off_rows.push_back(SpRow(impl->ctrl_off.back()));
    impl->ctrl_off_norm.push_back(row_sum_norm(c.matrix(), true));
  }
  impl_ = std::move(impl);
}

void LindbladSolver::evolve(std::vector<MatrixXcd>& xs, const PulseSet& pulses) const {
  const auto& im = *impl_;
  const Index n = im.n;
  pulses.validate();
  if (pulses.n_controls() != im.ctrl_diag.size()) throw DimensionError("LindbladSolver: control count mismatch");
  for (const auto& x : xs)
    if (x.rows() != n || x.cols() != n) throw DimensionError("LindbladSolver: matrix dimension mismatch");
  if (xs.empty()) return;

  double scale = 0.0;
  std::vector<cplx> trace0;
  for (const auto& x : xs) {
    scale = std::max(scale, x.norm());
    trace0.push_back(x.trace());
  }

  // Closure of the initial nonzero pattern under every term of the generator.
  const Index nn = n * n;
  std::vector<Index> pos(static_cast<std::size_t>(nn), -1);
  std::vector<Index> support;
  auto visit = [&](Index v, cplx) {
    if (pos[static_cast<std::size_t>(v)] < 0) {
      pos[static_cast<std::size_t>(v)] = static_cast<Index>(support.size());
      support.push_back(v);
    }
  };
  for (const auto& x : xs)
    for (Index c = 0; c < n; ++c)
      for (Index r = 0; r < n; ++r)
        if (x(r, c) != cplx(0.0)) visit(r + c * n, {});
  for (std::size_t k = 0; k < support.size(); ++k) {
    const Index r = support[k] % n, c = support[k] / n;
    left_terms(im.static_off, r, c, n, visit);
    right_terms(im.static_off_adj_rows, r, c, n, visit);
    for (std::size_t j = 0; j < im.ctrl_off.size(); ++j) {
      left_terms(im.ctrl_off[j], r, c, n, visit);
      right_terms(im.ctrl_off_rows[j], r, c, n, visit);
    }
    for (const auto& l : im.jumps) jump_terms(l, r, c, n, visit);
  }
  const auto m = static_cast<Index>(support.size());

  // Restricted generators: static part and one per control.
  const cplx minus_i(0.0, -1.0);
  auto build = [&](auto&& fill) {
    std::vector<Eigen::Triplet<cplx>> t;
    for (Index k = 0; k < m; ++k) {
      const Index r = support[static_cast<std::size_t>(k)] % n, c = support[static_cast<std::size_t>(k)] / n;
      fill(r, c, [&](cplx a) {
        return [&, a](Index v, cplx val) { t.emplace_back(pos[static_cast<std::size_t>(v)], k, a * val); };
      });
    }
    SpRow s(m, m);
    s.setFromTriplets(t.begin(), t.end());
    return s;
  };
  const SpRow g_static = build([&](Index r, Index c, auto with) {
    left_terms(im.static_off, r, c, n, with(minus_i));
    right_terms(im.static_off_adj_rows, r, c, n, with(-minus_i));
    for (const auto& l : im.jumps) jump_terms(l, r, c, n, with(1.0));
  });
  std::vector<SpRow> g_ctrl;
  for (std::size_t j = 0; j < im.ctrl_off.size(); ++j) {
    g_ctrl.push_back(build([&](Index r, Index c, auto with) {
      left_terms(im.ctrl_off[j], r, c, n, with(minus_i));
      right_terms(im.ctrl_off_rows[j], r, c, n, with(-minus_i));
    }));
  }

  MatrixXcd y(m, idx(xs.size()));
  for (std::size_t b = 0; b < xs.size(); ++b)
    for (Index k = 0; k < m; ++k) {
      const Index v = support[static_cast<std::size_t>(k)];
      y(k, idx(b)) = xs[b](v % n, v / n);
    }

  VectorXcd e_half(m), e_full(m);
  for (std::size_t step = 0; step < pulses.n_steps(); ++step) {
    VectorXcd d = im.h0_diag - cplx(0.0, 1.0) * im.decay_diag;
    SpRow g = g_static;
    double vnorm = im.h0_off_norm;
    for (std::size_t j = 0; j < im.ctrl_diag.size(); ++j) {
      const double e = pulses.amplitudes(idx(j), idx(step));
      if (e == 0.0) continue;
      d += e * im.ctrl_diag[j];
      if (g_ctrl[j].nonZeros() > 0) g += e * g_ctrl[j];
      vnorm += std::abs(e) * im.ctrl_off_norm[j];
    }
    const double rate = vnorm + im.dissipation_norm;
    const auto n_sub = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(pulses.dt * rate / im.options.max_phase)));
    const double h = pulses.dt / static_cast<double>(n_sub);

    // Integrating factors exp(−i(D_r − conj(D_c))τ) for τ = h/2 and h.
    for (Index k = 0; k < m; ++k) {
      const Index v = support[static_cast<std::size_t>(k)];
      const cplx w = minus_i * (d(v % n) - std::conj(d(v / n)));
      e_half(k) = std::exp(w * (0.5 * h));
      e_full(k) = e_half(k) * e_half(k);
    }
    const auto eh = e_half.asDiagonal();
    const auto ef = e_full.asDiagonal();
    for (std::size_t s = 0; s < n_sub; ++s) {
      const MatrixXcd k1 = g * y;
      const MatrixXcd yh = eh * y;
      const MatrixXcd k2 = g * (yh + (0.5 * h) * (eh * k1));
      const MatrixXcd k3 = g * (yh + (0.5 * h) * k2);
      const MatrixXcd k4 = g * (ef * y + h * (eh * k3));
      y = ef * y + (h / 6.0) * (ef * k1 + 2.0 * (eh * (k2 + k3)) + k4);
    }
  }

  for (std::size_t b = 0; b < xs.size(); ++b) {
    xs[b].setZero();
    for (Index k = 0; k < m; ++k) {
      const Index v = support[static_cast<std::size_t>(k)];
      xs[b](v % n, v / n) = y(k, idx(b));
    }
  }

  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double drift = std::abs(xs[i].trace() - trace0[i]);
    if (drift > im.options.trace_tolerance * std::max(scale, 1e-300)) {
      std::ostringstream msg;
      msg << "Lindblad integration lost trace (drift " << drift
          << "); reduce LindbladOptions::max_phase to shorten the substeps";
      throw NumericalError(msg.str());
    }
  }
}

DensityMatrix lindblad_evolve(const Operator& h0, const std::vector<Operator>& controls, const PulseSet& pulses,
                              const std::vector<Operator>& collapse, const DensityMatrix& rho0,
                              LindbladOptions options) {
  if (rho0.size() != h0.size()) throw DimensionError("lindblad_evolve: state dimension mismatch");
  LindbladSolver solver(h0, controls, collapse, options);
  std::vector<MatrixXcd> xs{rho0.matrix()};
  solver.evolve(xs, pulses);
  const MatrixXcd herm = 0.5 * (xs[0] + xs[0].adjoint());
  return {rho0.dims(), herm, 1e-8};
}

}  // namespace bincz

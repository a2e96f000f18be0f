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

#include "bincz/grape.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "bincz/errors.hpp"

namespace bincz {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

namespace {

Index idx(std::size_t i) { return static_cast<Index>(i); }

void require_dims(const Dims& dims, std::size_t n_modes, const std::vector<std::size_t>& cavities,
                  const std::vector<std::size_t>& qubits, const char* what) {
  if (dims.size() != n_modes) throw DimensionError(std::string(what) + ": wrong number of modes");
  for (auto c : cavities)
    if (dims[c] < 5) throw DimensionError(std::string(what) + ": cavity truncation must be >= 5");
  for (auto q : qubits)
    if (dims[q] != 2) throw DimensionError(std::string(what) + ": qubit modes must have dim 2");
}

// Logical-basis coefficients of a label after R_y(π/2) = [[1, −1], [1, 1]]/√2.
std::array<cplx, 2> ry_half_pi(const std::array<cplx, 2>& c) {
  const double r = std::numbers::sqrt2 / 2.0;
  return {r * (c[0] - c[1]), r * (c[0] + c[1])};
}

StateVector logical_from(const std::array<cplx, 2>& c, std::size_t dim) {
  return logical_state(LogicalLabel::g, dim) * c[0] + logical_state(LogicalLabel::e, dim) * c[1];
}

StateVector cz_product(LogicalLabel m, LogicalLabel n, const Dims& dims) {
  return tensor({logical_state(m, dims[0]), fock_state(2, 0), logical_state(n, dims[2])});
}

}  // namespace

// ---------------------------------------------------------------------------
// Constraint sets

ConstraintSet::ConstraintSet(std::string name, std::vector<ConstraintPair> pairs)
    : name_(std::move(name)), pairs_(std::move(pairs)) {
  if (pairs_.empty()) throw std::invalid_argument("constraint set must not be empty");
  const auto& d = pairs_.front().initial.dims();
  for (const auto& p : pairs_) {
    if (p.initial.dims() != d || p.target.dims() != d) throw DimensionError("constraint states must share dims");
    if (!(p.weight > 0)) throw std::invalid_argument("constraint weights must be positive");
    if (std::abs(p.initial.norm() - 1.0) > 1e-10 || std::abs(p.target.norm() - 1.0) > 1e-10) {
      throw std::invalid_argument("constraint states must be normalized");
    }
  }
}

double ConstraintSet::total_weight() const {
  double w = 0.0;
  for (const auto& p : pairs_) w += p.weight;
  return w;
}

ConstraintSet ConstraintSet::restricted(const std::vector<std::size_t>& indices) const {
  auto restrict = [&](const StateVector& s) {
    VectorXcd v(idx(indices.size()));
    for (std::size_t i = 0; i < indices.size(); ++i) v(idx(i)) = s[indices[i]];
    if (std::abs(v.norm() - 1.0) > 1e-12) throw DimensionError("state has weight outside the restricted subspace");
    return StateVector({indices.size()}, v);
  };
  std::vector<ConstraintPair> out;
  for (const auto& p : pairs_) out.push_back({restrict(p.initial), restrict(p.target), p.weight});
  return {name_, std::move(out)};
}

ConstraintSet ConstraintSet::with_target_phase(cplx phase) const {
  std::vector<ConstraintPair> out;
  for (const auto& p : pairs_) out.push_back({p.initial, p.target * phase, p.weight});
  return {name_, std::move(out)};
}

MatrixXcd ConstraintSet::initial_matrix() const {
  MatrixXcd m(idx(pairs_.front().initial.size()), idx(pairs_.size()));
  for (std::size_t k = 0; k < pairs_.size(); ++k) m.col(idx(k)) = pairs_[k].initial.amplitudes();
  return m;
}

MatrixXcd ConstraintSet::target_matrix() const {
  MatrixXcd m(idx(pairs_.front().target.size()), idx(pairs_.size()));
  for (std::size_t k = 0; k < pairs_.size(); ++k) m.col(idx(k)) = pairs_[k].target.amplitudes();
  return m;
}

VectorXd ConstraintSet::weights() const {
  VectorXd w(idx(pairs_.size()));
  for (std::size_t k = 0; k < pairs_.size(); ++k) w(idx(k)) = pairs_[k].weight;
  return w;
}

MatrixXcd logical_cz(const Dims& dims) {
  require_dims(dims, 3, {0, 2}, {1}, "logical_cz");
  const auto n = product(dims);
  MatrixXcd u = MatrixXcd::Identity(idx(n), idx(n));
  for (std::size_t q = 0; q < 2; ++q) {
    const std::size_t i = (2 * 2 + q) * dims[2] + 2;
    u(idx(i), idx(i)) = -1.0;
  }
  return u;
}

MatrixXcd logical_hadamard_s2(const Dims& dims) {
  require_dims(dims, 3, {0, 2}, {1}, "logical_hadamard_s2");
  std::vector<VectorXcd> in, out;
  for (auto a : {LogicalLabel::g, LogicalLabel::e})
    for (auto b : {LogicalLabel::g, LogicalLabel::e}) {
      in.push_back(cz_product(a, b, dims).amplitudes());
      out.push_back(
          tensor({logical_state(a, dims[0]), fock_state(2, 0), logical_from(ry_half_pi(label_coefficients(b)), dims[2])})
              .amplitudes());
    }
  return complete_unitary(in, out);
}

MatrixXcd logical_encoder(const Dims& dims) {
  require_dims(dims, 4, {1, 2}, {0, 3}, "logical_encoder");
  std::vector<VectorXcd> in, out;
  for (auto a : {LogicalLabel::g, LogicalLabel::e})
    for (auto b : {LogicalLabel::g, LogicalLabel::e}) {
      in.push_back(tensor({qubit_state(a), fock_state(dims[1], 0), fock_state(dims[2], 0), qubit_state(b)}).amplitudes());
      out.push_back(tensor({qubit_state(LogicalLabel::g), logical_state(a, dims[1]), logical_state(b, dims[2]),
                            qubit_state(LogicalLabel::g)})
                        .amplitudes());
    }
  return complete_unitary(in, out);
}

ConstraintSet cz_constraints(const Dims& dims) {
  require_dims(dims, 3, {0, 2}, {1}, "cz_constraints");
  const MatrixXcd u = logical_cz(dims);
  std::vector<ConstraintPair> pairs;
  for (auto m : gate_labels)
    for (auto n : gate_labels) {
      auto s = cz_product(m, n, dims);
      pairs.push_back({s, StateVector(dims, u * s.amplitudes()), 1.0});
    }
  return {"cz", std::move(pairs)};
}

namespace {

std::vector<ConstraintPair> encode_pairs(const Dims& dims) {
  require_dims(dims, 4, {1, 2}, {0, 3}, "encode_constraints");
  std::vector<ConstraintPair> pairs;
  for (auto m : all_logical_labels)
    for (auto n : all_logical_labels) {
      auto q = tensor({qubit_state(m), fock_state(dims[1], 0), fock_state(dims[2], 0), qubit_state(n)});
      auto s = tensor({qubit_state(LogicalLabel::g), logical_state(m, dims[1]), logical_state(n, dims[2]),
                       qubit_state(LogicalLabel::g)});
      pairs.push_back({q, s, 1.0});
    }
  return pairs;
}

}  // namespace

ConstraintSet encode_constraints(const Dims& dims) { return {"encode", encode_pairs(dims)}; }

ConstraintSet decode_constraints(const Dims& dims) {
  auto pairs = encode_pairs(dims);
  for (auto& p : pairs) std::swap(p.initial, p.target);
  return {"decode", std::move(pairs)};
}

ConstraintSet hadamard_constraints(const Dims& dims, double bell_weight) {
  require_dims(dims, 3, {0, 2}, {1}, "hadamard_constraints");
  std::vector<ConstraintPair> pairs;
  for (auto m : gate_labels)
    for (auto n : gate_labels) {
      auto target = tensor({logical_state(m, dims[0]), fock_state(2, 0),
                            logical_from(ry_half_pi(label_coefficients(n)), dims[2])});
      pairs.push_back({cz_product(m, n, dims), target, 1.0});
    }
  using L = LogicalLabel;
  const auto s00 = cz_product(L::g, L::g, dims), s01 = cz_product(L::g, L::e, dims);
  const auto s10 = cz_product(L::e, L::g, dims), s11 = cz_product(L::e, L::e, dims);
  const auto initial = (s00 + s01 + s10 - s11).normalized();
  const auto target = (s01 + s10).normalized();
  pairs.push_back({initial, target, bell_weight});
  return {"hadamard", std::move(pairs)};
}

ConstraintSet single_encode_constraints(const Dims& dims) {
  require_dims(dims, 2, {1}, {0}, "single_encode_constraints");
  std::vector<ConstraintPair> pairs;
  for (auto m : all_logical_labels)
    pairs.push_back({tensor(qubit_state(m), fock_state(dims[1], 0)),
                     tensor(qubit_state(LogicalLabel::g), logical_state(m, dims[1])), 1.0});
  return {"encode1", std::move(pairs)};
}

// ---------------------------------------------------------------------------
// Cost and gradient

namespace {

struct SparseEntries {
  std::vector<Index> row, col;
  std::vector<cplx> val;
};

SparseEntries nonzeros(const MatrixXcd& m) {
  SparseEntries s;
  for (Index c = 0; c < m.cols(); ++c)
    for (Index r = 0; r < m.rows(); ++r)
      if (m(r, c) != cplx(0.0)) {
        s.row.push_back(r);
        s.col.push_back(c);
        s.val.push_back(m(r, c));
      }
  return s;
}

struct Eig {
  MatrixXcd vectors;
  VectorXd values;
};

Eig decompose(const MatrixXcd& h) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h);
  return {es.eigenvectors(), es.eigenvalues()};
}

MatrixXcd unitary_from(const Eig& e, double dt) {
  VectorXcd ph(e.values.size());
  for (Index k = 0; k < ph.size(); ++k) ph(k) = std::exp(cplx(0, -e.values(k) * dt));
  return e.vectors * ph.asDiagonal() * e.vectors.adjoint();
}

double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

void check_problem(const PulseSet& pulses, const ConstraintSet& constraints, const ControlModel& model) {
  pulses.validate();
  if (product(constraints.dims()) != model.dim()) throw DimensionError("constraint dims do not match the model");
  if (pulses.n_controls() != model.n_controls()) throw DimensionError("pulse controls do not match the model");
}

}  // namespace

CostGradient cost_and_gradient(const PulseSet& pulses, const ConstraintSet& constraints, const ControlModel& model,
                               const GrapeConfig& config) {
  check_problem(pulses, constraints, model);
  const auto n_steps = pulses.n_steps();
  const auto n_ctrl = pulses.n_controls();
  const double dt = pulses.dt;
  const double wsum = constraints.total_weight();
  const MatrixXcd psi0 = constraints.initial_matrix();
  const MatrixXcd tgt = constraints.target_matrix();
  const VectorXd w = constraints.weights();

  struct BlockWork {
    std::size_t block;
    MatrixXcd psi;      // final states
    MatrixXcd targets;  // targets restricted to the block
    std::vector<Eig> cache;
  };
  std::vector<BlockWork> work;

  // Forward pass.
  cplx overlap = 0.0;
  for (std::size_t bi = 0; bi < model.blocks().size(); ++bi) {
    const auto& rows = model.blocks()[bi].indices;
    const auto n = idx(rows.size());
    MatrixXcd p(n, psi0.cols()), t(n, tgt.cols());
    for (Index r = 0; r < n; ++r) {
      p.row(r) = psi0.row(idx(rows[r]));
      t.row(r) = tgt.row(idx(rows[r]));
    }
    if (p.cwiseAbs().maxCoeff() == 0.0 && t.cwiseAbs().maxCoeff() == 0.0) continue;
    const std::size_t bytes = n_steps * static_cast<std::size_t>(n * n + n) * sizeof(cplx);
    BlockWork bw{bi, MatrixXcd(), std::move(t), {}};
    const bool cache = bytes <= config.cache_bytes;
    if (cache) bw.cache.reserve(n_steps);
    for (std::size_t k = 0; k < n_steps; ++k) {
      Eig e = decompose(model.block_hamiltonian(bi, pulses.amplitudes.col(idx(k))));
      p = unitary_from(e, dt) * p;
      if (cache) bw.cache.push_back(std::move(e));
    }
    overlap += w.cast<cplx>().dot((bw.targets.adjoint() * p).diagonal());
    bw.psi = std::move(p);
    work.push_back(std::move(bw));
  }

  CostGradient out;
  out.overlap = overlap;
  out.infidelity = 1.0 - std::norm(overlap) / (wsum * wsum);
  out.gradient = MatrixXd::Zero(idx(n_ctrl), idx(n_steps));
  const cplx o_conj = std::conj(overlap);
  const double scale = -2.0 / (wsum * wsum);

  // Backward pass.
  for (auto& bw : work) {
    const auto& block = model.blocks()[bw.block];
    const auto n = idx(block.indices.size());
    std::vector<SparseEntries> ctrl;
    for (const auto& c : block.controls) ctrl.push_back(nonzeros(c));
    MatrixXcd psi = std::move(bw.psi);
    MatrixXcd lam = bw.targets;
    MatrixXcd lam_w = lam * w.asDiagonal();
    MatrixXcd f(n, n);
    for (std::size_t k = n_steps; k-- > 0;) {
      Eig recomputed;
      const Eig* e = nullptr;
      if (!bw.cache.empty()) {
        e = &bw.cache[k];
      } else {
        recomputed = decompose(model.block_hamiltonian(bw.block, pulses.amplitudes.col(idx(k))));
        e = &recomputed;
      }
      const MatrixXcd u = unitary_from(*e, dt);
      psi = u.adjoint() * psi;  // states before step k

      // dO_j = Tr(dU_k/dε_j · M), M = Σ_k w ψ λ†. In the eigenbasis
      // dU = V (F ∘ V†CV) V† with F the divided differences of exp(−iλdt).
      const MatrixXcd m = psi * lam_w.adjoint();
      const MatrixXcd mt = e->vectors.adjoint() * m * e->vectors;
      for (Index a = 0; a < n; ++a)
        for (Index b = 0; b < n; ++b) {
          const double la = e->values(a), lb = e->values(b);
          f(a, b) = cplx(0, -dt) * std::exp(cplx(0, -0.5 * (la + lb) * dt)) * sinc(0.5 * (la - lb) * dt);
        }
      // Σ_ab C̃_ab F_ab M̃_ba = Σ_xy C_xy G_xy with G = conj(V) (F ∘ M̃^T) V^T.
      const MatrixXcd g = e->vectors.conjugate() * f.cwiseProduct(mt.transpose()) * e->vectors.transpose();
      for (std::size_t j = 0; j < n_ctrl; ++j) {
        cplx d_o = 0.0;
        const auto& s = ctrl[j];
        for (std::size_t z = 0; z < s.val.size(); ++z) d_o += s.val[z] * g(s.row[z], s.col[z]);
        out.gradient(idx(j), idx(k)) += scale * (o_conj * d_o).real();
      }
      lam = u.adjoint() * lam;
      lam_w = lam * w.asDiagonal();
    }
  }

  double penalty = 0.0;
  if (config.lambda_amp > 0.0) {
    penalty += config.lambda_amp * pulses.amplitudes.squaredNorm() * dt;
    out.gradient += 2.0 * config.lambda_amp * dt * pulses.amplitudes;
  }
  if (config.lambda_smooth > 0.0 && n_steps > 1) {
    const MatrixXd diff = pulses.amplitudes.rightCols(idx(n_steps - 1)) - pulses.amplitudes.leftCols(idx(n_steps - 1));
    penalty += config.lambda_smooth * diff.squaredNorm();
    out.gradient.rightCols(idx(n_steps - 1)) += 2.0 * config.lambda_smooth * diff;
    out.gradient.leftCols(idx(n_steps - 1)) -= 2.0 * config.lambda_smooth * diff;
  }
  out.cost = out.infidelity + penalty;
  return out;
}

CostGradient cost_and_gradient(const PulseSet& pulses, const ConstraintSet& constraints, const Operator& h0,
                               const std::vector<Operator>& controls, const GrapeConfig& config) {
  return cost_and_gradient(pulses, constraints, ControlModel::dense(h0, controls), config);
}

std::vector<double> constraint_fidelities(const PulseSet& pulses, const ConstraintSet& constraints,
                                          const ControlModel& model) {
  check_problem(pulses, constraints, model);
  const MatrixXcd out = propagate_states(model, pulses, constraints.initial_matrix());
  const MatrixXcd tgt = constraints.target_matrix();
  std::vector<double> f;
  for (Index k = 0; k < out.cols(); ++k) f.push_back(std::norm(tgt.col(k).dot(out.col(k))));
  return f;
}

double mean_fidelity(const std::vector<double>& fidelities) {
  if (fidelities.empty()) return 0.0;
  double s = 0.0;
  for (double f : fidelities) s += f;
  return s / static_cast<double>(fidelities.size());
}

// ---------------------------------------------------------------------------
// Optimization

PulseSet initial_pulses(const std::vector<std::string>& labels, std::size_t n_steps, double dt,
                        const GrapeConfig& config) {
  auto p = PulseSet::zeros(labels, n_steps, dt);
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t half = std::max<std::size_t>(2, n_steps / 50);
  for (std::size_t j = 0; j < labels.size(); ++j) {
    std::vector<double> white(n_steps);
    for (auto& x : white) x = normal(rng);
    VectorXd smooth(idx(n_steps));
    for (std::size_t k = 0; k < n_steps; ++k) {
      double s = 0.0;
      std::size_t cnt = 0;
      for (std::size_t i = (k > half ? k - half : 0); i <= std::min(n_steps - 1, k + half); ++i, ++cnt) s += white[i];
      smooth(idx(k)) = s / static_cast<double>(cnt);
    }
    const double mean = smooth.mean();
    const double sd = std::sqrt((smooth.array() - mean).square().mean());
    if (sd > 0) smooth *= 0.01 * config.amp_max / sd;
    p.amplitudes.row(idx(j)) = smooth.cwiseMax(-config.amp_max).cwiseMin(config.amp_max).transpose();
  }
  return p;
}

GrapeResult optimize(const GrapeConfig& config, const ConstraintSet& constraints, const ControlModel& model,
                     const PulseSet& initial) {
  if (!(config.amp_max > 0)) throw std::invalid_argument("amp_max must be positive");
  if (config.lambda_amp < 0 || config.lambda_smooth < 0) throw std::invalid_argument("penalties must be >= 0");
  initial.validate(config.amp_max);
  check_problem(initial, constraints, model);
  const auto start = std::chrono::steady_clock::now();

  const Index rows = idx(initial.n_controls()), cols = idx(initial.n_steps());
  PulseSet work = initial;
  auto objective = [&](const VectorXd& x, VectorXd& grad) {
    work.amplitudes = Eigen::Map<const MatrixXd>(x.data(), rows, cols) * config.amp_max;
    const auto cg = cost_and_gradient(work, constraints, model, config);
    grad = Eigen::Map<const VectorXd>(cg.gradient.data(), cg.gradient.size()) * config.amp_max;
    return cg.cost;
  };

  OptimOptions opt;
  opt.method = config.method;
  opt.max_iters = config.max_iters;
  opt.step = config.step;
  opt.momentum = config.momentum;
  opt.convergence_tol = config.convergence_tol;
  opt.target = config.target_cost;
  opt.bound = 1.0;
  VectorXd x0 = Eigen::Map<const VectorXd>(initial.amplitudes.data(), initial.amplitudes.size()) / config.amp_max;
  auto res = minimize(objective, std::move(x0), opt);

  GrapeResult out;
  out.pulses = initial;
  out.pulses.amplitudes = Eigen::Map<const MatrixXd>(res.x.data(), rows, cols) * config.amp_max;
  out.history = std::move(res.history);
  out.reason = res.reason;
  out.iterations = res.iterations;
  out.evaluations = res.evaluations;
  out.fidelities = constraint_fidelities(out.pulses, constraints, model);
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace bincz

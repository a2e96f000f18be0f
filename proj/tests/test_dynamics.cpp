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

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "bincz/dynamics.hpp"
#include "bincz/errors.hpp"
#include "bincz/grape.hpp"
#include "bincz/units.hpp"
#include "test_util.hpp"

using namespace bincz;
using Eigen::MatrixXcd;
using std::numbers::pi;

namespace {

Operator zero_op(const Dims& d) {
  const auto n = static_cast<Eigen::Index>(product(d));
  return {d, MatrixXcd::Zero(n, n), true};
}

std::vector<Operator> qubit_controls() {
  const auto q = qubit_ops();
  return {q.sigma_x, q.sigma_y};
}

SystemSpec cz_system(std::size_t trunc = 6) { return paper_system().subsystem({"S1", "QC", "S2"}, {"QC"}).with_cavity_dim(trunc); }

PulseSet random_pulses(std::vector<std::string> labels, std::size_t steps, double dt, double amp, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amp, amp);
  auto p = PulseSet::zeros(std::move(labels), steps, dt);
  for (Eigen::Index i = 0; i < p.amplitudes.size(); ++i) p.amplitudes.data()[i] = u(rng);
  return p;
}

// Column-stacked Liouvillian of H and jumps L.
MatrixXcd liouvillian(const MatrixXcd& h, const std::vector<MatrixXcd>& ls) {
  const auto n = h.rows();
  const MatrixXcd id = MatrixXcd::Identity(n, n);
  const cplx i(0, 1);
  MatrixXcd out = -i * (testutil::kron(id, h) - testutil::kron(h.transpose(), id));
  for (const auto& l : ls) {
    const MatrixXcd ll = l.adjoint() * l;
    out += testutil::kron(l.conjugate(), l) - 0.5 * testutil::kron(id, ll) - 0.5 * testutil::kron(ll.transpose(), id);
  }
  return out;
}

MatrixXcd unvec(const Eigen::VectorXcd& v, Eigen::Index n) { return Eigen::Map<const MatrixXcd>(v.data(), n, n); }

}  // namespace

TEST(Propagator, ZeroDriveIsIdentity) {
  const auto u = propagator(zero_op({2}), qubit_controls(), PulseSet::zeros({"I", "Q"}, 10, 1e-9));
  EXPECT_LT(max_abs_diff(u.matrix(), MatrixXcd::Identity(2, 2)), 1e-14);
}

TEST(Propagator, RabiPiPulse) {
  const double omega = 2 * pi * 5e6;
  auto p = PulseSet::zeros({"I", "Q"}, 20, (pi / omega) / 20);
  p.amplitudes.row(0).setConstant(omega / 2);
  const auto psi = propagate_state(zero_op({2}), qubit_controls(), p, qubit_state(LogicalLabel::g));
  EXPECT_NEAR(std::abs(psi[1] - cplx(0, -1)), 0.0, 1e-12);
}

TEST(Propagator, TwoPiRotationGivesMinusIdentity) {
  const double omega = 2 * pi * 5e6;
  auto p = PulseSet::zeros({"I", "Q"}, 40, (2 * pi / omega) / 40);
  p.amplitudes.row(0).setConstant(omega / 2);
  const auto u = propagator(zero_op({2}), qubit_controls(), p);
  EXPECT_LT(max_abs_diff(u.matrix(), -MatrixXcd::Identity(2, 2)), 1e-12);
}

TEST(Propagator, NormPreservedAlongTrajectory) {
  const auto sys = cz_system(5);
  const auto p = random_pulses(drive_labels(sys), 50, 2e-9, units::mhz_to_rad_per_s(8), 4);
  std::vector<StateVector> traj;
  const auto psi0 = tensor({logical_state(LogicalLabel::plus, 5), qubit_state(LogicalLabel::g),
                            logical_state(LogicalLabel::plus_i, 5)});
  (void)propagate_state(build_static(sys), build_drive_ops(sys), p, psi0, &traj);
  ASSERT_EQ(traj.size(), 51u);
  for (const auto& s : traj) EXPECT_NEAR(s.norm(), 1.0, 1e-10);
}

TEST(Propagator, StepMatchesTaylorExponential) {
  const auto sys = cz_system(5);
  const auto h0 = build_static(sys);
  const auto ops = build_drive_ops(sys);
  const auto p = random_pulses(drive_labels(sys), 3, 2e-9, units::mhz_to_rad_per_s(8), 5);
  MatrixXcd want = MatrixXcd::Identity(50, 50);
  for (std::size_t k = 0; k < 3; ++k) {
    MatrixXcd h = h0.matrix();
    for (std::size_t j = 0; j < ops.size(); ++j) h += p.amplitudes(Eigen::Index(j), Eigen::Index(k)) * ops[j].matrix();
    want = testutil::expm_taylor(cplx(0, -p.dt) * h) * want;
  }
  EXPECT_LT(max_abs_diff(propagator(h0, ops, p).matrix(), want), 1e-11);
}

TEST(Sectors, ResonantTwoPiGivesPhasePiAgainstFullMatrix) {
  const auto sys = cz_system();
  const auto bs = block_decompose(sys);
  const auto p = selective_baseline(bs, 2, 2, PulseShape::square, 2e-6, 2e-9);
  const auto idx = cz_subspace_indices(sys.dims());
  const MatrixXcd u_block = propagator(ControlModel::sectors(bs), p);
  const MatrixXcd u_full = propagator(ControlModel::restricted(build_static(sys), build_drive_ops(sys), idx), p);
  EXPECT_LT(max_abs_diff(u_block, u_full), 1e-10);
  // Index 7 = |2, g, 2>, index 1 = |0, g, 2>; both relative to free evolution.
  const cplx free22 = std::exp(cplx(0, -bs.sector(2, 2).phase_rate * p.duration()));
  const cplx target = u_full(7, 7) / free22;
  EXPECT_NEAR(std::abs(std::arg(-target)), 0.0, 1e-6);
  EXPECT_NEAR(std::abs(target), 1.0, 1e-9);
}

TEST(PulseIo, RoundTripAndUnits) {
  auto p = random_pulses({"QC_I", "QC_Q"}, 7, 2e-9, 1e7, 6);
  std::stringstream ss;
  write_pulses(ss, p);
  const std::string text = ss.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "t_ns, QC_I_MHz, QC_Q_MHz");
  const auto back = read_pulses(ss);
  EXPECT_EQ(back.labels, p.labels);
  EXPECT_NEAR(back.dt, p.dt, 1e-18);
  EXPECT_LT((back.amplitudes - p.amplitudes).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(PulseIo, RejectsRaggedRows) {
  std::stringstream ss("t_ns,QC_I_MHz,QC_Q_MHz\n2,0.1,0.2\n4,0.1\n");
  EXPECT_THROW((void)read_pulses(ss), SchemaError);
}

TEST(Collapse, DephasingRateFromT1T2) {
  const auto sys = paper_system().subsystem({"S2"}, {"S2"}).with_cavity_dim(4);
  ErrorChannelSet ch;
  ch.set("S2", false, true);
  const auto ls = collapse_ops(sys, ch);
  ASSERT_EQ(ls.size(), 1u);
  const double inv_tphi = 1.0 / 219e-6 - 1.0 / (2 * 1051e-6);
  // L = √(2/Tφ) n: ⟨1|L|1⟩² = 2/Tφ.
  EXPECT_NEAR(std::norm(ls[0].matrix()(1, 1)), 2.0 * inv_tphi, 1e-6 * inv_tphi);
  EXPECT_TRUE(collapse_ops(sys, ErrorChannelSet::none()).empty());
}

TEST(Collapse, QubitRelaxationRate) {
  const auto sys = paper_system().subsystem({"QC"}, {"QC"}).with_coherence("QC", 100e-6, 150e-6);
  ErrorChannelSet ch;
  ch.set("QC", true, false);
  const auto ls = collapse_ops(sys, ch);
  ASSERT_EQ(ls.size(), 1u);
  const MatrixXcd ll = ls[0].matrix().adjoint() * ls[0].matrix();
  EXPECT_NEAR(ll(1, 1).real(), 1e4, 1e-6);
}

TEST(Lindblad, ClosedSystemMatchesUnitary) {
  const auto sys = cz_system(5);
  const auto h0 = build_static(sys);
  const auto ops = build_drive_ops(sys);
  const auto p = random_pulses(drive_labels(sys), 40, 2e-9, units::mhz_to_rad_per_s(6), 8);
  const auto psi0 = tensor({logical_state(LogicalLabel::plus, 5), qubit_state(LogicalLabel::g),
                            logical_state(LogicalLabel::minus_i, 5)});
  const auto psi = propagate_state(h0, ops, p, psi0);
  const auto rho = lindblad_evolve(h0, ops, p, {}, DensityMatrix::pure(psi0));
  EXPECT_GE(rho.fidelity(psi), 1 - 1e-9);
}

TEST(Lindblad, QubitT1Decay) {
  const auto sys = paper_system().subsystem({"QC"}, {"QC"}).with_coherence("QC", 10e-6, 20e-6);
  ErrorChannelSet ch;
  ch.set("QC", true, false);
  const double t = 7e-6;
  const auto rho = lindblad_evolve(build_static(sys), build_drive_ops(sys), PulseSet::zeros(drive_labels(sys), 100, t / 100),
                                   collapse_ops(sys, ch), DensityMatrix::pure(qubit_state(LogicalLabel::e)));
  EXPECT_NEAR(rho.matrix()(1, 1).real(), std::exp(-t / 10e-6), 1e-9);
}

TEST(Lindblad, FockCoherenceDephasing) {
  const auto sys = paper_system().subsystem({"S2"}, {"S2"}).with_cavity_dim(5);
  ErrorChannelSet ch;
  ch.set("S2", false, true);
  const double t = 50e-6;
  const double inv_tphi = 1.0 / 219e-6 - 1.0 / (2 * 1051e-6);
  const StateVector psi(Dims{5}, (fock_state(5, 0).amplitudes() + fock_state(5, 2).amplitudes()) / std::sqrt(2.0));
  // Pure dephasing only: the Kerr phase on |2> is removed by comparing moduli.
  const auto rho = lindblad_evolve(build_static(sys), build_drive_ops(sys), PulseSet::zeros(drive_labels(sys), 50, t / 50),
                                   collapse_ops(sys, ch), DensityMatrix::pure(psi));
  EXPECT_NEAR(rho.matrix()(2, 2).real(), 0.5, 1e-9);
  EXPECT_NEAR(std::abs(rho.matrix()(0, 2)), 0.5 * std::exp(-4.0 * t * inv_tphi), 1e-9);
}

TEST(Lindblad, MatchesDenseLiouvillianOracle) {
  // Qubit coupled to a 4-level cavity, drives on both, every channel on.
  const auto sys = paper_system().subsystem({"QC", "S2"}, {"QC", "S2"}).with_cavity_dim(4)
                       .with_coherence("QC", 2e-6, 3e-6).with_coherence("S2", 4e-6, 5e-6);
  const auto h0 = build_static(sys);
  const auto ops = build_drive_ops(sys);
  const auto ls = collapse_ops(sys, ErrorChannelSet::all(sys));
  const auto p = random_pulses(drive_labels(sys), 25, 4e-9, units::mhz_to_rad_per_s(10), 9);
  std::mt19937_64 rng(10);
  const MatrixXcd rho0 = testutil::random_density(8, rng);

  std::vector<MatrixXcd> lm;
  for (const auto& l : ls) lm.push_back(l.matrix());
  Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho0.data(), 64);
  for (std::size_t k = 0; k < p.n_steps(); ++k) {
    MatrixXcd h = h0.matrix();
    for (std::size_t j = 0; j < ops.size(); ++j) h += p.amplitudes(Eigen::Index(j), Eigen::Index(k)) * ops[j].matrix();
    v = testutil::expm_taylor(liouvillian(h, lm) * p.dt) * v;
  }
  const MatrixXcd want = unvec(v, 8);
  std::vector<MatrixXcd> xs = {rho0};
  LindbladSolver(h0, ops, ls).evolve(xs, p);
  EXPECT_LT(max_abs_diff(xs[0], want), 1e-8);
  EXPECT_NEAR(xs[0].trace().real(), 1.0, 1e-10);
}

TEST(Lindblad, LinearOnOffDiagonalBlocks) {
  const auto sys = paper_system().subsystem({"QC", "S2"}, {"QC"}).with_cavity_dim(4);
  const auto h0 = build_static(sys);
  const auto ops = build_drive_ops(sys);
  const auto ls = collapse_ops(sys, ErrorChannelSet::all(sys));
  const auto p = random_pulses(drive_labels(sys), 10, 2e-9, units::mhz_to_rad_per_s(10), 11);
  std::mt19937_64 rng(12);
  const MatrixXcd a = testutil::random_density(8, rng), b = testutil::random_density(8, rng);
  const MatrixXcd x = a + cplx(0.3, -0.7) * b;
  std::vector<MatrixXcd> xs = {a, b, x};
  LindbladSolver solver(h0, ops, ls);
  solver.evolve(xs, p);
  EXPECT_LT(max_abs_diff(xs[2], xs[0] + cplx(0.3, -0.7) * xs[1]), 1e-12);
}

TEST(DensityMatrixValidation, RejectsNonPhysical) {
  MatrixXcd m = MatrixXcd::Zero(2, 2);
  m(0, 0) = 1.5;
  m(1, 1) = -0.5;
  EXPECT_THROW(DensityMatrix(Dims{2}, m), NumericalError);
}

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

#include <gtest/gtest.h>

#include "bincz/errors.hpp"
#include "bincz/grape.hpp"
#include "bincz/optim.hpp"
#include "bincz/units.hpp"
#include "fd_oracle.hpp"

using namespace bincz;
using Eigen::VectorXcd;
using std::numbers::pi;

namespace {

SystemSpec cz_system(std::size_t trunc = 6) { return paper_system().subsystem({"S1", "QC", "S2"}, {"QC"}).with_cavity_dim(trunc); }

VectorXcd product_state(const std::vector<StateVector>& parts) { return tensor(parts).amplitudes(); }

const ConstraintPair* find_initial(const ConstraintSet& set, const VectorXcd& initial) {
  for (const auto& p : set.pairs())
    if ((p.initial.amplitudes() - initial).norm() < 1e-12) return &p;
  return nullptr;
}

Operator zero_qubit() { return {Dims{2}, Eigen::MatrixXcd::Zero(2, 2), true}; }

ControlModel qubit_model(const Operator& h0) {
  const auto q = qubit_ops();
  return ControlModel::dense(h0, {q.sigma_x, q.sigma_y});
}

ConstraintSet pi_transfer() {
  return ConstraintSet("pi", {{qubit_state(LogicalLabel::g), qubit_state(LogicalLabel::e)}});
}

}  // namespace

TEST(Constraints, Cardinalities) {
  EXPECT_EQ(cz_constraints({5, 2, 5}).size(), 16u);
  EXPECT_EQ(encode_constraints({2, 5, 5, 2}).size(), 36u);
  EXPECT_EQ(decode_constraints({2, 5, 5, 2}).size(), 36u);
  EXPECT_EQ(hadamard_constraints({5, 2, 5}).size(), 17u);
  EXPECT_EQ(single_encode_constraints({2, 5}).size(), 6u);
}

TEST(Constraints, CzPairs) {
  const auto cz = cz_constraints({5, 2, 5});
  const auto g = qubit_state(LogicalLabel::g);
  const auto gg = product_state({logical_state(LogicalLabel::g, 5), g, logical_state(LogicalLabel::g, 5)});
  const auto* p = find_initial(cz, gg);
  ASSERT_NE(p, nullptr);
  EXPECT_LT((p->target.amplitudes() - gg).norm(), 1e-14);
  const auto ee = product_state({logical_state(LogicalLabel::e, 5), g, logical_state(LogicalLabel::e, 5)});
  p = find_initial(cz, ee);
  ASSERT_NE(p, nullptr);
  EXPECT_LT((p->target.amplitudes() + ee).norm(), 1e-14);
  // |+_L +_L>: ⟨2|+_L⟩ = 1/√2 on each cavity, so the |2,g,2> amplitude is 1/2 before the flip.
  const auto pp = product_state({logical_state(LogicalLabel::plus, 5), g, logical_state(LogicalLabel::plus, 5)});
  const auto ucz = logical_cz({5, 2, 5});
  const VectorXcd flipped = ucz * pp;
  const auto i22 = (2 * 2 + 0) * 5 + 2;
  EXPECT_NEAR(pp(i22).real(), 0.5, 1e-14);
  EXPECT_NEAR(flipped(i22).real(), -0.5, 1e-14);
}

TEST(Constraints, EncodeDecodePairs) {
  const Dims d{2, 5, 5, 2};
  const auto enc = encode_constraints(d);
  const auto g = qubit_state(LogicalLabel::g);
  const auto e = qubit_state(LogicalLabel::e);
  const auto vac = fock_state(5, 0);
  const auto* p = find_initial(enc, product_state({g, vac, vac, g}));
  ASSERT_NE(p, nullptr);
  EXPECT_LT((p->target.amplitudes() -
             product_state({g, logical_state(LogicalLabel::g, 5), logical_state(LogicalLabel::g, 5), g}))
                .norm(),
            1e-14);
  const auto dec = decode_constraints(d);
  p = find_initial(dec, product_state({g, logical_state(LogicalLabel::e, 5), logical_state(LogicalLabel::plus_i, 5), g}));
  ASSERT_NE(p, nullptr);
  EXPECT_LT((p->target.amplitudes() - product_state({e, vac, vac, qubit_state(LogicalLabel::plus_i)})).norm(), 1e-14);
}

TEST(Constraints, HadamardPairs) {
  const auto had = hadamard_constraints({5, 2, 5});
  const auto g = qubit_state(LogicalLabel::g);
  const auto zl = logical_state(LogicalLabel::g, 5);
  const auto* p = find_initial(had, product_state({zl, g, zl}));
  ASSERT_NE(p, nullptr);
  EXPECT_LT((p->target.amplitudes() - product_state({zl, g, logical_state(LogicalLabel::plus, 5)})).norm(), 1e-14);
  const auto mi = logical_state(LogicalLabel::minus_i, 5);
  p = find_initial(had, product_state({zl, g, mi}));
  ASSERT_NE(p, nullptr);
  EXPECT_NEAR(std::abs(p->target.inner(StateVector({5, 2, 5}, product_state({zl, g, mi})))), 1.0, 1e-14);
  // Bell pair: unit norm and weight 4.
  const auto& bell = had.pairs().back();
  EXPECT_NEAR(bell.initial.norm(), 1.0, 1e-14);
  EXPECT_NEAR(bell.target.norm(), 1.0, 1e-14);
  EXPECT_EQ(bell.weight, 4.0);
}

TEST(Constraints, RestrictionRejectsOutsideWeight) {
  const auto cz = cz_constraints({6, 2, 6});
  EXPECT_EQ(cz.restricted(cz_subspace_indices({6, 2, 6})).dims(), (Dims{18}));
  std::vector<std::size_t> partial(cz_subspace_indices({6, 2, 6}));
  partial.erase(partial.begin() + 14);  // |4, g, 4> carries weight
  EXPECT_THROW((void)cz.restricted(partial), DimensionError);
}

TEST(Cost, IdealGateGivesZero) {
  // Static H = (Ω/2)σx for a π rotation: U = −iσx, so |g> -> −i|e> exactly.
  const double omega = 2 * pi * 4e6;
  const Operator h0(Dims{2}, qubit_ops().sigma_x.matrix() * (omega / 2), true);
  const auto p = PulseSet::zeros({"I", "Q"}, 25, (pi / omega) / 25);
  EXPECT_NEAR(cost_and_gradient(p, pi_transfer(), qubit_model(h0)).cost, 0.0, 1e-13);
}

TEST(Cost, OrthogonalTargetGivesOne) {
  const auto p = PulseSet::zeros({"I", "Q"}, 10, 1e-9);
  EXPECT_NEAR(cost_and_gradient(p, pi_transfer(), qubit_model(zero_qubit())).cost, 1.0, 1e-14);
}

TEST(Cost, PenaltiesAddToCost) {
  GrapeConfig cfg;
  cfg.lambda_amp = 1e-3;
  cfg.lambda_smooth = 1e-4;
  auto p = testutil::random_pulses({"I", "Q"}, 12, 2e-9, 0.5 * cfg.amp_max, 14);
  const auto plain = cost_and_gradient(p, pi_transfer(), qubit_model(zero_qubit()));
  const auto pen = cost_and_gradient(p, pi_transfer(), qubit_model(zero_qubit()), cfg);
  EXPECT_NEAR(pen.infidelity, plain.cost, 1e-14);
  EXPECT_GT(pen.cost, plain.cost);
  const auto check = testutil::check_gradient(p, pi_transfer(), qubit_model(zero_qubit()), cfg, 12, 15);
  EXPECT_LT(check.max_relative_error, 1e-6);
}

TEST(Gradient, CzSectorsMatchesFiniteDifferences) {
  const auto sys = cz_system();
  const auto cs = cz_constraints(sys.dims()).restricted(cz_subspace_indices(sys.dims()));
  GrapeConfig cfg;
  const auto p = testutil::random_pulses(drive_labels(sys), 60, 2e-9, 0.5 * cfg.amp_max, 16);
  const auto check = testutil::check_gradient(p, cs, ControlModel::sectors(block_decompose(sys)), cfg, 20, 17);
  EXPECT_LT(check.max_relative_error, 1e-6);
}

TEST(Optimize, QubitPiTransferConverges) {
  GrapeConfig cfg;
  cfg.max_iters = 200;
  const auto init = initial_pulses({"I", "Q"}, 50, 2e-9, cfg);
  const auto res = optimize(cfg, pi_transfer(), qubit_model(zero_qubit()), init);
  EXPECT_LT(res.history.back(), 1e-6);
  EXPECT_LE(res.iterations, 200u);
  for (std::size_t i = 1; i < res.history.size(); ++i) EXPECT_LE(res.history[i], res.history[i - 1]);
  EXPECT_LE(res.pulses.max_abs(), cfg.amp_max * (1 + 1e-12));
}

TEST(Optimize, SeedIsDeterministic) {
  GrapeConfig cfg;
  cfg.max_iters = 20;
  cfg.seed = 42;
  const auto sys = cz_system();
  const auto cs = cz_constraints(sys.dims()).restricted(cz_subspace_indices(sys.dims()));
  const auto model = ControlModel::sectors(block_decompose(sys));
  const auto a = optimize(cfg, cs, model, initial_pulses(drive_labels(sys), 100, 2e-9, cfg));
  const auto b = optimize(cfg, cs, model, initial_pulses(drive_labels(sys), 100, 2e-9, cfg));
  EXPECT_EQ(a.history, b.history);
  EXPECT_EQ(a.pulses.amplitudes, b.pulses.amplitudes);
}

TEST(Minimize, QuadraticAllMethods) {
  const Eigen::Vector3d c(1.0, -2.0, 0.5);
  const Objective f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    const Eigen::Vector3d w(1.0, 10.0, 100.0);
    g = (2 * w.array() * (x - c).array()).matrix();
    return (w.array() * (x - c).array().square()).sum();
  };
  for (auto m : {Method::plain, Method::momentum, Method::lbfgs}) {
    OptimOptions o;
    o.method = m;
    o.max_iters = 5000;
    o.step = 1e-3;
    const auto r = minimize(f, Eigen::VectorXd::Zero(3), o);
    EXPECT_LT((r.x - c).norm(), 1e-4) << to_string(m);
  }
}

TEST(Minimize, BoxProjection) {
  const Objective f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = 2 * (x.array() - 3.0).matrix();
    return (x.array() - 3.0).square().sum();
  };
  OptimOptions o;
  o.method = Method::lbfgs;
  o.bound = 1.0;
  const auto r = minimize(f, Eigen::VectorXd::Zero(2), o);
  EXPECT_NEAR(r.x(0), 1.0, 1e-12);
  EXPECT_NEAR(r.x(1), 1.0, 1e-12);
}

TEST(Baseline, SquareAmplitudeAndPhase) {
  const auto sys = cz_system();
  const auto bs = block_decompose(sys);
  const double t = 20e-6;
  const auto p = selective_baseline(bs, 2, 2, PulseShape::square, t, 2e-9);
  // |ε| = Ω/2 with Ω = 2π/T, up to the hold compensation factor.
  const double half = pi / t;
  const double comp = std::abs(bs.sector(2, 2).detuning) * p.dt / 2;
  const double envelope = std::hypot(p.amplitudes(0, 0), p.amplitudes(1, 0));
  EXPECT_NEAR(envelope, half * comp / std::sin(comp), 1e-9 * half);

  const auto u = propagator(ControlModel::sectors(bs), p);
  const cplx rel = u(7, 7) / std::exp(cplx(0, -bs.sector(2, 2).phase_rate * t));
  EXPECT_NEAR(std::abs(std::remainder(std::arg(rel) - pi, 2 * pi)), 0.0, 1e-6);
}

TEST(Baseline, OffTargetErrorShrinksWithDuration) {
  const auto bs = block_decompose(cz_system());
  const auto model = ControlModel::sectors(bs);
  double prev = 1.0;
  for (double t : {2e-6, 5e-6, 10e-6, 20e-6}) {
    const auto u = propagator(model, selective_baseline(bs, 2, 2, PulseShape::gaussian, t, 2e-9));
    // Sector (0,2) against its free evolution, Stark phase included.
    const auto& s = bs.sector(0, 2);
    const cplx fg = std::exp(cplx(0, -s.phase_rate * t));
    const cplx fe = std::exp(cplx(0, -(s.phase_rate + s.detuning) * t));
    const double err = 1.0 - std::abs(std::conj(fg) * u(1, 1) + std::conj(fe) * u(4, 4)) / 2;
    EXPECT_LT(err, prev) << t;
    prev = err;
  }
}

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

#include <boost/math/tools/roots.hpp>

#include "bincz/errors.hpp"
#include "bincz/grape.hpp"

namespace bincz {

using Eigen::Index;
using Eigen::MatrixXcd;

namespace {

double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

// Resonant single-tone samples for envelope `env` (peak 1) and peak Rabi
// rate `omega`.
PulseSet tone(const std::vector<double>& env, double omega, double detuning, double dt,
              const std::vector<std::string>& labels) {
  auto p = PulseSet::zeros(labels, env.size(), dt);
  // A constant amplitude held over one step averages the rotating phase
  // e^{−iΔt} down by sinc(Δ dt/2); undo that.
  const double hold = 1.0 / sinc(0.5 * detuning * dt);
  for (std::size_t k = 0; k < env.size(); ++k) {
    const double t = (static_cast<double>(k) + 0.5) * dt;
    const double a = 0.5 * omega * env[k] * hold;
    p.amplitudes(0, static_cast<Index>(k)) = a * std::cos(detuning * t);
    p.amplitudes(1, static_cast<Index>(k)) = -a * std::sin(detuning * t);
  }
  return p;
}

// Signed deviation of the sector rotation angle from 2π, read off the
// rotating-frame SU(2) propagator of that sector.
double rotation_error(const Sector& s, const PulseSet& p) {
  const auto q = qubit_ops();
  MatrixXcd h0 = MatrixXcd::Zero(2, 2);
  h0(0, 0) = s.phase_rate;
  h0(1, 1) = s.phase_rate + s.detuning;
  MatrixXcd u = MatrixXcd::Identity(2, 2);
  for (std::size_t k = 0; k < p.n_steps(); ++k) {
    const MatrixXcd h = h0 + p.amplitudes(0, static_cast<Index>(k)) * q.sigma_x.matrix() +
                        p.amplitudes(1, static_cast<Index>(k)) * q.sigma_y.matrix();
    u = expm_hermitian(h, p.dt) * u;
  }
  const double t = p.duration();
  MatrixXcd frame = MatrixXcd::Zero(2, 2);
  frame(0, 0) = std::exp(cplx(0, s.phase_rate * t));
  frame(1, 1) = std::exp(cplx(0, (s.phase_rate + s.detuning) * t));
  const MatrixXcd r = frame * u;  // cos(θ/2) I − i sin(θ/2) σx for a resonant x drive
  return std::atan2(r(1, 0).imag(), -r(0, 0).real());
}

}  // namespace

PulseSet selective_baseline(const BlockSystem& blocks, int n_a, int n_b, PulseShape shape, double duration,
                            double dt, const std::vector<std::string>& labels) {
  if (!(duration > 0) || !(dt > 0)) throw std::invalid_argument("selective_baseline: duration and dt must be positive");
  if (labels.size() != 2) throw DimensionError("selective_baseline: a coupler drive has two quadratures");
  const auto& sector = blocks.sector(n_a, n_b);
  const auto n_steps = static_cast<std::size_t>(std::llround(duration / dt));
  if (n_steps == 0) throw std::invalid_argument("selective_baseline: duration shorter than one step");
  const double t_total = static_cast<double>(n_steps) * dt;

  std::vector<double> env(n_steps, 1.0);
  if (shape == PulseShape::square) return tone(env, 2.0 * std::numbers::pi / t_total, sector.detuning, dt, labels);

  const double sigma = t_total / 6.0;
  double area = 0.0;
  for (std::size_t k = 0; k < n_steps; ++k) {
    const double x = ((static_cast<double>(k) + 0.5) * dt - 0.5 * t_total) / sigma;
    env[k] = std::exp(-0.5 * x * x);
    area += env[k] * dt;
  }
  // Area guess, then refine on the exact sector propagator.
  const double guess = 2.0 * std::numbers::pi / area;
  auto f = [&](double omega) { return rotation_error(sector, tone(env, omega, sector.detuning, dt, labels)); };
  std::uintmax_t max_iter = 100;
  const auto [lo, hi] = boost::math::tools::toms748_solve(f, 0.6 * guess, 1.4 * guess,
                                                          boost::math::tools::eps_tolerance<double>(50), max_iter);
  return tone(env, 0.5 * (lo + hi), sector.detuning, dt, labels);
}

}  // namespace bincz

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

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "bincz/errors.hpp"
#include "bincz/tomography.hpp"

namespace bincz {

using Eigen::Index;
using Eigen::Matrix4d;
using Eigen::MatrixXcd;
using Eigen::Vector4d;

BayesMatrix::BayesMatrix(const Matrix4d& m) : m_(m) {
  for (Index c = 0; c < 4; ++c) {
    if ((m.col(c).array() < -1e-12).any()) throw SchemaError("bayes", "entries must be non-negative");
    if (std::abs(m.col(c).sum() - 1.0) > 1e-9) throw SchemaError("bayes", "columns must sum to 1");
  }
}

BayesMatrix BayesMatrix::symmetric(double error) {
  if (!(error >= 0.0 && error < 0.5)) throw std::invalid_argument("BayesMatrix::symmetric: error must be in [0, 0.5)");
  Eigen::Matrix2d q;
  q << 1.0 - error, error, error, 1.0 - error;
  Matrix4d m;
  for (Index r = 0; r < 4; ++r)
    for (Index c = 0; c < 4; ++c) m(r, c) = q(r / 2, c / 2) * q(r % 2, c % 2);
  return BayesMatrix(m);
}

double BayesMatrix::condition_number() const {
  Eigen::JacobiSVD<Matrix4d> svd(m_);
  const auto& s = svd.singularValues();
  return s(3) > 0 ? s(0) / s(3) : std::numeric_limits<double>::infinity();
}

void write_bayes_csv(std::ostream& out, const BayesMatrix& b) {
  out << "measured";
  for (const auto& l : outcome_labels) out << ",prepared_" << l;
  out << '\n';
  char buf[32];
  for (Index r = 0; r < 4; ++r) {
    out << outcome_labels[static_cast<std::size_t>(r)];
    for (Index c = 0; c < 4; ++c) {
      std::snprintf(buf, sizeof buf, "%.14g", b.matrix()(r, c));
      out << ',' << buf;
    }
    out << '\n';
  }
}

BayesMatrix read_bayes_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("bayes", "empty file");
  Matrix4d m;
  for (Index r = 0; r < 4; ++r) {
    if (!std::getline(in, line)) throw SchemaError("bayes", "expected four data rows");
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    for (Index c = 0; c < 4; ++c) {
      if (!std::getline(ss, cell, ',')) throw SchemaError("bayes", "expected four columns");
      try {
        m(r, c) = std::stod(cell);
      } catch (const std::exception&) {
        throw SchemaError("bayes", "bad number '" + cell + "'");
      }
    }
  }
  return BayesMatrix(m);
}

MeasurementSetting displaced_parity_setting(const Dims& dims, cplx beta1, cplx beta2) {
  if (dims.size() != 2) throw DimensionError("displaced_parity_setting: expected two cavities");
  const DisplacedParity dp1(dims[0], std::abs(beta1));
  const DisplacedParity dp2(dims[1], std::abs(beta2));
  const std::array<MatrixXcd, 2> a = {dp1.projector(beta1, true), dp1.projector(beta1, false)};
  const std::array<MatrixXcd, 2> b = {dp2.projector(beta2, true), dp2.projector(beta2, false)};
  MeasurementSetting s;
  std::ostringstream name;
  name << "parity(" << beta1.real() << "+" << beta1.imag() << "i," << beta2.real() << "+" << beta2.imag() << "i)";
  s.name = name.str();
  const auto d1 = a[0].rows();
  const auto d2 = b[0].rows();
  for (std::size_t o = 0; o < 4; ++o) {
    const MatrixXcd& x = a[o / 2];
    const MatrixXcd& y = b[o % 2];
    MatrixXcd k(d1 * d2, d1 * d2);
    for (Index i = 0; i < d1; ++i)
      for (Index j = 0; j < d1; ++j) k.block(i * d2, j * d2, d2, d2) = x(i, j) * y;
    s.povm[o] = k;
  }
  return s;
}

namespace {

std::array<Eigen::Matrix2cd, 2> axis_projectors(char a) {
  Eigen::Vector2cd plus, minus;
  switch (a) {
    case 'X':
      plus << 1, 1;
      minus << 1, -1;
      break;
    case 'Y':
      plus << 1, cplx(0, 1);
      minus << 1, cplx(0, -1);
      break;
    case 'Z':
      plus << 1, 0;
      minus << 0, 1;
      break;
    default:
      throw std::invalid_argument(std::string("pauli_setting: unknown axis ") + a);
  }
  plus.normalize();
  minus.normalize();
  return {plus * plus.adjoint(), minus * minus.adjoint()};
}

}  // namespace

MeasurementSetting pauli_setting(char a, char b) {
  const auto pa = axis_projectors(a);
  const auto pb = axis_projectors(b);
  MeasurementSetting s;
  s.name = std::string{a, b};
  for (std::size_t o = 0; o < 4; ++o) {
    MatrixXcd k(4, 4);
    for (Index r = 0; r < 4; ++r)
      for (Index c = 0; c < 4; ++c) k(r, c) = pa[o / 2](r / 2, c / 2) * pb[o % 2](r % 2, c % 2);
    s.povm[o] = k;
  }
  return s;
}

std::vector<MeasurementSetting> pauli_settings() {
  std::vector<MeasurementSetting> out;
  for (char a : {'X', 'Y', 'Z'})
    for (char b : {'X', 'Y', 'Z'}) out.push_back(pauli_setting(a, b));
  return out;
}

Vector4d outcome_probabilities(const MatrixXcd& rho, const MeasurementSetting& setting) {
  Vector4d p;
  for (std::size_t o = 0; o < 4; ++o) {
    if (setting.povm[o].rows() != rho.rows()) throw DimensionError("outcome_probabilities: dimension mismatch");
    p(static_cast<Index>(o)) = std::max(0.0, (setting.povm[o] * rho).trace().real());
  }
  return p;
}

std::array<std::int64_t, 4> emulate_outcomes(const MatrixXcd& rho, const MeasurementSetting& setting,
                                             std::int64_t shots, const BayesMatrix& bayes, std::uint64_t seed) {
  if (shots < 0) throw std::invalid_argument("emulate_outcomes: negative shot count");
  Vector4d p = bayes.matrix() * outcome_probabilities(rho, setting);
  p /= p.sum();
  std::mt19937_64 rng(seed);
  std::array<std::int64_t, 4> counts{};
  std::int64_t left = shots;
  double mass = 1.0;
  for (std::size_t o = 0; o < 3 && left > 0; ++o) {
    const double q = mass > 0 ? std::clamp(p(static_cast<Index>(o)) / mass, 0.0, 1.0) : 0.0;
    std::binomial_distribution<std::int64_t> draw(left, q);
    counts[o] = draw(rng);
    left -= counts[o];
    mass -= p(static_cast<Index>(o));
  }
  counts[3] = left;
  return counts;
}

namespace {

// Euclidean projection onto the probability simplex.
Vector4d project_simplex(const Vector4d& v) {
  Vector4d u = v;
  std::sort(u.data(), u.data() + 4, std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (Index k = 0; k < 4; ++k) {
    cum += u(k);
    const double t = (cum - 1.0) / double(k + 1);
    if (u(k) - t > 0) theta = t;
  }
  return (v.array() - theta).max(0.0);
}

}  // namespace

BayesCorrection bayes_correct(const Vector4d& measured, const BayesMatrix& bayes) {
  const Matrix4d& b = bayes.matrix();
  BayesCorrection out;
  out.condition_number = bayes.condition_number();
  if (!std::isfinite(out.condition_number) || out.condition_number > 1e12) {
    throw NumericalError("bayes_correct: readout matrix is singular");
  }
  if ((measured.array() < 0).any() || !(measured.sum() > 0)) {
    throw std::invalid_argument("bayes_correct: measured distribution must be non-negative and non-empty");
  }
  const Vector4d m = measured / measured.sum();
  const Vector4d exact = b.partialPivLu().solve(m);
  if ((exact.array() >= -1e-15).all()) {
    out.probabilities = exact.cwiseMax(0.0) / exact.cwiseMax(0.0).sum();
    return out;
  }
  out.constrained = true;
  // Accelerated projected gradient on ½‖B p − m‖², then polish on the support.
  const Matrix4d h = b.transpose() * b;
  const double lip = Eigen::SelfAdjointEigenSolver<Matrix4d>(h).eigenvalues().maxCoeff();
  Vector4d p = project_simplex(exact), y = p;
  double t = 1.0;
  for (int it = 0; it < 20000; ++it) {
    const Vector4d next = project_simplex(y - (h * y - b.transpose() * m) / lip);
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = next + ((t - 1.0) / tn) * (next - p);
    const double moved = (next - p).cwiseAbs().maxCoeff();
    p = next;
    t = tn;
    if (moved < 1e-16) break;
  }
  // Equality-constrained least squares on the active support.
  std::vector<Index> support;
  for (Index k = 0; k < 4; ++k)
    if (p(k) > 1e-12) support.push_back(k);
  const auto s = static_cast<Index>(support.size());
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(s + 1, s + 1);
  Eigen::VectorXd rhs(s + 1);
  for (Index i = 0; i < s; ++i) {
    for (Index j = 0; j < s; ++j) kkt(i, j) = h(support[i], support[j]);
    kkt(i, s) = kkt(s, i) = 1.0;
    rhs(i) = (b.transpose() * m)(support[i]);
  }
  rhs(s) = 1.0;
  const Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
  Vector4d polished = Vector4d::Zero();
  for (Index i = 0; i < s; ++i) polished(support[i]) = sol(i);
  if ((polished.array() >= 0).all() && (b * polished - m).norm() <= (b * p - m).norm() + 1e-15) p = polished;
  out.probabilities = p;
  return out;
}

BayesCorrection bayes_correct(const std::array<std::int64_t, 4>& counts, const BayesMatrix& bayes) {
  Vector4d m;
  for (std::size_t k = 0; k < 4; ++k) m(static_cast<Index>(k)) = static_cast<double>(counts[k]);
  return bayes_correct(m, bayes);
}

}  // namespace bincz

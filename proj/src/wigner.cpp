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
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>

#include "bincz/diagnostics.hpp"
#include "bincz/errors.hpp"
#include "bincz/tomography.hpp"

namespace bincz {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

constexpr std::size_t max_working_dim = 400;

std::size_t working_dim_for(std::size_t dim, double max_abs_beta) {
  const double reach = max_abs_beta + std::sqrt(static_cast<double>(dim)) + 5.0;
  const auto w = static_cast<std::size_t>(std::ceil(reach * reach));
  return std::max(dim + 10, std::min(w, max_working_dim));
}

}  // namespace

DisplacedParity::DisplacedParity(std::size_t dim, double max_abs_beta)
    : dim_(dim), working_(working_dim_for(dim, max_abs_beta)), max_abs_beta_(max_abs_beta) {
  if (dim == 0) throw DimensionError("DisplacedParity: dim must be positive");
  const double reach = max_abs_beta + std::sqrt(static_cast<double>(dim)) + 5.0;
  if (reach * reach > static_cast<double>(working_)) {
    std::ostringstream msg;
    msg << "DisplacedParity: |beta| up to " << max_abs_beta << " needs more than " << working_
        << " working levels; values may be distorted";
    warn(msg.str());
  }
  const auto n = static_cast<Index>(working_);
  MatrixXcd x = MatrixXcd::Zero(n, n);
  for (Index k = 1; k < n; ++k) {
    const double s = std::sqrt(static_cast<double>(k));
    x(k, k - 1) = cplx(0, s);
    x(k - 1, k) = cplx(0, -s);
  }
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(x);
  vectors_ = es.eigenvectors();
  values_ = es.eigenvalues();
}

MatrixXcd DisplacedParity::displaced_rows(cplx beta) const {
  if (std::abs(beta) > max_abs_beta_ + 1e-12) {
    std::ostringstream msg;
    msg << "DisplacedParity: |beta| = " << std::abs(beta) << " exceeds the prepared range " << max_abs_beta_;
    warn(msg.str());
  }
  const double r = std::abs(beta);
  const double theta = std::arg(beta);
  const auto n = static_cast<Index>(working_);
  const auto d = static_cast<Index>(dim_);
  VectorXcd phase(n);
  for (Index k = 0; k < n; ++k) phase(k) = std::exp(cplx(0, -r * values_(k)));
  MatrixXcd rows = (vectors_.topRows(d) * phase.asDiagonal()) * vectors_.adjoint();
  // exp(iθn) D(r) exp(−iθn)
  for (Index i = 0; i < d; ++i) rows.row(i) *= std::exp(cplx(0, theta * double(i)));
  for (Index j = 0; j < n; ++j) rows.col(j) *= std::exp(cplx(0, -theta * double(j)));
  return rows;
}

MatrixXcd DisplacedParity::operator()(cplx beta) const {
  const MatrixXcd rows = displaced_rows(beta);
  Eigen::VectorXd par(rows.cols());
  for (Index k = 0; k < par.size(); ++k) par(k) = (k % 2 == 0) ? 1.0 : -1.0;
  return rows * par.asDiagonal() * rows.adjoint();
}

MatrixXcd DisplacedParity::projector(cplx beta, bool even) const {
  const MatrixXcd rows = displaced_rows(beta);
  Eigen::VectorXd keep(rows.cols());
  for (Index k = 0; k < keep.size(); ++k) keep(k) = ((k % 2 == 0) == even) ? 1.0 : 0.0;
  return rows * keep.asDiagonal() * rows.adjoint();
}

std::vector<cplx> square_grid(double extent, double step) {
  if (!(step > 0) || !(extent >= 0)) throw std::invalid_argument("square_grid: need step > 0 and extent >= 0");
  const auto n = static_cast<long>(std::floor(extent / step + 1e-9));
  std::vector<cplx> pts;
  for (long iy = -n; iy <= n; ++iy)
    for (long ix = -n; ix <= n; ++ix) pts.emplace_back(double(ix) * step, double(iy) * step);
  return pts;
}

namespace {

double max_abs(const std::vector<cplx>& v) {
  double m = 0.0;
  for (auto b : v) m = std::max(m, std::abs(b));
  return m;
}

}  // namespace

WignerGrid wigner_single(const MatrixXcd& rho, const std::vector<cplx>& points, const std::string& mode) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) throw DimensionError("wigner_single: rho must be square");
  const DisplacedParity dp(static_cast<std::size_t>(rho.rows()), max_abs(points));
  WignerGrid g{{mode}, points, std::vector<cplx>(points.size()), {}};
  g.values.reserve(points.size());
  for (auto b : points) {
    g.values.push_back(2.0 / std::numbers::pi * (rho * dp(b)).trace().real());
  }
  return g;
}

WignerGrid wigner_joint(const MatrixXcd& rho, const Dims& dims, const std::vector<cplx>& beta1,
                        const std::vector<cplx>& beta2, const std::vector<std::string>& modes) {
  if (dims.size() != 2) throw DimensionError("wigner_joint: expected two modes");
  if (static_cast<std::size_t>(rho.rows()) != product(dims) || rho.rows() != rho.cols()) {
    throw DimensionError("wigner_joint: rho does not match dims");
  }
  if (beta1.size() != beta2.size()) throw DimensionError("wigner_joint: beta lists differ in length");
  const DisplacedParity dp1(dims[0], max_abs(beta1));
  const DisplacedParity dp2(dims[1], max_abs(beta2));
  const auto d1 = static_cast<Index>(dims[0]);
  const auto d2 = static_cast<Index>(dims[1]);
  WignerGrid g{modes, beta1, beta2, {}};
  g.values.reserve(beta1.size());
  for (std::size_t k = 0; k < beta1.size(); ++k) {
    const MatrixXcd a = dp1(beta1[k]);
    const MatrixXcd b = dp2(beta2[k]);
    // Tr[ρ (A ⊗ B)] = Σ ρ_{(i,j),(k,l)} A_{k,i} B_{l,j}
    cplx tr = 0.0;
    for (Index i = 0; i < d1; ++i)
      for (Index kk = 0; kk < d1; ++kk) {
        const cplx aki = a(kk, i);
        if (aki == 0.0) continue;
        tr += aki * (rho.block(i * d2, kk * d2, d2, d2).transpose().cwiseProduct(b)).sum();
      }
    g.values.push_back(4.0 / (std::numbers::pi * std::numbers::pi) * tr.real());
  }
  return g;
}

WignerCuts wigner_cross_sections(const MatrixXcd& rho, const Dims& dims, const std::vector<cplx>& sweep, cplx fixed,
                                 const std::vector<double>& axis, const std::vector<std::string>& modes) {
  const std::vector<cplx> fixed_list(sweep.size(), fixed);
  std::vector<cplx> re, im;
  for (double x : axis) {
    re.emplace_back(x, 0.0);
    im.emplace_back(0.0, x);
  }
  return WignerCuts{wigner_joint(rho, dims, sweep, fixed_list, modes), wigner_joint(rho, dims, fixed_list, sweep, modes),
                    wigner_joint(rho, dims, re, re, modes), wigner_joint(rho, dims, im, im, modes)};
}

void write_wigner_csv(std::ostream& out, const WignerGrid& grid) {
  out << "re_b1,im_b1,re_b2,im_b2,W\n";
  char buf[160];
  for (std::size_t k = 0; k < grid.values.size(); ++k) {
    const cplx b2 = k < grid.beta2.size() ? grid.beta2[k] : cplx{};
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g,%.12g\n", grid.beta1[k].real(), grid.beta1[k].imag(),
                  b2.real(), b2.imag(), grid.values[k]);
    out << buf;
  }
}

}  // namespace bincz

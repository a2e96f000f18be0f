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
#include <string>

#include <gtest/gtest.h>

#include "bincz/errors.hpp"
#include "bincz/hamiltonian.hpp"
#include "bincz/units.hpp"

using namespace bincz;
using units::mhz_to_rad_per_s;

namespace {

const char* kTwoMode = R"(
[[mode]]
label = "C"
kind = "cavity"
dim = 3
freq_GHz = 5.0
self_kerr_MHz = 0
T1_us = 100
T2_us = 100

[[mode]]
label = "Q"
kind = "qubit"
dim = 2
freq_GHz = 4.0
T1_us = 50
T2_us = 40

[[coupling]]
a = "C"
b = "Q"
chi_MHz = 1.0

[drives]
targets = ["Q"]
)";

std::size_t index_of(const Dims& dims, const std::vector<std::size_t>& digits) {
  std::size_t idx = 0;
  for (std::size_t m = 0; m < dims.size(); ++m) idx = idx * dims[m] + digits[m];
  return idx;
}

SystemSpec cz_system(std::size_t trunc = 6) { return paper_system().subsystem({"S1", "QC", "S2"}, {"QC"}).with_cavity_dim(trunc); }

}  // namespace

TEST(Profile, TableValues) {
  const auto sys = paper_system();
  EXPECT_NEAR(units::rad_per_s_to_mhz(sys.chi("S1", "QC")), 0.594, 1e-12);
  EXPECT_NEAR(units::rad_per_s_to_mhz(sys.chi("S2", "QC")), 3.104, 1e-12);
  EXPECT_NEAR(units::rad_per_s_to_mhz(sys.chi("S1", "S2")), 0.00955, 1e-12);
  EXPECT_NEAR(units::rad_per_s_to_mhz(sys.mode("S2").self_kerr), 0.02810, 1e-12);
  EXPECT_NEAR(sys.mode("S2").T2, 219e-6, 1e-15);
  EXPECT_EQ(sys.size(), 5u);
  EXPECT_EQ(sys.modes()[2].label, "QC");
}

TEST(Profile, MissingT1NamesField) {
  std::string doc = kTwoMode;
  doc.erase(doc.find("T1_us = 50"), std::string("T1_us = 50").size());
  try {
    (void)load_system(doc);
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_NE(e.field().find("T1"), std::string::npos) << e.field();
  }
}

TEST(Profile, RejectsUnknownCouplingLabel) {
  std::string doc = kTwoMode;
  doc.replace(doc.find("b = \"Q\""), 7, "b = \"X\"");
  EXPECT_THROW((void)load_system(doc), SchemaError);
}

TEST(Profile, RejectsT2AboveTwiceT1) {
  std::string doc = kTwoMode;
  doc.replace(doc.find("T2_us = 40"), 10, "T2_us = 101");
  EXPECT_THROW((void)load_system(doc), SchemaError);
}

TEST(Static, DispersiveShiftOnTwoModes) {
  const auto sys = load_system(kTwoMode);
  const auto h = build_static(sys).matrix();
  const auto i = static_cast<Eigen::Index>(index_of(sys.dims(), {2, 1}));
  EXPECT_NEAR(h(i, i).real(), -2.0 * mhz_to_rad_per_s(1.0), 1e-6);
}

TEST(Static, CzDiagonalMatchesTermList) {
  // Each cross-Kerr and self-Kerr term evaluated by hand on |2, e, 2>.
  const double chi_aq = 0.594, chi_bq = 3.104, chi_ab = 0.00955, ka = 0.00232, kb = 0.02810;
  const double by_terms = -(chi_aq * 2 * 1 + chi_bq * 2 * 1 + chi_ab * 2 * 2) - 0.5 * ka * 2 * 1 - 0.5 * kb * 2 * 1;
  EXPECT_NEAR(by_terms, -7.46462, 1e-12);
  const auto sys = cz_system();
  const auto h = build_static(sys).matrix();
  const auto i = static_cast<Eigen::Index>(index_of(sys.dims(), {2, 1, 2}));
  EXPECT_NEAR(units::rad_per_s_to_mhz(h(i, i).real()), by_terms, 1e-12);
}

TEST(Static, Hermitian) {
  for (std::size_t t : {5, 7}) {
    const auto h = build_static(paper_system().with_cavity_dim(t)).matrix();
    EXPECT_LT((h - h.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Drives, Operators) {
  const auto sys = load_system(kTwoMode);
  const auto ops = build_drive_ops(sys);
  ASSERT_EQ(ops.size(), 2u);
  const auto q = qubit_ops();
  EXPECT_LT((ops[0].matrix() - embed(q.sigma_x, sys.dims(), 1).matrix()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((ops[1].matrix() - embed(q.sigma_y, sys.dims(), 1).matrix()).cwiseAbs().maxCoeff(), 1e-15);

  const auto cav = load_system(kTwoMode).with_drives({"C"});
  const auto cops = build_drive_ops(cav);
  const auto ci = embed(annihilation(3), cav.dims(), 0).matrix();
  const Eigen::MatrixXcd x = ci + ci.adjoint();
  EXPECT_LT((cops[0].matrix() - x).cwiseAbs().maxCoeff(), 1e-15);
  const auto a = annihilation(3).matrix();
  const Eigen::MatrixXcd ii = a + a.adjoint();
  EXPECT_EQ(ii(0, 1), cplx(1.0));
  EXPECT_EQ(ii(1, 0), cplx(1.0));

  EXPECT_EQ(build_drive_ops(load_system(kTwoMode).with_drives({"C", "Q"})).size(), 4u);
  EXPECT_EQ(drive_labels(cav), (std::vector<std::string>{"C_I", "C_Q"}));
}

TEST(Blocks, SectorDetuningAgainstFullMatrix) {
  const auto sys = cz_system();
  const auto bs = block_decompose(sys);
  EXPECT_NEAR(units::rad_per_s_to_mhz(bs.sector(2, 2).detuning), -7.396, 1e-12);
  EXPECT_EQ(bs.sector(0, 0).detuning, 0.0);
  EXPECT_EQ(bs.sector(0, 0).phase_rate, 0.0);
  EXPECT_EQ(bs.sectors.size(), 9u);
  // Cross-check every sector against eigenvalue differences of H0.
  const auto h = build_static(sys).matrix();
  for (const auto& s : bs.sectors) {
    const auto ng = static_cast<std::size_t>(s.n_a), nb = static_cast<std::size_t>(s.n_b);
    const auto ig = static_cast<Eigen::Index>(index_of(sys.dims(), {ng, 0, nb}));
    const auto ie = static_cast<Eigen::Index>(index_of(sys.dims(), {ng, 1, nb}));
    EXPECT_NEAR(s.detuning, (h(ie, ie) - h(ig, ig)).real(), 1e-6);
    EXPECT_NEAR(s.phase_rate, h(ig, ig).real(), 1e-6);
  }
}

TEST(Blocks, SubspaceIndicesLayout) {
  const auto idx = cz_subspace_indices({6, 2, 6});
  ASSERT_EQ(idx.size(), 18u);
  EXPECT_EQ(idx[7], index_of({6, 2, 6}, {2, 0, 2}));
  EXPECT_EQ(idx[10], index_of({6, 2, 6}, {2, 1, 2}));
}

TEST(Blocks, RequiresCouplerOnlyDrive) {
  EXPECT_THROW(block_decompose(paper_system().subsystem({"S1", "QC", "S2"}, {"QC", "S2"}).with_cavity_dim(6)),
               SchemaError);
}

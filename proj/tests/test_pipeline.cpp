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
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>

#include <gtest/gtest.h>

#include "json.hpp"

#include "bincz/pipeline.hpp"
#include "bincz/units.hpp"

using namespace bincz;
using std::numbers::pi;

namespace {

SystemSpec full_system(std::size_t trunc) { return paper_system().with_cavity_dim(trunc); }

std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("bincz_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

// CZ pulses on the sector model, cached across tests.
const PulseSet& cz_pulses() {
  static const PulseSet pulses = [] {
    const auto sys = paper_system().subsystem(gate_modes, {"QC"}).with_cavity_dim(6);
    GrapeConfig cfg;
    cfg.method = Method::lbfgs;
    cfg.max_iters = 300;
    const auto cs = cz_constraints(sys.dims()).restricted(cz_subspace_indices(sys.dims()));
    return optimize(cfg, cs, ControlModel::sectors(block_decompose(sys)),
                    initial_pulses(drive_labels(sys), 500, 2e-9, cfg))
        .pulses;
  }();
  return pulses;
}

}  // namespace

TEST(Report, JsonAndLookup) {
  ExperimentReport r;
  r.experiment = "x";
  r.config = {{"a", "1"}};
  r.scalars = {{"F", 0.5}};
  EXPECT_EQ(r.scalar("F"), 0.5);
  EXPECT_THROW((void)r.scalar("G"), std::out_of_range);
  const auto j = nlohmann::json::parse(r.to_json());
  EXPECT_EQ(j["experiment"], "x");
  EXPECT_EQ(j["scalars"]["F"], 0.5);
  const auto dir = scratch_dir("report");
  r.write(dir.string());
  EXPECT_TRUE(std::filesystem::exists(dir / "report.json"));
}

TEST(Qpt, IdealIdentityWithPostselection) {
  const auto sys = full_system(6);
  QptOptions o;
  o.gate = QptGate::identity;
  o.postselect = true;
  const auto r = run_qpt(sys, ideal_encode(sys), ideal_decode(sys), std::nullopt, o);
  EXPECT_NEAR(r.scalar("F_reference"), 1.0, 1e-8);
  EXPECT_NEAR(r.scalar("success_probability_reference"), 1.0, 1e-10);
}

TEST(Qpt, DrivenCzStageWithSpectators) {
  // Optimized CZ pulses inside the full system with ideal encode/decode.
  const auto sys = full_system(6);
  QptOptions o;
  o.gate = QptGate::cz;
  const auto cz = Stage::driven("cz", gate_modes, cz_pulses());
  const auto r = run_qpt(sys, ideal_encode(sys), ideal_decode(sys), cz, o);
  // Spectator χ couplings of Q1 and Q2 are only present here, so this is the
  // design target rather than an exact identity.
  EXPECT_GE(r.scalar("F_normalized"), 0.99);
}

TEST(Budget, ControlRowMatchesNoiselessPtm) {
  const auto sys = paper_system();
  BudgetOptions o;
  const auto rows = run_error_budget(sys, cz_pulses(), o);
  ASSERT_EQ(rows.size(), 8u);
  EXPECT_EQ(rows.front().label, "control infidelity");
  EXPECT_EQ(rows.back().label, "all channels");
  const auto gate = sys.subsystem(gate_modes, {"QC"}).with_cavity_dim(6);
  const auto ptm = encoded_cz_ptm(gate, Stage::driven("cz", gate_modes, cz_pulses()), ErrorChannelSet::none());
  Eigen::Matrix4cd u = Eigen::Matrix4cd::Identity();
  u(3, 3) = -1;
  EXPECT_NEAR(rows.front().infidelity, 1.0 - process_fidelity(ptm, unitary_ptm(u)), 1e-12);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_GE(rows[i].cumulative, rows[i - 1].cumulative - 1e-12);
}

TEST(Bell, EncodeLeavesProductState) {
  const auto sys = full_system(6);
  BellOptions o;
  o.wigner_extent = 1.0;
  o.wigner_step = 0.25;
  const auto r = run_bell(sys, ideal_encode(sys), ideal_cz(sys), ideal_hadamard(sys), o);
  ASSERT_EQ(r.wigner.size(), 3u);
  EXPECT_NEAR(r.bell_fidelity, 1.0, 1e-8);
  const auto& enc = r.wigner[0];
  // W(x, x) · W(0, 0) = W(x, 0) · W(0, x) for a product state; sweeps run over
  // the square grid, so pick its real-axis points.
  double w00 = 0.0;
  for (std::size_t k = 0; k < enc.sweep_beta1.beta1.size(); ++k)
    if (enc.sweep_beta1.beta1[k] == cplx(0.0)) w00 = enc.sweep_beta1.values[k];
  EXPECT_NEAR(w00, 4 / (pi * pi), 1e-9);
  std::size_t checked = 0;
  for (std::size_t c = 0; c < enc.real_cut.beta1.size(); ++c) {
    const cplx x = enc.real_cut.beta1[c];
    for (std::size_t k = 0; k < enc.sweep_beta1.beta1.size(); ++k) {
      if (std::abs(enc.sweep_beta1.beta1[k] - x) > 1e-12) continue;
      EXPECT_NEAR(enc.real_cut.values[c] * w00, enc.sweep_beta1.values[k] * enc.sweep_beta2.values[k], 1e-9);
      ++checked;
    }
  }
  EXPECT_GT(checked, 3u);
}

TEST(Cli, ExitCodes) {
  const std::string exe = BINCZ_CLI_PATH;
  const auto out = scratch_dir("cli");
  auto run = [&](const std::string& args) {
    const int status = std::system((exe + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
  };
  EXPECT_EQ(run("wigner --state fock:1 --extent 1 --step 0.5 --out " + out.string()), 0);
  EXPECT_TRUE(std::filesystem::exists(out / "wigner.csv"));
  EXPECT_EQ(run("qpt --ideal --channels X:T1 --out " + out.string()), 2);
  EXPECT_EQ(run("qpt --pulses /nonexistent --out " + out.string()), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("optimize cz --method sideways --out " + out.string()), 2);
}

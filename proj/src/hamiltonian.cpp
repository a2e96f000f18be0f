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

#include "bincz/hamiltonian.hpp"

#include "bincz/errors.hpp"

namespace bincz {

using Eigen::Index;
using Eigen::MatrixXcd;

namespace {

// Occupation N of a mode at level k: n for cavities, |e><e| for qubits.
double occupation(const ModeSpec& m, std::size_t k) {
  return m.kind == ModeKind::cavity ? static_cast<double>(k) : (k == 1 ? 1.0 : 0.0);
}

}  // namespace

Operator build_static(const SystemSpec& system) {
  const auto dims = system.dims();
  const auto n = product(dims);
  const auto& modes = system.modes();

  struct Pair {
    std::size_t a, b;
    double chi;
  };
  std::vector<Pair> pairs;
  for (const auto& c : system.couplings())
    pairs.push_back({system.index_of(c.a), system.index_of(c.b), c.chi});

  MatrixXcd h = MatrixXcd::Zero(static_cast<Index>(n), static_cast<Index>(n));
  std::vector<std::size_t> digits(dims.size());
  for (std::size_t idx = 0; idx < n; ++idx) {
    std::size_t rem = idx;
    for (std::size_t m = dims.size(); m-- > 0;) {
      digits[m] = rem % dims[m];
      rem /= dims[m];
    }
    double e = 0.0;
    for (std::size_t m = 0; m < modes.size(); ++m) {
      if (modes[m].kind == ModeKind::cavity) {
        const double k = static_cast<double>(digits[m]);
        e -= 0.5 * modes[m].self_kerr * k * (k - 1.0);
      }
    }
    for (const auto& p : pairs)
      e -= p.chi * occupation(modes[p.a], digits[p.a]) * occupation(modes[p.b], digits[p.b]);
    h(static_cast<Index>(idx), static_cast<Index>(idx)) = e;
  }
  return {dims, std::move(h), true};
}

std::vector<Operator> build_drive_ops(const SystemSpec& system) {
  if (system.drive_targets().empty()) throw SchemaError("drives.targets", "no drive targets");
  const auto dims = system.dims();
  std::vector<Operator> ops;
  const auto q = qubit_ops();
  for (const auto& label : system.drive_targets()) {
    const auto idx = system.index_of(label);
    const auto& m = system.modes()[idx];
    if (m.kind == ModeKind::qubit) {
      ops.push_back(embed(q.sigma_x, dims, idx));
      ops.push_back(embed(q.sigma_y, dims, idx));
    } else {
      const auto a = annihilation(m.dim).matrix();
      const MatrixXcd ad = a.adjoint();
      ops.push_back(embed(Operator({m.dim}, ad + a, true), dims, idx));
      ops.push_back(embed(Operator({m.dim}, cplx(0, 1) * (ad - a), true), dims, idx));
    }
  }
  return ops;
}

std::vector<std::string> drive_labels(const SystemSpec& system) {
  std::vector<std::string> labels;
  for (const auto& t : system.drive_targets()) {
    labels.push_back(t + "_I");
    labels.push_back(t + "_Q");
  }
  return labels;
}

std::size_t BlockSystem::index(int n_a, int n_b) const {
  auto slot = [](int n) -> std::size_t {
    if (n != 0 && n != 2 && n != 4) throw std::out_of_range("sector photon number must be 0, 2 or 4");
    return static_cast<std::size_t>(n / 2);
  };
  return slot(n_a) * 3 + slot(n_b);
}

BlockSystem block_decompose(const SystemSpec& cz_system) {
  const auto& modes = cz_system.modes();
  if (modes.size() != 3 || modes[0].kind != ModeKind::cavity || modes[1].kind != ModeKind::qubit ||
      modes[2].kind != ModeKind::cavity) {
    throw SchemaError("mode", "block decomposition needs a (cavity, qubit, cavity) system");
  }
  if (cz_system.drive_targets().size() != 1 || cz_system.drive_targets()[0] != modes[1].label) {
    throw SchemaError("drives.targets",
                      "block decomposition is only valid with the coupler as the sole drive target");
  }
  if (modes[0].dim < 5 || modes[2].dim < 5) throw DimensionError("block decomposition needs cavity dims >= 5");
  const double chi_a = cz_system.chi(modes[0].label, modes[1].label);
  const double chi_b = cz_system.chi(modes[2].label, modes[1].label);
  const double chi_ab = cz_system.chi(modes[0].label, modes[2].label);
  const double k_a = modes[0].self_kerr;
  const double k_b = modes[2].self_kerr;

  BlockSystem bs;
  for (int ia = 0; ia < 3; ++ia)
    for (int ib = 0; ib < 3; ++ib) {
      const double na = 2.0 * ia, nb = 2.0 * ib;
      Sector s;
      s.n_a = 2 * ia;
      s.n_b = 2 * ib;
      s.detuning = -chi_a * na - chi_b * nb;
      s.phase_rate = -0.5 * k_a * na * (na - 1.0) - 0.5 * k_b * nb * (nb - 1.0) - chi_ab * na * nb;
      bs.sectors[static_cast<std::size_t>(ia * 3 + ib)] = s;
    }
  return bs;
}

std::vector<std::size_t> cz_subspace_indices(const Dims& dims) {
  if (dims.size() != 3 || dims[1] != 2 || dims[0] < 5 || dims[2] < 5) {
    throw DimensionError("cz_subspace_indices: expected (cavity >= 5, qubit, cavity >= 5)");
  }
  std::vector<std::size_t> out;
  for (std::size_t ia = 0; ia < 3; ++ia)
    for (std::size_t q = 0; q < 2; ++q)
      for (std::size_t ib = 0; ib < 3; ++ib) out.push_back(((2 * ia) * 2 + q) * dims[2] + 2 * ib);
  return out;
}

}  // namespace bincz

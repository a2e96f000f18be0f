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

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bincz/hilbert.hpp"

namespace bincz {

enum class ModeKind { cavity, qubit };

std::string_view to_string(ModeKind kind);

/// One bosonic or two-level mode. Frequencies and Kerr constants are angular
/// (rad/s), times in seconds. An infinite T1/T2 means "no such process".
struct ModeSpec {
  std::string label;
  ModeKind kind = ModeKind::cavity;
  std::size_t dim = 2;
  double frequency = 0.0;
  double self_kerr = 0.0;      // cavities only
  double anharmonicity = 0.0;  // qubits only; not used by the 2-level model
  double T1 = 0.0;
  double T2 = 0.0;
};

/// Cross-Kerr χ between two modes, stored as a positive magnitude; the
/// Hamiltonian term is −χ N_a N_b.
struct CouplingSpec {
  std::string a;
  std::string b;
  double chi = 0.0;
};

class SystemSpec {
 public:
  /// Validates labels, dims, coherence times, couplings and drive targets;
  /// throws SchemaError.
  SystemSpec(std::vector<ModeSpec> modes, std::vector<CouplingSpec> couplings,
             std::vector<std::string> drive_targets);

  const std::vector<ModeSpec>& modes() const { return modes_; }
  const std::vector<CouplingSpec>& couplings() const { return couplings_; }
  const std::vector<std::string>& drive_targets() const { return drive_targets_; }

  Dims dims() const;
  std::size_t size() const { return modes_.size(); }
  std::optional<std::size_t> find(std::string_view label) const;
  /// Throws SchemaError for unknown labels.
  std::size_t index_of(std::string_view label) const;
  const ModeSpec& mode(std::string_view label) const { return modes_[index_of(label)]; }
  /// Order-independent lookup; 0 when the pair is uncoupled.
  double chi(std::string_view a, std::string_view b) const;

  /// Modes `labels` in the given order, couplings among them, and `drives`.
  SystemSpec subsystem(const std::vector<std::string>& labels,
                       const std::vector<std::string>& drives) const;
  SystemSpec with_drives(const std::vector<std::string>& drives) const;
  /// Every cavity truncated to `dim`.
  SystemSpec with_cavity_dim(std::size_t dim) const;
  SystemSpec with_coherence(std::string_view label, double T1, double T2) const;

 private:
  std::vector<ModeSpec> modes_;
  std::vector<CouplingSpec> couplings_;
  std::vector<std::string> drive_targets_;
};

/// Parses the TOML-subset system document:
///   [[mode]] label, kind, dim, freq_GHz, self_kerr_MHz, T1_us, T2_us
///   [[coupling]] a, b, chi_MHz
///   [drives] targets = ["...", ...]
SystemSpec load_system(std::string_view document);
/// "paper" selects the bundled profile; anything else is read as a file path.
SystemSpec load_system_from(const std::string& path_or_profile);
/// Bundled measured-device profile, mode order Q1, S1, QC, S2, Q2.
std::string_view paper_profile_document();
SystemSpec paper_system();

/// Static Hamiltonian in the rotating frame of every mode:
///   H0 = −Σ_cav (K/2) n(n−1) − Σ_pairs χ N_a N_b,
/// with N = n̂ for cavities and |e><e| for qubits. Diagonal.
Operator build_static(const SystemSpec& system);

/// Two controls per drive target, I then Q: cavities (a†+a, i(a†−a)), qubits
/// (σx, σy).
std::vector<Operator> build_drive_ops(const SystemSpec& system);
/// "<label>_I", "<label>_Q" in the same order as build_drive_ops.
std::vector<std::string> drive_labels(const SystemSpec& system);

/// Driven two-level sector of the coupler for cavity photon numbers
/// (n_a, n_b). H_sector = phase_rate·I + detuning·|e><e| + ε_I σx + ε_Q σy.
struct Sector {
  int n_a = 0;
  int n_b = 0;
  double detuning = 0.0;
  double phase_rate = 0.0;
};

struct BlockSystem {
  /// Sectors in n_a-major order over {0,2,4}².
  std::array<Sector, 9> sectors;
  std::size_t index(int n_a, int n_b) const;
  const Sector& sector(int n_a, int n_b) const { return sectors[index(n_a, n_b)]; }
};

/// Requires a (cavity, qubit, cavity) system driven on the qubit only.
BlockSystem block_decompose(const SystemSpec& cz_system);

/// Indices of the 18-dim {0,2,4} ⊗ {g,e} ⊗ {0,2,4} subspace inside a
/// (cavity d1, qubit, cavity d2) space, ordered ia·6 + q·3 + ib.
std::vector<std::size_t> cz_subspace_indices(const Dims& dims);

}  // namespace bincz

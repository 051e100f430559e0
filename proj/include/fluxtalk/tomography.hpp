// Copyright 2026 The fluxtalk developers
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

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "fluxtalk/gate.hpp"

namespace fluxtalk {

using Ptm = Eigen::Matrix<double, 16, 16>;

/// Two-qubit Pauli P_i = sigma_{i/4} (x) sigma_{i%4}, sigma = {I,X,Y,Z}.
const Eigen::Matrix4cd& two_qubit_pauli(int i);

/// PTM of the channel rho -> A rho A^dag: R_ij = tr(P_i A P_j A^dag) / 4.
Ptm ptm_of_operator(const Eigen::Matrix4cd& a);

const Ptm& cz_ideal_ptm();

/// Process fidelity tr(R_ideal^T R)/16 mapped to average gate fidelity
/// (d F_pro + 1)/(d + 1), d = 4.
double avg_fidelity_from_ptm(const Ptm& actual, const Ptm& ideal);

/// 16x16 real Pauli transfer matrix of the simulated process plus derived
/// scalars. Leakage is the trace loss of the maximally mixed state,
/// 1 - R(0,0).
struct ProcessTomogram {
  Ptm ptm = Ptm::Zero();
  double leakage = 0.0;
  double avg_fidelity = 0.0;
};

struct QptOptions {
  double sampling_sigma = 0.0;  // Gaussian noise on Pauli expectations
  double prep_depol = 0.0;      // depolarizing preparation error
  std::uint64_t seed = 1;
  bool reconstruct = true;  // run the linear-inversion pipeline
  // optional custom preparation set (16 density matrices); the default is
  // the {|0>,|1>,|+>,|+i>} product basis
  std::optional<std::vector<Eigen::Matrix4cd>> input_states;
};

/// Simulated two-qubit process tomography of the gate under an adversarial
/// flux program: evolves the five-level model via the logical-projected
/// channel, probes it with a product-state preparation basis and
/// reconstructs the PTM by linear inversion. Throws
/// ReconstructionIllConditioned when the preparation basis is degenerate.
ProcessTomogram simulate_qpt(const Device& device, const GateContext& ctx,
                             const FluxProgram& adversary,
                             const QptOptions& options = {});

/// Tomogram of an explicit logical-block operator (test/bench hook).
ProcessTomogram tomogram_of_operator(const Eigen::Matrix4cd& a,
                                     const QptOptions& options = {});

struct RzCorrection {
  double alpha = 0.0;  // fixed-qubit Z phase
  double beta = 0.0;   // tunable-qubit Z phase
  double fidelity = 0.0;
};

/// Maximizes average fidelity to the ideal CZ over post-gate
/// RZ(alpha) (x) RZ(beta); 64x64 coarse grid then local refinement to
/// 1e-6 in fidelity.
RzCorrection optimize_rz_correction(const Eigen::Matrix4cd& actual);
RzCorrection optimize_rz_correction(const ProcessTomogram& tomogram);

}  // namespace fluxtalk

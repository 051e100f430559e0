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
#include <vector>

#include "fluxtalk/device.hpp"
#include "fluxtalk/modulation.hpp"

namespace fluxtalk {

// Parametric CZ physics in the effective {|11>, |Q>} two-level picture.
// Basis ordering is |fixed, tunable>; |Q> is |02> for CZ02 and |20> for
// CZ20. All stored rates are linear frequencies in MHz; the dynamics use
// angular rates internally (omega = 2 pi f).

enum class CZKind { CZ02, CZ20 };

struct CZModel {
  CZKind kind = CZKind::CZ02;
  double g_eff_mhz = 2.5;  // effective |11> <-> |Q> coupling
  double tau_ns = 200.0;   // calibrated gate time, pi over angular g_eff
  double f_m_mhz = 200.0;  // modulation frequency bookkeeping

  // crosstalk-induced perturbations, all zero for a clean gate
  double delta_f01_mhz = 0.0;        // shift of the tunable qubit's fbar
  double delta_mean_shift_mhz = 0.0; // shift of the |Q> detuning
  double delta_g_mhz = 0.0;

  double delta_omega01_rad_per_us() const {
    return 2.0 * M_PI * delta_f01_mhz;
  }

  /// Gate time implied by the coupling alone.
  static double tau_for_g_eff(double g_eff_mhz) {
    return 500.0 / g_eff_mhz;  // pi / (2 pi g picoseconds...) in ns
  }
};

/// Ideal CZ = diag(1, 1, 1, -1).
Eigen::Matrix4cd cz_ideal();

/// Evolution under the perturbed two-level Hamiltonian, projected onto the
/// logical basis, including frame Z rotations calibrated without
/// crosstalk: diag{1, e^{-i dw tau}, 1, e^{-i dw tau} U11(tau)} with
/// U11 = -[cos(dG tau) - i (dD/2G) sin(dG tau)] e^{-i dD tau / 2}.
/// Sub-unitary when leakage to |Q> is nonzero.
Eigen::Matrix4cd cz_unitary(const CZModel& model);

/// Average gate infidelity r = (d^2 - |tr(U_ideal^dag U)|^2) / (d^2 + d),
/// d = 4. Accepts a sub-unitary actual (leaky channel's logical block).
double average_infidelity(const Eigen::Matrix4cd& actual,
                          const Eigen::Matrix4cd& ideal);

struct LeadingOrderInfidelity {
  double r_general = 0.0;  // uses the model's own (dw, dD, dg)
  double r02 = 0.0;        // dD = -dw substituted
  double r20 = 0.0;        // dD = +dw substituted
};

/// Leading-order infidelity expansions (dimensionless angular products):
/// r = (1/5)(dw t - dD t / 4)^2 + (1/40)(dD t)^2 + (1/5)(dg t)^2 and the
/// CZ02/CZ20 specializations (27/80 and 11/80 coefficients).
LeadingOrderInfidelity leading_order_infidelity(const CZModel& model);

/// Main-text closed form r = (27 pi^2 / 20) (df01 tau)^2 for CZ02 with
/// negligible dg (df01 in MHz, tau in ns).
double leading_order_infidelity_cz02(double delta_f01_mhz, double tau_ns);

/// Gate under study: the tunable qubit carries the flux pulse at
/// amplitude gate_amp_phi0; the fixed partner only labels the pair.
struct GateContext {
  int fixed_qubit = -1;
  int tunable_qubit = 0;
  CZKind kind = CZKind::CZ02;
  double g_eff_mhz = 2.5;
  double gate_amp_phi0 = 0.35;
  double bias_phi0 = 0.0;
  // optional linear g_eff(amp) sensitivity; zero keeps dg = 0
  double g_eff_slope_mhz_per_phi0 = 0.0;
};

/// f_m from the mean shift (|mean shift| / 2) and tau from g_eff.
CZModel calibrate_cz(const Device& device, const GateContext& ctx);

enum class PerturbationPath {
  Exact,           // mean-frequency difference via the Bessel series
  SlopeCurvature,  // second-order Taylor in the amplitude shift
};

struct GatePerturbations {
  double delta_f01_mhz = 0.0;
  double delta_mean_shift_mhz = 0.0;
  double delta_g_mhz = 0.0;
  double delta_amp_phi0 = 0.0;  // effective modulation-amplitude change
};

/// Translates an adversarial flux program into the gate's perturbations.
/// The default path evaluates the mean-frequency change exactly (no
/// Taylor truncation); the slope/curvature path reproduces the
/// first/second-order analysis.
GatePerturbations crosstalk_to_perturbations(
    const Device& device, const GateContext& ctx, const FluxProgram& adversary,
    PerturbationPath path = PerturbationPath::Exact);

/// Same, but with the adversary contribution phased for maximal
/// constructive interference (worst case).
GatePerturbations worst_case_perturbations(const Device& device,
                                           const GateContext& ctx,
                                           const FluxProgram& adversary);

CZModel perturbed_model(const Device& device, const GateContext& ctx,
                        const GatePerturbations& pert);

struct ResiliencePoint {
  double gate_amp_phi0 = 0.0;
  double adversary_amp_volts = 0.0;
  double gate_tau_ns = 0.0;
  double f_m_mhz = 0.0;
  double delta_f01_mhz = 0.0;
  double baseline_fidelity = 1.0;
  double adversarial_fidelity = 1.0;
  double predicted_fidelity = 1.0;  // leading-order, worst-case phase
};

/// Gate fidelity vs gate amplitude for several adversary amplitudes; the
/// gate is re-calibrated (f_m, tau) at every amplitude.
std::vector<ResiliencePoint> resilience_sweep(
    const Device& device, const GateContext& base, int adversary_qubit,
    const std::vector<double>& adversary_amps_volts,
    const std::vector<double>& gate_amps_phi0, double adversary_phase_rad = 0.0);

}  // namespace fluxtalk

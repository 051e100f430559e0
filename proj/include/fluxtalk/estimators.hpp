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

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fluxtalk/experiments.hpp"

namespace fluxtalk {

/// One recovered crosstalk ratio with 1-sigma error and provenance.
struct CrosstalkEstimate {
  int from_qubit = 0;  // line the adversarial flux was applied to
  int to_qubit = 0;    // qubit that received it
  double value = 0.0;  // dimensionless ratio dPhi_to / dPhi_from
  double sigma = 0.0;
  std::string method;  // dc_resonator | dc_qubit | ac
  std::optional<double> freq_mhz;  // AC only

  double value_pct() const { return 100.0 * value; }
  double sigma_pct() const { return 100.0 * sigma; }
};

/// Result of the shared-parameter periodic fit of the three resonator
/// traces: every parameter is common except the per-trace flux offsets.
struct GlobalPeriodicFit {
  double volts_per_phi0 = 0.0;
  double f_bare_ghz = 0.0;
  double g_ghz = 0.0;
  double f01_max_ghz = 0.0;
  double asymmetry = 0.0;
  std::vector<double> offsets_phi0;  // wrapped into (-0.5, 0.5]
  std::vector<double> offset_sigmas_phi0;
  Eigen::MatrixXd offset_covariance;  // per-trace offsets only
  double chi2 = 0.0;
  int dof = 0;
};

struct ResonatorFitHints {
  double volts_per_phi0 = 1.0;  // nominal conversion (initial guess)
  double f01_max_ghz = 0.0;
  double ec_ghz = 0.0;  // held fixed in the fit
  double f_bare_ghz = 0.0;
  double g_ghz = 0.05;
  double asymmetry = 0.7;
  double conversion_rel_sigma = 0.0;  // folded into the estimate's sigma
};

GlobalPeriodicFit fit_resonator_traces(const std::vector<ExperimentRecord>& traces,
                                       const ResonatorFitHints& hints);

/// DC crosstalk via the resonator method: global periodic fit, then a
/// weighted line of phase offsets vs adversary flux. Each trace must carry
/// `adversary_bias_phi0` in its metadata.
CrosstalkEstimate fit_dc_resonator(const std::vector<ExperimentRecord>& traces,
                                   const ResonatorFitHints& hints);

struct DcQubitHints {
  double f01_max_ghz = 0.0;  // shape knowledge for the nonlinearity estimate
  double ec_ghz = 0.0;
  double asymmetry = 0.7;
  double conversion_rel_sigma = 0.0;
  double own_half_span_phi0 = 0.01;
};

/// DC crosstalk via the qubit method: ratio of the two fitted slopes
/// df/dPhi_adversary over df/dPhi_own. The reported sigma combines the
/// fit errors, the conversion knowledge, and the (uncorrected) transmon
/// nonlinearity across the +-Phi0 adversary span.
CrosstalkEstimate fit_dc_qubit(const DcQubitRecords& records,
                               const DcQubitHints& hints);

/// Conversion of a frequency sensitivity into a flux sensitivity.
inline double flux_sensitivity_uphi0(double sigma_f_mhz,
                                     double slope_mhz_per_phi0) {
  return sigma_f_mhz / std::abs(slope_mhz_per_phi0) * 1e6;
}

struct AmplitudeFitHints {
  double volts_per_phi0 = 1.0;
  double f01_max_ghz = 0.0;
  double ec_ghz = 0.0;  // held fixed
  double asymmetry = 0.7;
};

/// Calibrated response of one flux line at one tone frequency: the fitted
/// volts-per-flux-quantum conversion plus the fitted mean-shift curve.
struct AmplitudeCalibration {
  double volts_per_phi0 = 0.0;
  double volts_per_phi0_sigma = 0.0;
  double f01_max_ghz = 0.0;
  double asymmetry = 0.0;
  double ec_ghz = 0.0;
  double freq_mhz = 0.0;
  ModulationResponse response;  // shape at the fitted parameters
  double sweet_spot_phi0 = 0.0;
  double operating_amp_phi0 = 0.0;  // max |slope| point
  Eigen::Matrix3d covariance;       // (volts_per_phi0, f01_max, asymmetry)
  double chi2 = 0.0;
  int dof = 0;

  /// Mean-shift slope in MHz per Phi0 at modulation amplitude amp.
  double slope_mhz_per_phi0(double amp_phi0) const;
};

/// Fit of the Bessel-series mean-shift model to an amplitude scan.
/// Throws InsufficientSpan when the scan does not reach 80% of the fitted
/// sweet-spot amplitude.
AmplitudeCalibration fit_amplitude_calibration(const ExperimentRecord& record,
                                               const AmplitudeFitHints& hints);

/// AC crosstalk from a phase-interference scan plus both line calibrations.
/// When require_phase is set, throws AmbiguousPhase if the interference
/// amplitude is below 2 sigma (its phase is then meaningless).
CrosstalkEstimate fit_ac_crosstalk(const ExperimentRecord& phase_record,
                                   const AmplitudeCalibration& calib_target,
                                   const AmplitudeCalibration& calib_adversary,
                                   double amp_adversary_volts,
                                   bool require_phase = false);

// --- measurement drivers: virtual experiments + fits, end to end ---

CrosstalkEstimate measure_dc_resonator(VirtualLab& lab, int target,
                                       int adversary);
CrosstalkEstimate measure_dc_qubit(VirtualLab& lab, int target, int adversary);
AmplitudeCalibration calibrate_flux_line(VirtualLab& lab, int qubit,
                                         double freq_mhz);
CrosstalkEstimate measure_ac(VirtualLab& lab, int target, int adversary,
                             double freq_mhz);

/// AC crosstalk vs tone frequency for one ordered pair (calibrations are
/// re-measured per frequency, like the hardware protocol).
std::vector<CrosstalkEstimate> ac_crosstalk_spectrum(
    const Device& device, int target, int adversary,
    const std::vector<double>& freqs_mhz, std::uint64_t seed,
    LabFidelity fidelity = LabFidelity::Fast);

enum class DcMethod { Resonator, Qubit };

/// Full matrix over ordered pairs; independent per-pair labs with
/// deterministic derived seeds, optionally evaluated on several threads.
std::vector<CrosstalkEstimate> measure_dc_matrix(const Device& device,
                                                 DcMethod method,
                                                 std::uint64_t seed,
                                                 LabFidelity fidelity,
                                                 int jobs = 1);
std::vector<CrosstalkEstimate> measure_ac_matrix(const Device& device,
                                                 double freq_mhz,
                                                 std::uint64_t seed,
                                                 LabFidelity fidelity,
                                                 int jobs = 1);

/// Pairwise comparison of two estimate sets (same ordered pairs):
/// normalized differences (a - b) / sqrt(sa^2 + sb^2) and summary stats.
struct MethodComparison {
  std::vector<std::pair<int, int>> pairs;  // (to, from)
  std::vector<double> normalized_diff;
  double mean = 0.0;
  double rms = 0.0;
};

MethodComparison compare_methods(const std::vector<CrosstalkEstimate>& a,
                                 const std::vector<CrosstalkEstimate>& b);

/// CSV rows (from,to,method,freq_mhz,value_pct,sigma_pct).
void write_crosstalk_csv(const std::string& path,
                         const std::vector<CrosstalkEstimate>& estimates);

/// JSON matrix document mirroring the CSV, keyed "to<-from".
nlohmann::json crosstalk_to_json(const std::vector<CrosstalkEstimate>& estimates);

}  // namespace fluxtalk

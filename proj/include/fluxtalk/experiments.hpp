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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fluxtalk/device.hpp"
#include "fluxtalk/modulation.hpp"
#include "fluxtalk/rng.hpp"

namespace fluxtalk {

/// One simulated sweep: aligned x/y/sigma arrays plus bookkeeping used by
/// the fitting pipelines and the CSV artifacts.
struct ExperimentRecord {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> y_sigma;
  std::string method;       // dc_resonator | dc_qubit | ac
  std::vector<int> qubits;  // [target, adversary...]
  int shots_per_point = 0;
  double elapsed_s = 0.0;
  nlohmann::json extra;  // axis labels, tone frequency, amplitudes, ...

  void validate() const;

  /// Writes `<basename>.csv` (columns x,y,y_sigma) and a JSON metadata
  /// sidecar `<basename>.meta.json`.
  void write(const std::string& basename) const;
};

/// The lab's imperfect knowledge of the device: conversions jittered by
/// the configured relative sigma, plus the (well measured) qubit and
/// resonator parameters used to seed fits. Deterministic per lab seed.
struct CalibrationSnapshot {
  std::map<int, double> dc_volts_per_phi0;
  std::map<int, double> ac_conv_scale;  // multiplies the true AC table
  double conversion_rel_sigma = 0.0;
  std::map<int, double> f01_max_ghz;
  std::map<int, double> ec_ghz;
  std::map<int, double> f_bare_ghz;
  std::map<int, double> g_ghz;
  std::map<int, double> asymmetry;

  double ac_volts_per_phi0(const Device& device, int qubit_id,
                           double freq_mhz) const;
};

enum class LabFidelity {
  Fast,  // analytic truth + Gaussian noise at the configured sigmas
  Full   // shot-sampled Ramsey fringes with an explicit frequency fit
};

struct FrequencyEstimate {
  double f01_ghz = 0.0;
  double sigma_mhz = 0.0;
};

/// Simulated experiment executor. Experiments consume the internal RNG
/// stream in call order; two labs built with the same seed replay
/// identical noise. Truth helpers are pure.
class VirtualLab {
 public:
  VirtualLab(const Device& device, std::uint64_t seed,
             LabFidelity fidelity = LabFidelity::Fast);

  const Device& device() const { return *device_; }
  LabFidelity fidelity() const { return fidelity_; }
  std::uint64_t seed() const { return seed_; }

  const CalibrationSnapshot& snapshot() const { return snapshot_; }

  /// Dressed-resonator frequency vs own-line DC bias (volts), with the
  /// adversary line held at a DC flux of adversary_bias_phi0. The grid
  /// must cover at least one full flux period.
  ExperimentRecord resonator_scan(int target, int adversary,
                                  double adversary_bias_phi0,
                                  const std::vector<double>& bias_grid_volts);

  /// Ramsey estimate of f01 (static program) or of the average frequency
  /// under modulation (program with tones).
  FrequencyEstimate ramsey_frequency(int target, const FluxProgram& program);

  /// Mean shift vs own-line tone amplitude (volts) at fixed frequency;
  /// y is the measured mean detuning in MHz.
  ExperimentRecord amplitude_scan(int target,
                                  const std::vector<double>& amps_volts,
                                  double freq_mhz);

  /// Fig-style two-tone interference: equal-frequency tones on qA and qB,
  /// sweeping their relative phase; y is qA's measured mean shift in MHz.
  ExperimentRecord phase_interference_scan(int target, int adversary,
                                           double amp_target_volts,
                                           double amp_adversary_volts,
                                           double freq_mhz,
                                           const std::vector<double>& phase_grid);

  // --- noiseless truth (shared with the gate-fidelity pipeline) ---
  double true_static_f01(int target, const FluxProgram& program) const;
  double true_mean_f01(int target, const FluxProgram& program) const;
  const ModulationResponse& response_at_bias(int target, double bias_phi0) const;

  // default sampling grids used by the measurement drivers
  std::vector<double> default_resonator_grid(int target) const;
  std::vector<double> default_amp_grid(int target, double freq_mhz,
                                       int n = 25) const;
  static std::vector<double> default_phase_grid(int n = 16);

 private:
  double ramsey_fast(double truth_ghz, double sigma_mhz);
  FrequencyEstimate ramsey_full(int target, double truth_ghz, double sigma_mhz);

  const Device* device_;
  std::uint64_t seed_;
  LabFidelity fidelity_;
  Rng rng_;
  CalibrationSnapshot snapshot_;
  mutable std::map<std::pair<int, double>, ModulationResponse> response_cache_;
};

/// Records for the DC qubit method: f01 vs own-line flux about Phi0/4 and
/// f01 vs adversary flux in {-1, 0, +1} Phi0 (x axes in requested Phi0).
struct DcQubitRecords {
  ExperimentRecord own;
  ExperimentRecord adversary;
};

DcQubitRecords dc_qubit_scan(VirtualLab& lab, int target, int adversary,
                             double own_half_span_phi0 = 0.01);

/// The three resonator traces at adversary biases {-1, 0, +1} Phi0.
std::vector<ExperimentRecord> dc_resonator_scan(VirtualLab& lab, int target,
                                                int adversary);

}  // namespace fluxtalk

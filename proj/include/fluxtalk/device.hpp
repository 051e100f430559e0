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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace fluxtalk {

// Unit conventions, fixed across the whole toolkit:
//   flux in units of the flux quantum Phi0, frequency in GHz (tone
//   frequencies in MHz), phase in radians, time in ns, voltages in V.

/// Flux-tunable transmon with an asymmetric two-junction SQUID.
struct TunableTransmon {
  int id = 0;
  double ej1_ghz = 0.0;  // larger junction
  double ej2_ghz = 0.0;
  double ec_ghz = 0.0;
  double t1_us = 20.0;
  double t2_us = 15.0;

  double ej_sum() const { return ej1_ghz + ej2_ghz; }
  double asymmetry() const { return (ej1_ghz - ej2_ghz) / (ej1_ghz + ej2_ghz); }

  /// Throws ConfigError outside the transmon regime (EJ/EC >= 20) or for
  /// non-positive energies / inverted junction ordering.
  void validate() const;

  /// Builds junction energies from the parked frequency, anharmonicity and
  /// junction asymmetry; the inversion root-finds f01(0) to within 1 kHz.
  static TunableTransmon from_spectrum(int id, double f01_max_ghz,
                                       double anharmonicity_ghz, double asymmetry,
                                       double t1_us = 20.0, double t2_us = 15.0);
};

/// Qubit 0->1 transition frequency at flux phi (Phi0 units).
/// EJ(phi) = EJsum sqrt(cos^2(pi phi) + d^2 sin^2(pi phi)),
/// f01 = sqrt(8 EJ EC) - EC. Periodic with period 1, even, max at phi = 0.
double f01(const TunableTransmon& q, double phi);

/// d f01 / d phi in GHz per Phi0 (analytic).
double f01_flux_slope(const TunableTransmon& q, double phi);

/// eta = f12 - f01, modeled at leading transmon order as -EC.
double anharmonicity(const TunableTransmon& q, double phi);

/// Readout resonator coupled to one tunable transmon.
struct Resonator {
  int qubit_id = 0;
  double f_bare_ghz = 0.0;
  double g_ghz = 0.0;

  void validate() const;
};

/// Dispersive shift chi = 2 g^2 eta / (Delta (Delta + eta)).
double dispersive_shift(const Resonator& r, const TunableTransmon& q, double phi);

/// Ground-state dressed resonator frequency f_bare + g^2/Delta + chi/2.
/// Throws DispersiveViolation when |Delta| < 10 g.
double dressed_resonator_freq(const Resonator& r, const TunableTransmon& q,
                              double phi);

/// Piecewise-linear table on a strictly increasing frequency grid (MHz).
struct FrequencyTable {
  std::vector<double> freq_mhz;
  std::vector<double> value;

  void validate(const std::string& what) const;
  double at(double f_mhz) const;  // throws FrequencyOutOfRange outside domain
  double min_freq() const { return freq_mhz.front(); }
  double max_freq() const { return freq_mhz.back(); }
};

/// Room-temperature drive line of one tunable transmon.
struct FluxLine {
  int qubit_id = 0;
  double dc_volts_per_phi0 = 1.0;
  FrequencyTable ac_volts_per_phi0;  // conversion vs tone frequency
  double phase_offset_rad = 0.0;     // static electrical delay of this line

  void validate() const;
};

/// One AC tone on a flux line.
struct Tone {
  double amp = 0.0;       // V or Phi0 depending on the program unit
  double freq_mhz = 0.0;  // must lie in [50, 500]
  double phase_rad = 0.0;
  double duration_ns = 100.0;
};

enum class FluxUnit { Volts, Phi0 };

struct LineProgram {
  double dc = 0.0;
  std::vector<Tone> tones;
};

/// Per-line flux requests; the amplitude unit is uniform per program.
struct FluxProgram {
  FluxUnit unit = FluxUnit::Volts;
  std::map<int, LineProgram> lines;  // keyed by qubit id

  FluxProgram& set_dc(int qubit_id, double value);
  FluxProgram& add_tone(int qubit_id, const Tone& tone);
  void validate() const;
};

inline constexpr double kToneFreqMinMhz = 50.0;
inline constexpr double kToneFreqMaxMhz = 500.0;

/// DC matrix plus per-ordered-pair frequency-dependent AC crosstalk. The
/// matrix is indexed by position in the device's transmon list; entry
/// (target, source) is the flux seen by `target` per unit flux applied on
/// `source`'s line. Not symmetric in general.
struct CrosstalkNetwork {
  Eigen::MatrixXd x_dc;
  std::map<std::pair<int, int>, FrequencyTable> x_ac;  // (target, source) ids

  void validate(int n) const;
};

/// One method's measurement cost model (shot budget and fixed latency).
struct MethodTiming {
  int shots_per_point = 100;
  double shot_rate_khz = 10.0;
  double latency_s = 0.0;
};

struct NoiseModel {
  double ramsey_freq_sigma_static_mhz = 0.01;
  double ramsey_freq_sigma_mod_mhz = 0.05;
  double resonator_fit_sigma_mhz = 0.0015;
  double conversion_rel_sigma = 0.005;  // lab knowledge of V/Phi0 conversions
  MethodTiming dc_resonator{200, 50.0, 26.4226666666666667};
  MethodTiming dc_qubit{300, 10.0, 117.41};
  MethodTiming ac{500, 10.0, 127.2333333333333333};
  std::uint64_t rng_seed = 0;

  void validate() const;
};

/// Static description of the chip: transmons, resonators, flux lines and
/// the planted crosstalk network. Immutable after construction; all
/// member operations are pure.
struct Device {
  std::string name = "device";
  std::vector<TunableTransmon> transmons;
  std::vector<Resonator> resonators;  // aligned with transmons
  std::vector<FluxLine> flux_lines;   // aligned with transmons
  CrosstalkNetwork network;
  NoiseModel noise;

  int size() const { return static_cast<int>(transmons.size()); }
  int index_of(int qubit_id) const;  // throws ConfigError if unknown
  const TunableTransmon& transmon(int qubit_id) const;
  const Resonator& resonator(int qubit_id) const;
  const FluxLine& flux_line(int qubit_id) const;
  std::vector<int> qubit_ids() const;

  void validate() const;

  static Device from_json(const nlohmann::json& doc);
  static Device load(const std::string& path);
  nlohmann::json to_json() const;
};

/// Combined flux arriving at one qubit's SQUID: crosstalk-summed DC level
/// plus one effective tone per distinct tone frequency (same-frequency
/// tones combine as complex phasors).
struct EffectiveFlux {
  double dc_phi0 = 0.0;
  std::vector<Tone> tones;  // amplitudes in Phi0, amplitudes >= 0
};

EffectiveFlux effective_flux(const Device& device, const FluxProgram& program,
                             int target_qubit_id);

}  // namespace fluxtalk

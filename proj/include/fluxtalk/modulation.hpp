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

#include <functional>
#include <span>
#include <vector>

#include "fluxtalk/device.hpp"

namespace fluxtalk {

// Time-averaged behavior of a transmon under sinusoidal flux modulation.
//
// About a DC bias, f01(bias + x) is expanded as a full Fourier series
//   g(x) = c0 + sum_n [ a_n cos(2 pi n x) + b_n sin(2 pi n x) ].
// Under x(t) = amp cos(w t) only the cosine terms survive time averaging,
//   fbar(amp) = c0 + sum_n a_n J0(2 pi n amp),
// so the mean detuning from the value at the bias point is
//   sum_n a_n [J0(2 pi n amp) - 1].
// At bias 0 the sine coefficients vanish and a_n are the usual nu_n.

inline constexpr int kDefaultHarmonics = 50;
inline constexpr int kDefaultProjectionSamples = 8192;
inline constexpr double kSweetSpotSearchMax = 0.65;  // Phi0

struct ModulationResponse {
  double bias_phi0 = 0.0;
  double c0 = 0.0;                 // mean of f01 over one flux period (GHz)
  std::vector<double> cos_coeffs;  // a_n, n = 1..N (GHz)
  std::vector<double> sin_coeffs;  // b_n, n = 1..N (GHz)

  int harmonics() const { return static_cast<int>(cos_coeffs.size()); }

  /// f01 at the bias point (= c0 + sum a_n).
  double f_at_bias() const;

  /// Series reconstruction of f01(bias + x).
  double reconstruct(double x) const;

  /// Average frequency under modulation at amplitude amp (Phi0).
  double mean_f01(double amp) const;

  /// For several simultaneous tones at distinct frequencies the J0 factors
  /// multiply per harmonic.
  double mean_f01(std::span<const double> amps) const;

  double mean_detuning(double amp) const { return mean_f01(amp) - f_at_bias(); }

  /// d fbar / d amp in GHz per Phi0 (analytic, J0' = -J1).
  double slope(double amp) const;

  /// d^2 fbar / d amp^2 in GHz per Phi0^2.
  double curvature(double amp) const;
};

/// Numeric cosine/sine projection of f01 about a bias point.
ModulationResponse fourier_coefficients(const TunableTransmon& q,
                                        int n_harmonics = kDefaultHarmonics,
                                        double bias_phi0 = 0.0,
                                        int n_samples = kDefaultProjectionSamples);

/// Same projection for an arbitrary 1-periodic frequency curve (used for
/// surrogate spectra in tests and for fit models).
ModulationResponse fourier_coefficients_of(
    const std::function<double(double)>& f01_of_phi, int n_harmonics,
    double bias_phi0 = 0.0, int n_samples = kDefaultProjectionSamples);

struct SlopeCurvature {
  double slope = 0.0;
  double curvature = 0.0;
};

SlopeCurvature slope_and_curvature(const ModulationResponse& response,
                                   double amp);

/// Modulation amplitude of maximal detuning (minimum of fbar) located by
/// bracketed 1-D minimization to 1e-7 Phi0. Throws NoInteriorMinimum when
/// fbar is monotone on the search interval.
double find_sweet_spot(const ModulationResponse& response, double lo = 0.0,
                       double hi = kSweetSpotSearchMax);

/// Amplitude of maximal |d fbar / d amp| (the most AC-flux-sensitive
/// operating point), searched below the sweet spot.
double max_sensitivity_amp(const ModulationResponse& response);

}  // namespace fluxtalk

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

#include "fluxtalk/modulation.hpp"

#include <cmath>
#include <sstream>

#include "fluxtalk/bessel.hpp"
#include "fluxtalk/errors.hpp"
#include "fluxtalk/optimize.hpp"

namespace fluxtalk {

double ModulationResponse::f_at_bias() const { return reconstruct(0.0); }

double ModulationResponse::reconstruct(double x) const {
  double f = c0;
  for (int n = 1; n <= harmonics(); ++n) {
    f += cos_coeffs[n - 1] * std::cos(2.0 * M_PI * n * x) +
         sin_coeffs[n - 1] * std::sin(2.0 * M_PI * n * x);
  }
  return f;
}

double ModulationResponse::mean_f01(double amp) const {
  double f = c0;
  for (int n = 1; n <= harmonics(); ++n) {
    f += cos_coeffs[n - 1] * bessel_j0(2.0 * M_PI * n * amp);
  }
  return f;
}

double ModulationResponse::mean_f01(std::span<const double> amps) const {
  double f = c0;
  for (int n = 1; n <= harmonics(); ++n) {
    double j = 1.0;
    for (double amp : amps) j *= bessel_j0(2.0 * M_PI * n * amp);
    f += cos_coeffs[n - 1] * j;
  }
  return f;
}

double ModulationResponse::slope(double amp) const {
  double s = 0.0;
  for (int n = 1; n <= harmonics(); ++n) {
    const double w = 2.0 * M_PI * n;
    s += cos_coeffs[n - 1] * (-bessel_j1(w * amp)) * w;
  }
  return s;
}

double ModulationResponse::curvature(double amp) const {
  double s = 0.0;
  for (int n = 1; n <= harmonics(); ++n) {
    const double w = 2.0 * M_PI * n;
    const double x = w * amp;
    // J0''(x) = J1(x)/x - J0(x), with limit -1/2 at x = 0.
    const double j0pp =
        std::abs(x) < 1e-8 ? -0.5 + x * x / 16.0
                           : bessel_j1(x) / x - bessel_j0(x);
    s += cos_coeffs[n - 1] * w * w * j0pp;
  }
  return s;
}

ModulationResponse fourier_coefficients_of(
    const std::function<double(double)>& f01_of_phi, int n_harmonics,
    double bias_phi0, int n_samples) {
  if (n_harmonics < 8) {
    throw ConfigError("fourier_coefficients: need at least 8 harmonics");
  }
  if (n_samples < 4 * n_harmonics) n_samples = 4 * n_harmonics;

  ModulationResponse resp;
  resp.bias_phi0 = bias_phi0;
  resp.cos_coeffs.assign(n_harmonics, 0.0);
  resp.sin_coeffs.assign(n_harmonics, 0.0);

  std::vector<double> samples(n_samples);
  for (int m = 0; m < n_samples; ++m) {
    const double x = static_cast<double>(m) / n_samples;
    samples[m] = f01_of_phi(bias_phi0 + x);
  }
  double c0 = 0.0;
  for (double v : samples) c0 += v;
  resp.c0 = c0 / n_samples;
  for (int n = 1; n <= n_harmonics; ++n) {
    double ac = 0.0, as = 0.0;
    for (int m = 0; m < n_samples; ++m) {
      const double arg = 2.0 * M_PI * n * m / n_samples;
      ac += samples[m] * std::cos(arg);
      as += samples[m] * std::sin(arg);
    }
    resp.cos_coeffs[n - 1] = 2.0 * ac / n_samples;
    resp.sin_coeffs[n - 1] = 2.0 * as / n_samples;
  }
  return resp;
}

ModulationResponse fourier_coefficients(const TunableTransmon& q,
                                        int n_harmonics, double bias_phi0,
                                        int n_samples) {
  q.validate();
  return fourier_coefficients_of([&](double phi) { return f01(q, phi); },
                                 n_harmonics, bias_phi0, n_samples);
}

SlopeCurvature slope_and_curvature(const ModulationResponse& response,
                                   double amp) {
  if (amp < 0.0) {
    throw ConfigError("slope_and_curvature: amplitude must be >= 0");
  }
  return {response.slope(amp), response.curvature(amp)};
}

double find_sweet_spot(const ModulationResponse& response, double lo,
                       double hi) {
  // coarse bracket first, then golden-section refinement
  constexpr int kScan = 1024;
  const double a = std::max(lo, 0.0);
  int best = 0;
  double best_f = response.mean_f01(a);
  for (int k = 1; k <= kScan; ++k) {
    const double amp = a + (hi - a) * k / kScan;
    const double f = response.mean_f01(amp);
    if (f < best_f) {
      best_f = f;
      best = k;
    }
  }
  if (best == 0 || best == kScan) {
    std::ostringstream os;
    os << "mean frequency has no interior minimum on (" << a << ", " << hi
       << "] Phi0";
    throw NoInteriorMinimum(os.str());
  }
  const double step = (hi - a) / kScan;
  const double left = a + (best - 1) * step;
  const double right = a + (best + 1) * step;
  return golden_section_min([&](double amp) { return response.mean_f01(amp); },
                            left, right, 1e-7);
}

double max_sensitivity_amp(const ModulationResponse& response) {
  const double sweet = find_sweet_spot(response);
  // |slope| vanishes at 0 and at the sweet spot; maximize in between.
  return golden_section_min(
      [&](double amp) { return -std::abs(response.slope(amp)); }, 1e-4,
      sweet, 1e-7);
}

}  // namespace fluxtalk

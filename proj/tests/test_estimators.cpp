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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fluxtalk/errors.hpp"
#include "fluxtalk/estimators.hpp"
#include "fluxtalk/io.hpp"
#include "testutil.hpp"

using namespace fluxtalk;
using namespace fluxtalk::testing;

namespace {

Device two_qubit_device(double x01, double noise_scale = 1.0) {
  TestDeviceOptions opt;
  opt.n_qubits = 2;
  opt.noise_scale = noise_scale;
  Device dev = make_device(opt);
  dev.network.x_dc(0, 1) = x01;
  return dev;
}

}  // namespace

TEST_CASE("dc resonator: noiseless pipeline recovers the planted value") {
  Device dev = two_qubit_device(0.0352, 0.0);
  VirtualLab lab(dev, 17);
  const CrosstalkEstimate est = measure_dc_resonator(lab, 0, 1);
  CHECK(est.method == "dc_resonator");
  CHECK(est.to_qubit == 0);
  CHECK(est.from_qubit == 1);
  CHECK(std::abs(est.value - 0.0352) < 1e-4);
}

TEST_CASE("dc resonator: planted 3.52% recovered with honest errors") {
  Device dev = two_qubit_device(0.0352);
  int hits = 0;
  std::vector<double> sigmas;
  for (int seed = 0; seed < 12; ++seed) {
    VirtualLab lab(dev, 100 + seed);
    const CrosstalkEstimate est = measure_dc_resonator(lab, 0, 1);
    sigmas.push_back(est.sigma);
    if (std::abs(est.value - 0.0352) < 3.0 * est.sigma) ++hits;
  }
  CHECK(hits >= 11);
  // reported error comparable to the ~0.05% scale of the reference method
  const double sigma_pct =
      100.0 * std::accumulate(sigmas.begin(), sigmas.end(), 0.0) / sigmas.size();
  CHECK(sigma_pct > 0.005);
  CHECK(sigma_pct < 0.1);
}

TEST_CASE("dc resonator: zero crosstalk consistent with zero, ~110 uPhi0 floor") {
  Device dev = two_qubit_device(0.0);
  dev.noise.conversion_rel_sigma = 0.0;
  std::vector<double> values;
  double sigma_sum = 0.0;
  for (int seed = 0; seed < 10; ++seed) {
    VirtualLab lab(dev, 500 + seed);
    const CrosstalkEstimate est = measure_dc_resonator(lab, 0, 1);
    values.push_back(est.value);
    sigma_sum += est.sigma;
    CHECK(std::abs(est.value) < 3.0 * est.sigma);
  }
  // the per-trace offset resolution: sigma(X) = sigma_off / sqrt(2) with a
  // +-Phi0 lever, so sigma_off lands in the advertised 80-150 uPhi0 window
  const double sigma_off_uphi0 = sigma_sum / 10.0 * std::sqrt(2.0) * 1e6;
  CHECK(sigma_off_uphi0 > 80.0);
  CHECK(sigma_off_uphi0 < 150.0);
}

TEST_CASE("dc resonator: degenerate adversary biases throw") {
  Device dev = two_qubit_device(0.01, 0.0);
  VirtualLab lab(dev, 3);
  const auto grid = lab.default_resonator_grid(0);
  std::vector<ExperimentRecord> traces;
  for (int k = 0; k < 3; ++k) {
    traces.push_back(lab.resonator_scan(0, 1, 1.0, grid));  // same bias
  }
  ResonatorFitHints hints;
  const CalibrationSnapshot& snap = lab.snapshot();
  hints.volts_per_phi0 = snap.dc_volts_per_phi0.at(0);
  hints.f01_max_ghz = snap.f01_max_ghz.at(0);
  hints.ec_ghz = snap.ec_ghz.at(0);
  hints.f_bare_ghz = snap.f_bare_ghz.at(0);
  hints.g_ghz = snap.g_ghz.at(0);
  hints.asymmetry = snap.asymmetry.at(0);
  CHECK_THROWS_AS(fit_dc_resonator(traces, hints), DegenerateTraces);
}

TEST_CASE("dc qubit: planted 3.55% recovered, sigma ~0.04%") {
  Device dev = two_qubit_device(0.0355);
  int hits = 0;
  std::vector<double> sigmas;
  for (int seed = 0; seed < 20; ++seed) {
    VirtualLab lab(dev, 900 + seed);
    const CrosstalkEstimate est = measure_dc_qubit(lab, 0, 1);
    sigmas.push_back(est.sigma);
    if (std::abs(est.value - 0.0355) < 3.0 * est.sigma) ++hits;
  }
  CHECK(hits >= 19);
  const double mean_sigma_pct =
      100.0 * std::accumulate(sigmas.begin(), sigmas.end(), 0.0) / sigmas.size();
  CHECK(mean_sigma_pct > 0.01);
  CHECK(mean_sigma_pct < 0.1);
}

TEST_CASE("dc qubit: sensitivity propagation and exact-zero numerator") {
  // sigma_f = 0.01 MHz against a 2000 MHz/Phi0 slope -> 5 uPhi0 exactly
  CHECK(flux_sensitivity_uphi0(0.01, 2000.0) == doctest::Approx(5.0));

  DcQubitRecords rec;
  rec.own.method = rec.adversary.method = "dc_qubit";
  rec.own.qubits = rec.adversary.qubits = {0, 1};
  rec.own.x = {0.24, 0.25, 0.26};
  rec.own.y = {4480.0, 4460.0, 4440.0};  // slope -2000 MHz/Phi0
  rec.own.y_sigma = {0.01, 0.01, 0.01};
  rec.adversary.x = {-1.0, 0.0, 1.0};
  rec.adversary.y = {4460.0, 4460.0, 4460.0};  // numerator exactly zero
  rec.adversary.y_sigma = {0.01, 0.01, 0.01};
  DcQubitHints hints;  // no shape knowledge: no systematic term
  const CrosstalkEstimate est = fit_dc_qubit(rec, hints);
  CHECK(est.value == doctest::Approx(0.0));
  // flux sensitivity of the adversary scan: sigma_slope / |own slope|
  const double sens_uphi0 = est.sigma * 1e6;
  CHECK(sens_uphi0 == doctest::Approx(5.0 / std::sqrt(2.0)).epsilon(0.01));
}

TEST_CASE("dc qubit: vanishing own-line slope raises ZeroDenominator") {
  DcQubitRecords rec;
  rec.own.qubits = rec.adversary.qubits = {0, 1};
  rec.own.x = {0.24, 0.25, 0.26};
  rec.own.y = {4460.0, 4460.0001, 4460.0};  // slope ~ 0
  rec.own.y_sigma = {0.01, 0.01, 0.01};
  rec.adversary.x = {-1.0, 0.0, 1.0};
  rec.adversary.y = {4459.0, 4460.0, 4461.0};
  rec.adversary.y_sigma = {0.01, 0.01, 0.01};
  CHECK_THROWS_AS(fit_dc_qubit(rec, DcQubitHints{}), ZeroDenominator);
}

TEST_CASE("amplitude calibration: noiseless round trip to 1e-4") {
  Device dev = two_qubit_device(0.001, 0.0);
  VirtualLab lab(dev, 9);
  const double freq = 200.0;
  const AmplitudeCalibration calib = calibrate_flux_line(lab, 0, freq);
  const double true_conv = dev.flux_lines[0].ac_volts_per_phi0.at(freq);
  CHECK(std::abs(calib.volts_per_phi0 - true_conv) / true_conv < 1e-4);
  CHECK(calib.freq_mhz == freq);
  // fitted curve reproduces the true mean shift everywhere on the scan
  const ModulationResponse& truth = lab.response_at_bias(0, 0.0);
  for (double amp = 0.05; amp < 0.5; amp += 0.05) {
    CHECK(std::abs(calib.response.mean_detuning(amp) -
                   truth.mean_detuning(amp)) < 1e-6);
  }
}

TEST_CASE("amplitude calibration: axis rescaling rescales the conversion") {
  Device dev = two_qubit_device(0.001, 0.0);
  VirtualLab lab(dev, 9);
  const double freq = 200.0;
  ExperimentRecord rec = lab.amplitude_scan(0, lab.default_amp_grid(0, freq), freq);
  AmplitudeFitHints hints;
  const CalibrationSnapshot& snap = lab.snapshot();
  hints.volts_per_phi0 = snap.ac_volts_per_phi0(dev, 0, freq);
  hints.f01_max_ghz = snap.f01_max_ghz.at(0);
  hints.ec_ghz = snap.ec_ghz.at(0);
  hints.asymmetry = snap.asymmetry.at(0);
  const AmplitudeCalibration base = fit_amplitude_calibration(rec, hints);

  // relabel the amplitude axis in "half volts": same physics, conversion
  // doubles in the new unit, the mean-shift curve vs flux is unchanged
  ExperimentRecord scaled = rec;
  for (double& v : scaled.x) v *= 2.0;
  AmplitudeFitHints hints2 = hints;
  hints2.volts_per_phi0 *= 2.0;
  const AmplitudeCalibration rescaled = fit_amplitude_calibration(scaled, hints2);
  CHECK(rescaled.volts_per_phi0 ==
        doctest::Approx(2.0 * base.volts_per_phi0).epsilon(1e-6));
  CHECK(rescaled.sweet_spot_phi0 ==
        doctest::Approx(base.sweet_spot_phi0).epsilon(1e-6));
}

TEST_CASE("amplitude calibration: short scans raise InsufficientSpan") {
  Device dev = two_qubit_device(0.001, 0.0);
  VirtualLab lab(dev, 9);
  const double freq = 200.0;
  auto grid = lab.default_amp_grid(0, freq);
  grid.resize(grid.size() / 3);  // stops far below the sweet spot
  const ExperimentRecord rec = lab.amplitude_scan(0, grid, freq);
  AmplitudeFitHints hints;
  const CalibrationSnapshot& snap = lab.snapshot();
  hints.volts_per_phi0 = snap.ac_volts_per_phi0(dev, 0, freq);
  hints.f01_max_ghz = snap.f01_max_ghz.at(0);
  hints.ec_ghz = snap.ec_ghz.at(0);
  hints.asymmetry = snap.asymmetry.at(0);
  CHECK_THROWS_AS(fit_amplitude_calibration(rec, hints), InsufficientSpan);
}

TEST_CASE("ac crosstalk: planted 1% at 200 MHz recovered") {
  Device dev = two_qubit_device(0.02);
  dev.network.x_ac[{0, 1}].value = {0.01, 0.01, 0.01, 0.01};
  int hits = 0;
  for (int seed = 0; seed < 8; ++seed) {
    VirtualLab lab(dev, 40 + seed);
    const CrosstalkEstimate est = measure_ac(lab, 0, 1, 200.0);
    CHECK(est.method == "ac");
    REQUIRE(est.freq_mhz.has_value());
    CHECK(*est.freq_mhz == 200.0);
    if (std::abs(est.value - 0.01) < 3.0 * est.sigma) ++hits;
  }
  CHECK(hits >= 7);
}

TEST_CASE("ac crosstalk: zero planted X statistically zero; phase flag") {
  Device dev = two_qubit_device(0.01);
  dev.network.x_ac[{0, 1}].value = {0, 0, 0, 0};
  VirtualLab lab(dev, 77);
  const AmplitudeCalibration ct = calibrate_flux_line(lab, 0, 200.0);
  const AmplitudeCalibration ca = calibrate_flux_line(lab, 1, 200.0);
  const double amp_t = ct.operating_amp_phi0 * ct.volts_per_phi0;
  const double amp_a = 0.3 * ca.volts_per_phi0;
  const ExperimentRecord rec = lab.phase_interference_scan(
      0, 1, amp_t, amp_a, 200.0, VirtualLab::default_phase_grid());
  const CrosstalkEstimate est = fit_ac_crosstalk(rec, ct, ca, amp_a);
  CHECK(std::abs(est.value) < 3.0 * est.sigma);
  // the same data with require_phase set: interference amplitude is pure
  // noise, so the phase is flagged as undetermined
  CHECK_THROWS_AS(fit_ac_crosstalk(rec, ct, ca, amp_a, true), AmbiguousPhase);
}

TEST_CASE("ac crosstalk: injected line offset shifts theta0, not |X|") {
  Device dev = two_qubit_device(0.02, 0.0);
  dev.network.x_ac[{0, 1}].value = {0.008, 0.008, 0.008, 0.008};
  Device dev_off = dev;
  dev_off.flux_lines[1].phase_offset_rad = 0.7;

  auto estimate = [&](const Device& d) {
    VirtualLab lab(d, 55);
    return measure_ac(lab, 0, 1, 200.0).value;
  };
  const double x_plain = estimate(dev);
  const double x_offset = estimate(dev_off);
  CHECK(x_plain == doctest::Approx(0.008).epsilon(5e-3));
  CHECK(x_offset == doctest::Approx(x_plain).epsilon(1e-6));
}

TEST_CASE("ac spectrum: flat table recovered flat, bump recovered pointwise") {
  Device dev = two_qubit_device(0.02);
  // resonance-like bump on top of a flat floor
  dev.network.x_ac[{0, 1}].freq_mhz = {50, 150, 250, 350, 500};
  dev.network.x_ac[{0, 1}].value = {0.004, 0.004, 0.012, 0.004, 0.004};
  const std::vector<double> freqs = {100.0, 250.0, 400.0};
  const auto spectrum = ac_crosstalk_spectrum(dev, 0, 1, freqs, 31);
  REQUIRE(spectrum.size() == freqs.size());
  for (size_t i = 0; i < freqs.size(); ++i) {
    const double truth = dev.network.x_ac.at({0, 1}).at(freqs[i]);
    CHECK(std::abs(spectrum[i].value - truth) < 3.0 * spectrum[i].sigma);
  }
  CHECK(spectrum[1].value > 2.0 * spectrum[0].value);  // bump visible
}

TEST_CASE("method comparison statistics") {
  std::vector<CrosstalkEstimate> a, b;
  for (int i = 0; i < 6; ++i) {
    CrosstalkEstimate e;
    e.to_qubit = i;
    e.from_qubit = (i + 1) % 6;
    e.value = 0.01 * i;
    e.sigma = 1e-4;
    e.method = "dc_qubit";
    a.push_back(e);
    e.method = "dc_resonator";
    b.push_back(e);
  }

  SUBCASE("identical matrices give all-zero differences") {
    const MethodComparison cmp = compare_methods(a, b);
    for (double z : cmp.normalized_diff) CHECK(z == doctest::Approx(0.0));
    CHECK(cmp.rms == doctest::Approx(0.0));
  }

  SUBCASE("inflating one sigma deflates the normalized differences") {
    auto b2 = b;
    for (size_t i = 0; i < b2.size(); ++i) b2[i].value += 1e-4;  // 1 sigma-ish
    const MethodComparison tight = compare_methods(a, b2);
    for (auto& e : b2) e.sigma *= 10.0;
    const MethodComparison loose = compare_methods(a, b2);
    CHECK(loose.rms < tight.rms);
  }

  SUBCASE("mismatched pair sets throw") {
    auto b2 = b;
    b2.back().to_qubit = 99;
    CHECK_THROWS_AS(compare_methods(a, b2), PairMismatch);
  }
}

TEST_CASE("round trip: both DC methods recover a small planted matrix") {
  TestDeviceOptions opt;
  opt.n_qubits = 3;
  opt.plant_seed = 21;
  Device dev = make_device(opt);
  const auto qubit = measure_dc_matrix(dev, DcMethod::Qubit, 1234,
                                       LabFidelity::Fast, 2);
  const auto resonator = measure_dc_matrix(dev, DcMethod::Resonator, 1234,
                                           LabFidelity::Fast, 2);
  REQUIRE(qubit.size() == 6);
  REQUIRE(resonator.size() == 6);
  for (const auto& est : qubit) {
    const double truth =
        dev.network.x_dc(dev.index_of(est.to_qubit), dev.index_of(est.from_qubit));
    CHECK(std::abs(est.value - truth) < 4.0 * est.sigma);
  }
  for (const auto& est : resonator) {
    const double truth =
        dev.network.x_dc(dev.index_of(est.to_qubit), dev.index_of(est.from_qubit));
    CHECK(std::abs(est.value - truth) < 4.0 * est.sigma);
  }
  // asymmetric entries stay asymmetric through the pipeline
  const auto find = [&](const std::vector<CrosstalkEstimate>& v, int to, int from) {
    for (const auto& e : v) {
      if (e.to_qubit == to && e.from_qubit == from) return e.value;
    }
    return 0.0;
  };
  const double x01 = dev.network.x_dc(0, 1), x10 = dev.network.x_dc(1, 0);
  if (std::abs(x01 - x10) > 5e-4) {
    CHECK(std::abs(find(qubit, 0, 1) - find(qubit, 1, 0)) > 1e-4);
  }
}

TEST_CASE("matrix runs are deterministic and thread-count independent") {
  TestDeviceOptions opt;
  opt.n_qubits = 3;
  Device dev = make_device(opt);
  const auto a = measure_dc_matrix(dev, DcMethod::Qubit, 777, LabFidelity::Fast, 1);
  const auto b = measure_dc_matrix(dev, DcMethod::Qubit, 777, LabFidelity::Fast, 3);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].value == b[i].value);
    CHECK(a[i].sigma == b[i].sigma);
  }
}

TEST_CASE("crosstalk CSV layout") {
  CrosstalkEstimate e;
  e.from_qubit = 2;
  e.to_qubit = 0;
  e.value = 0.0353;
  e.sigma = 4e-4;
  e.method = "dc_qubit";
  write_crosstalk_csv("/tmp/fluxtalk_test_matrix.csv", {e});
  const std::string csv = read_text_file("/tmp/fluxtalk_test_matrix.csv");
  CHECK(csv.find("from,to,method,freq_mhz,value_pct,sigma_pct") == 0);
  CHECK(csv.find("2,0,dc_qubit,,3.53") != std::string::npos);
}

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
#include "fluxtalk/experiments.hpp"
#include "fluxtalk/io.hpp"
#include "fluxtalk/optimize.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace fluxtalk;
using namespace fluxtalk::testing;

namespace {

Device noiseless_device(int n = 2) {
  TestDeviceOptions opt;
  opt.n_qubits = n;
  opt.noise_scale = 0.0;
  return make_device(opt);
}

}  // namespace

TEST_CASE("resonator traces: zero crosstalk collapses, planted offset shifts") {
  Device dev = noiseless_device(2);

  SUBCASE("no crosstalk: adversary bias is invisible") {
    dev.network.x_dc(0, 1) = 0.0;
    VirtualLab lab(dev, 3);
    const auto grid = lab.default_resonator_grid(0);
    const auto t0 = lab.resonator_scan(0, 1, 0.0, grid);
    const auto tp = lab.resonator_scan(0, 1, 1.0, grid);
    for (size_t i = 0; i < grid.size(); ++i) {
      CHECK(std::abs(t0.y[i] - tp.y[i]) < 1e-12);
    }
  }

  SUBCASE("planted 3.5%: traces shift by X periods per Phi0 of bias") {
    dev.network.x_dc(0, 1) = 0.035;
    dev.noise.conversion_rel_sigma = 0.0;
    VirtualLab lab(dev, 3);
    const double conv = dev.flux_lines[0].dc_volts_per_phi0;
    const auto grid = lab.default_resonator_grid(0);
    // shifting the own-line axis by X * conv volts reproduces the +Phi0
    // trace: y_+(V) = y_0(V + X conv)
    std::vector<double> shifted(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) {
      shifted[i] = grid[i] + 0.035 * conv;
    }
    const auto tp = lab.resonator_scan(0, 1, 1.0, grid);
    const auto t_shift = lab.resonator_scan(0, 1, 0.0, shifted);
    for (size_t i = 0; i < grid.size(); ++i) {
      CHECK(std::abs(tp.y[i] - t_shift.y[i]) < 1e-12);
    }
  }

  SUBCASE("doubling the adversary bias doubles the trace offset") {
    dev.network.x_dc(0, 1) = 0.02;
    dev.noise.conversion_rel_sigma = 0.0;
    VirtualLab lab(dev, 3);
    const double conv = dev.flux_lines[0].dc_volts_per_phi0;
    const auto grid = lab.default_resonator_grid(0);
    // y_{2 Phi0}(V) must equal y_0(V + 2 X conv): twice the +Phi0 shift
    std::vector<double> shifted(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) {
      shifted[i] = grid[i] + 2.0 * 0.02 * conv;
    }
    const auto t2 = lab.resonator_scan(0, 1, 2.0, grid);
    const auto t_shift = lab.resonator_scan(0, 1, 0.0, shifted);
    for (size_t i = 0; i < grid.size(); ++i) {
      CHECK(std::abs(t2.y[i] - t_shift.y[i]) < 1e-12);
    }
  }
}

TEST_CASE("resonator scan rejects short grids") {
  Device dev = noiseless_device(2);
  VirtualLab lab(dev, 1);
  std::vector<double> short_grid;
  for (int i = 0; i < 16; ++i) {
    short_grid.push_back(0.02 * i);  // < 1 period in volts
  }
  CHECK_THROWS_AS(lab.resonator_scan(0, 1, 0.0, short_grid), ConfigError);
}

TEST_CASE("ramsey: noiseless fast path returns exact model frequencies") {
  Device dev = noiseless_device(2);
  VirtualLab lab(dev, 1);
  FluxProgram dc;
  dc.unit = FluxUnit::Phi0;
  dc.set_dc(0, 0.21);
  const auto est = lab.ramsey_frequency(0, dc);
  CHECK(est.f01_ghz ==
        doctest::Approx(f01(dev.transmons[0], 0.21)).epsilon(1e-12));

  // modulated program at vanishing amplitude equals the static result
  FluxProgram mod = dc;
  mod.add_tone(0, {1e-13, 200.0, 0.0, 100.0});
  const auto est_mod = lab.ramsey_frequency(0, mod);
  CHECK(est_mod.f01_ghz == doctest::Approx(est.f01_ghz).epsilon(1e-9));
}

TEST_CASE("ramsey full path: spread matches reported sigma within 30%") {
  TestDeviceOptions opt;
  opt.n_qubits = 2;
  Device dev = make_device(opt);
  FluxProgram dc;
  dc.unit = FluxUnit::Phi0;
  dc.set_dc(0, 0.1);
  const double truth = f01(dev.transmons[0], 0.1);

  std::vector<double> estimates, sigmas;
  for (int seed = 0; seed < 100; ++seed) {
    VirtualLab lab(dev, 1000 + seed, LabFidelity::Full);
    const auto est = lab.ramsey_frequency(0, dc);
    estimates.push_back((est.f01_ghz - truth) * 1e3);
    sigmas.push_back(est.sigma_mhz);
  }
  const double mean =
      std::accumulate(estimates.begin(), estimates.end(), 0.0) / estimates.size();
  double var = 0.0;
  for (double e : estimates) var += (e - mean) * (e - mean);
  const double spread = std::sqrt(var / (estimates.size() - 1));
  const double reported =
      std::accumulate(sigmas.begin(), sigmas.end(), 0.0) / sigmas.size();
  CHECK(spread / reported > 0.7);
  CHECK(spread / reported < 1.3);
}

TEST_CASE("phase interference scan shapes") {
  Device dev = noiseless_device(2);
  const double freq = 200.0;

  SUBCASE("zero AC crosstalk gives a flat trace") {
    dev.network.x_ac[{0, 1}].value = {0, 0, 0, 0};
    VirtualLab lab(dev, 7);
    const auto rec = lab.phase_interference_scan(
        0, 1, 0.3, 0.3, freq, VirtualLab::default_phase_grid());
    for (size_t i = 1; i < rec.y.size(); ++i) {
      CHECK(std::abs(rec.y[i] - rec.y[0]) < 1e-10);
    }
  }

  SUBCASE("small planted X: peak-to-peak ~ 2 |slope| X amp_B") {
    const double x_ac = 2e-3;
    dev.network.x_ac[{0, 1}].value = {x_ac, x_ac, x_ac, x_ac};
    VirtualLab lab(dev, 7);
    const ModulationResponse& resp = lab.response_at_bias(0, 0.0);
    const double amp_t_phi0 = max_sensitivity_amp(resp);
    const double conv_t = dev.flux_lines[0].ac_volts_per_phi0.at(freq);
    const double conv_a = dev.flux_lines[1].ac_volts_per_phi0.at(freq);
    const double amp_b_phi0 = 0.3;
    const auto rec = lab.phase_interference_scan(
        0, 1, amp_t_phi0 * conv_t, amp_b_phi0 * conv_a, freq,
        VirtualLab::default_phase_grid(64));
    const auto [lo, hi] = std::minmax_element(rec.y.begin(), rec.y.end());
    const double ptp = *hi - *lo;
    const double expected =
        2.0 * std::abs(resp.slope(amp_t_phi0)) * 1e3 * x_ac * amp_b_phi0;
    CHECK(ptp == doctest::Approx(expected).epsilon(0.02));
  }

  SUBCASE("line phase offsets move the extremum accordingly") {
    const double x_ac = 5e-3;
    dev.network.x_ac[{0, 1}].value = {x_ac, x_ac, x_ac, x_ac};
    dev.flux_lines[1].phase_offset_rad = 0.9;
    VirtualLab lab(dev, 7);
    const auto grid = VirtualLab::default_phase_grid(256);
    const auto rec = lab.phase_interference_scan(0, 1, 0.25, 0.25, freq, grid);
    // largest |mean shift| when the adversary tone arrives in phase:
    // theta + offset_B = 0 (mod 2 pi)
    const size_t imax =
        std::min_element(rec.y.begin(), rec.y.end()) - rec.y.begin();
    const double theta_star = grid[imax];
    const double expected = 2.0 * M_PI - 0.9;
    CHECK(std::abs(std::remainder(theta_star - expected, 2.0 * M_PI)) < 0.05);
  }
}

TEST_CASE("experiments are bit-identical under a fixed seed") {
  TestDeviceOptions opt;
  opt.n_qubits = 2;
  Device dev = make_device(opt);
  auto run_once = [&] {
    VirtualLab lab(dev, 123456);
    const auto grid = lab.default_resonator_grid(0);
    auto rec = lab.resonator_scan(0, 1, 1.0, grid);
    auto rec2 = lab.phase_interference_scan(0, 1, 0.2, 0.2, 200.0,
                                            VirtualLab::default_phase_grid());
    rec.y.insert(rec.y.end(), rec2.y.begin(), rec2.y.end());
    return rec.y;
  };
  const auto a = run_once();
  const auto b = run_once();
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("run-time accounting reproduces the shipped latency table") {
  TestDeviceOptions opt;
  opt.n_qubits = 2;
  Device dev = make_device(opt);
  VirtualLab lab(dev, 5);

  // resonator method: 3 traces
  double resonator_s = 0.0;
  for (const auto& rec : dc_resonator_scan(lab, 0, 1)) {
    resonator_s += rec.elapsed_s;
  }
  // qubit method: 2 slope records
  const DcQubitRecords qrec = dc_qubit_scan(lab, 0, 1);
  const double qubit_s = qrec.own.elapsed_s + qrec.adversary.elapsed_s;
  // AC method: two amplitude calibrations plus one phase scan
  const double f = 200.0;
  double ac_s = lab.amplitude_scan(0, lab.default_amp_grid(0, f), f).elapsed_s +
                lab.amplitude_scan(1, lab.default_amp_grid(1, f), f).elapsed_s +
                lab.phase_interference_scan(0, 1, 0.2, 0.2, f,
                                            VirtualLab::default_phase_grid())
                    .elapsed_s;

  CHECK(resonator_s == doctest::Approx(80.0).epsilon(0.05));
  CHECK(qubit_s == doctest::Approx(235.0).epsilon(0.05));
  CHECK(ac_s == doctest::Approx(385.0).epsilon(0.05));
  CHECK(resonator_s < qubit_s);
  CHECK(qubit_s < ac_s);
}

TEST_CASE("experiment record CSV round trip") {
  ExperimentRecord rec;
  rec.x = {1.0, 2.0};
  rec.y = {0.1234567890123, -5.5};
  rec.y_sigma = {0.01, 0.01};
  rec.method = "ac";
  rec.qubits = {0, 1};
  rec.shots_per_point = 500;
  rec.elapsed_s = 12.5;
  const std::string stem = "/tmp/fluxtalk_test_record";
  rec.write(stem);
  const std::string csv = read_text_file(stem + ".csv");
  CHECK(csv.find("x,y,y_sigma") == 0);
  CHECK(csv.find("0.1234567890123") != std::string::npos);
  const auto meta = nlohmann::json::parse(read_text_file(stem + ".meta.json"));
  CHECK(meta.at("method") == "ac");
  CHECK(meta.at("shots_per_point") == 500);
}

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

#include <cmath>
#include <nlohmann/json.hpp>

#include "fluxtalk/device.hpp"
#include "fluxtalk/errors.hpp"
#include "fluxtalk/optimize.hpp"
#include "fluxtalk/rng.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace fluxtalk;
using namespace fluxtalk::testing;

TEST_CASE("f01 at zero flux is sqrt(8 EJ EC) - EC") {
  TunableTransmon q;
  q.id = 0;
  q.ej1_ghz = 10.0;
  q.ej2_ghz = 5.0;
  q.ec_ghz = 0.2;
  q.validate();
  CHECK(f01(q, 0.0) ==
        doctest::Approx(std::sqrt(8.0 * 15.0 * 0.2) - 0.2).epsilon(1e-14));
  // at half flux the junction asymmetry d floors EJ at d * EJsum
  const double d = q.asymmetry();
  CHECK(f01(q, 0.5) ==
        doctest::Approx(std::sqrt(8.0 * d * 15.0 * 0.2) - 0.2).epsilon(1e-12));
}

TEST_CASE("f01 is periodic, even, max at 0, min at +-1/2") {
  const TunableTransmon q = q0_like();
  for (int k = 0; k <= 40; ++k) {
    const double phi = -1.0 + 2.0 * k / 40.0;
    CHECK(std::abs(f01(q, phi) - f01(q, phi + 1.0)) < 1e-12);
    CHECK(std::abs(f01(q, phi) - f01(q, -phi)) < 1e-12);
    CHECK(f01(q, phi) <= f01(q, 0.0) + 1e-12);
    CHECK(f01(q, phi) >= f01(q, 0.5) - 1e-12);
  }
}

TEST_CASE("spectrum inversion reproduces the target frequency and slope scale") {
  // independent 2-parameter root-find oracle on raw junction energies:
  // inner bisection solves f01(0) = f_target for ejsum at fixed ec, outer
  // bisection matches the anharmonicity
  const double f_target = 4.678, eta_target = -0.186, d = 0.75;
  auto raw_transmon = [&](double ejsum, double ec) {
    TunableTransmon t;
    t.ej1_ghz = 0.5 * ejsum * (1.0 + d);
    t.ej2_ghz = 0.5 * ejsum * (1.0 - d);
    t.ec_ghz = ec;
    return t;
  };
  auto ejsum_for = [&](double ec) {
    return bisect_root(
        [&](double e) { return f01(raw_transmon(e, ec), 0.0) - f_target; },
        1.0, 100.0, 1e-12);
  };
  const double ec_oracle = bisect_root(
      [&](double ec) {
        return anharmonicity(raw_transmon(ejsum_for(ec), ec), 0.0) - eta_target;
      },
      0.05, 0.5, 1e-12);
  const TunableTransmon q =
      TunableTransmon::from_spectrum(0, f_target, eta_target, d);
  CHECK(q.ej_sum() == doctest::Approx(ejsum_for(ec_oracle)).epsilon(1e-9));
  CHECK(std::abs(f01(q, 0.0) - f_target) < 1e-6);  // 1 kHz
  CHECK(anharmonicity(q, 0.0) == doctest::Approx(eta_target).epsilon(1e-9));
  CHECK(ec_oracle == doctest::Approx(0.186).epsilon(1e-9));
  // most-flux-sensitive point: slope magnitude ~2 GHz/Phi0 at Phi0/4
  CHECK(std::abs(f01_flux_slope(q, 0.25)) > 1.8);
  CHECK(std::abs(f01_flux_slope(q, 0.25)) < 2.3);
  // analytic slope agrees with finite differences
  const double fd =
      fd_slope([&](double p) { return f01(q, p); }, 0.17, 1e-5);
  CHECK(f01_flux_slope(q, 0.17) == doctest::Approx(fd).epsilon(1e-7));
}

TEST_CASE("transmon validation rejects bad configs") {
  TunableTransmon q;
  q.ej1_ghz = 1.0;
  q.ej2_ghz = 2.0;  // inverted ordering
  q.ec_ghz = 0.2;
  CHECK_THROWS_AS(q.validate(), ConfigError);
  q.ej1_ghz = 2.0;
  q.ej2_ghz = 1.0;  // EJ/EC = 15 < 20
  CHECK_THROWS_AS(q.validate(), ConfigError);
  q.ec_ghz = -0.1;
  CHECK_THROWS_AS(q.validate(), ConfigError);
}

TEST_CASE("anharmonicity is -EC and flux independent") {
  TunableTransmon q;
  q.ej1_ghz = 12.0;
  q.ej2_ghz = 4.0;
  q.ec_ghz = 0.2;
  CHECK(anharmonicity(q, 0.0) == doctest::Approx(-0.2));
  CHECK(anharmonicity(q, 0.0) == anharmonicity(q, 0.25));
}

TEST_CASE("dressed resonator: vanishing pull, chi value, periodicity") {
  const TunableTransmon q = q0_like();
  Resonator res;
  res.qubit_id = 0;
  res.g_ghz = 0.0545;

  SUBCASE("far-detuned limit returns the bare frequency") {
    // the pull |g^2/Delta| vanishes as Delta -> -inf
    res.f_bare_ghz = 500.0;
    const double pull_500 =
        std::abs(dressed_resonator_freq(res, q, 0.0) - res.f_bare_ghz);
    res.f_bare_ghz = 50000.0;
    const double pull_5e4 =
        std::abs(dressed_resonator_freq(res, q, 0.0) - res.f_bare_ghz);
    CHECK(pull_500 < 1e-5);
    CHECK(pull_5e4 < 1e-7);
    CHECK(pull_5e4 < 0.011 * pull_500);  // ~1/Delta scaling
  }

  SUBCASE("state-dependent shift matches the device table") {
    res.f_bare_ghz = 5.957;
    // chi for the shipped g reproduces the tabulated -0.59 MHz
    CHECK(dispersive_shift(res, q, 0.0) * 1e3 ==
          doctest::Approx(-0.59).epsilon(0.02));
  }

  SUBCASE("inherits the transmon's flux periodicity") {
    res.f_bare_ghz = 5.957;
    for (double phi : {-0.3, 0.1, 0.45}) {
      CHECK(std::abs(dressed_resonator_freq(res, q, phi) -
                     dressed_resonator_freq(res, q, phi + 1.0)) < 1e-12);
    }
  }

  SUBCASE("dispersive violation throws") {
    res.f_bare_ghz = f01(q, 0.0) + 0.3;  // |Delta| = 0.3 < 10 g = 0.545
    CHECK_THROWS_AS(dressed_resonator_freq(res, q, 0.0), DispersiveViolation);
  }
}

TEST_CASE("effective flux: two-tone phasor special cases") {
  TestDeviceOptions opt;
  opt.n_qubits = 2;
  opt.with_ac = true;
  Device dev = make_device(opt);
  dev.network.x_dc(0, 1) = 0.01;
  FrequencyTable flat;
  flat.freq_mhz = {50, 500};
  flat.value = {0.01, 0.01};
  dev.network.x_ac[{0, 1}] = flat;

  FluxProgram prog;
  prog.unit = FluxUnit::Phi0;
  prog.add_tone(0, {0.3, 200.0, 0.0, 100.0});

  SUBCASE("collinear tones add amplitudes") {
    prog.add_tone(1, {0.3, 200.0, 0.0, 100.0});
    const EffectiveFlux eff = effective_flux(dev, prog, 0);
    REQUIRE(eff.tones.size() == 1);
    CHECK(eff.tones[0].amp == doctest::Approx(0.303).epsilon(1e-12));
  }

  SUBCASE("quadrature tones add in quadrature") {
    prog.add_tone(1, {0.3, 200.0, M_PI / 2.0, 100.0});
    const EffectiveFlux eff = effective_flux(dev, prog, 0);
    REQUIRE(eff.tones.size() == 1);
    CHECK(eff.tones[0].amp ==
          doctest::Approx(std::hypot(0.3, 0.003)).epsilon(1e-12));
  }

  SUBCASE("exact square-root interference formula") {
    const double theta = 1.234;
    prog.add_tone(1, {0.3, 200.0, theta, 100.0});
    const EffectiveFlux eff = effective_flux(dev, prog, 0);
    const double expected = std::sqrt(0.3 * 0.3 + 0.003 * 0.003 +
                                      2.0 * 0.3 * 0.003 * std::cos(theta));
    CHECK(eff.tones[0].amp == doctest::Approx(expected).epsilon(1e-12));
  }

  SUBCASE("distinct frequencies stay distinct") {
    prog.add_tone(1, {0.3, 300.0, 0.0, 100.0});
    const EffectiveFlux eff = effective_flux(dev, prog, 0);
    CHECK(eff.tones.size() == 2);
  }
}

TEST_CASE("effective flux vs brute-force time-domain oracle") {
  TestDeviceOptions opt;
  opt.n_qubits = 4;
  Device dev = make_device(opt);
  Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    FluxProgram prog;
    prog.unit = FluxUnit::Phi0;
    std::vector<double> amps, phases;
    for (int j = 0; j < 4; ++j) {
      const double amp = 0.05 + 0.3 * rng.uniform();
      const double phase = 2.0 * M_PI * rng.uniform();
      prog.add_tone(j, {amp, 200.0, phase, 100.0});
      double ratio = 1.0;
      if (j != 0) ratio = dev.network.x_ac.at({0, j}).at(200.0);
      amps.push_back(ratio * amp);
      phases.push_back(phase);
    }
    const EffectiveFlux eff = effective_flux(dev, prog, 0);
    REQUIRE(eff.tones.size() == 1);
    const double oracle = summed_tone_amplitude(amps, phases);
    CHECK(eff.tones[0].amp == doctest::Approx(oracle).epsilon(1e-9));
  }
}

TEST_CASE("effective flux is linear in each line's drive (superposition)") {
  TestDeviceOptions opt;
  opt.n_qubits = 3;
  Device dev = make_device(opt);
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const double a0 = 0.2 * rng.uniform(), a1 = 0.2 * rng.uniform();
    const double p0 = 2 * M_PI * rng.uniform(), p1 = 2 * M_PI * rng.uniform();
    auto complex_tone = [&](const EffectiveFlux& eff) {
      REQUIRE(eff.tones.size() == 1);
      return std::polar(eff.tones[0].amp, eff.tones[0].phase_rad);
    };
    FluxProgram both, only0, only1;
    for (auto* p : {&both, &only0, &only1}) p->unit = FluxUnit::Phi0;
    both.add_tone(1, {a0, 150.0, p0, 50.0});
    both.add_tone(2, {a1, 150.0, p1, 50.0});
    only0.add_tone(1, {a0, 150.0, p0, 50.0});
    only1.add_tone(2, {a1, 150.0, p1, 50.0});
    const auto sum = complex_tone(effective_flux(dev, both, 0));
    const auto part =
        complex_tone(effective_flux(dev, only0, 0)) +
        complex_tone(effective_flux(dev, only1, 0));
    CHECK(std::abs(sum - part) < 1e-12);
  }
}

TEST_CASE("small-crosstalk expansion bound") {
  // |exact - (A + X B cos th)| <= X^2 B^2 / (2 A) for X <= 0.1
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = 0.1 + 0.4 * rng.uniform();
    const double b = 0.1 + 0.4 * rng.uniform();
    const double x = 0.1 * rng.uniform();
    const double th = 2.0 * M_PI * rng.uniform();
    const double exact = std::sqrt(a * a + x * x * b * b +
                                   2.0 * x * a * b * std::cos(th));
    const double approx = a + x * b * std::cos(th);
    CHECK(std::abs(exact - approx) <= x * x * b * b / (2.0 * a) + 1e-12);
  }
}

TEST_CASE("DC crosstalk composes through the matrix") {
  TestDeviceOptions opt;
  opt.n_qubits = 3;
  Device dev = make_device(opt);
  FluxProgram prog;
  prog.unit = FluxUnit::Phi0;
  prog.set_dc(0, 0.25).set_dc(1, 1.0).set_dc(2, -0.5);
  const EffectiveFlux eff = effective_flux(dev, prog, 0);
  const double expected = 0.25 + dev.network.x_dc(0, 1) * 1.0 +
                          dev.network.x_dc(0, 2) * -0.5;
  CHECK(eff.dc_phi0 == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("tone frequency outside the AC table domain throws") {
  TestDeviceOptions opt;
  opt.n_qubits = 2;
  Device dev = make_device(opt);
  dev.network.x_ac[{0, 1}].freq_mhz = {100, 200};
  dev.network.x_ac[{0, 1}].value = {0.01, 0.01};
  FluxProgram prog;
  prog.unit = FluxUnit::Phi0;
  prog.add_tone(1, {0.1, 300.0, 0.0, 50.0});
  CHECK_THROWS_AS(effective_flux(dev, prog, 0), FrequencyOutOfRange);
}

TEST_CASE("program validation enforces tone band and durations") {
  FluxProgram prog;
  prog.unit = FluxUnit::Phi0;
  prog.add_tone(0, {0.1, 30.0, 0.0, 50.0});  // below 50 MHz
  CHECK_THROWS_AS(prog.validate(), ConfigError);
  prog.lines.clear();
  prog.add_tone(0, {0.1, 100.0, 0.0, -1.0});  // bad duration
  CHECK_THROWS_AS(prog.validate(), ConfigError);
}

TEST_CASE("crosstalk matrix invariants") {
  TestDeviceOptions opt;
  opt.n_qubits = 3;
  Device dev = make_device(opt);
  dev.network.x_dc(1, 1) = 0.99;  // diagonal must be exactly 1
  CHECK_THROWS_AS(dev.validate(), ConfigError);
  dev.network.x_dc(1, 1) = 1.0;
  dev.network.x_dc(0, 2) = 0.6;  // off-diagonal bound
  CHECK_THROWS_AS(dev.validate(), ConfigError);
}

TEST_CASE("device JSON round trip preserves physics") {
  TestDeviceOptions opt;
  opt.n_qubits = 3;
  const Device dev = make_device(opt);
  const Device back = Device::from_json(dev.to_json());
  CHECK(back.size() == dev.size());
  for (int i = 0; i < dev.size(); ++i) {
    for (double phi : {0.0, 0.13, 0.37}) {
      CHECK(f01(back.transmons[i], phi) ==
            doctest::Approx(f01(dev.transmons[i], phi)).epsilon(1e-12));
    }
  }
  CHECK((back.network.x_dc - dev.network.x_dc).norm() < 1e-14);
  CHECK(back.noise.dc_qubit.shots_per_point == dev.noise.dc_qubit.shots_per_point);
}

TEST_CASE("config accepts spectrum-style transmon definitions") {
  nlohmann::json doc = {
      {"transmons",
       {{{"id", 0},
         {"f01_max_ghz", 4.678},
         {"anharmonicity_mhz", -186.0},
         {"asymmetry", 0.75}}}},
      {"resonators", {{{"qubit", 0}, {"f_bare_ghz", 5.957}, {"g_ghz", 0.0545}}}},
      {"flux_lines",
       {{{"qubit", 0},
         {"dc_volts_per_phi0", 0.9},
         {"ac_volts_per_phi0",
          {{"freq_mhz", {50.0, 500.0}}, {"value", {0.95, 1.05}}}}}}},
      {"crosstalk_dc", {{1.0}}}};
  const Device dev = Device::from_json(doc);
  CHECK(f01(dev.transmons[0], 0.0) == doctest::Approx(4.678).epsilon(1e-7));
  CHECK(dev.transmons[0].ec_ghz == doctest::Approx(0.186));
}

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

#include "fluxtalk/gate.hpp"

#include <cmath>
#include <complex>

#include "fluxtalk/errors.hpp"

namespace fluxtalk {

namespace {

using complexd = std::complex<double>;

constexpr double kAngular = 2.0 * M_PI * 1e-3;  // MHz -> rad/ns

}  // namespace

Eigen::Matrix4cd cz_ideal() {
  Eigen::Matrix4cd u = Eigen::Matrix4cd::Identity();
  u(3, 3) = -1.0;
  return u;
}

Eigen::Matrix4cd cz_unitary(const CZModel& model) {
  const double tau = model.tau_ns;
  const double g0 = kAngular * model.g_eff_mhz;
  const double g = kAngular * (model.g_eff_mhz + model.delta_g_mhz);
  const double dd = kAngular * model.delta_mean_shift_mhz;
  const double dw = kAngular * model.delta_f01_mhz;

  const double big_g = std::sqrt(g * g + 0.25 * dd * dd);
  const double dg = big_g - g0;
  const complexd u11 =
      -(std::cos(dg * tau) - complexd(0.0, 1.0) * (dd / (2.0 * big_g)) *
                                 std::sin(dg * tau)) *
      std::exp(complexd(0.0, -0.5 * dd * tau));
  const complexd frame = std::exp(complexd(0.0, -dw * tau));

  Eigen::Matrix4cd u = Eigen::Matrix4cd::Zero();
  u(0, 0) = 1.0;
  u(1, 1) = frame;  // tunable qubit's |1> picks up the stale frame phase
  u(2, 2) = 1.0;
  u(3, 3) = frame * u11;
  return u;
}

double average_infidelity(const Eigen::Matrix4cd& actual,
                          const Eigen::Matrix4cd& ideal) {
  const complexd tr = (ideal.adjoint() * actual).trace();
  const double r = (16.0 - std::norm(tr)) / 20.0;
  return std::max(0.0, r);
}

LeadingOrderInfidelity leading_order_infidelity(const CZModel& model) {
  const double tau = model.tau_ns;
  const double x = kAngular * model.delta_f01_mhz * tau;        // dw tau
  const double y = kAngular * model.delta_mean_shift_mhz * tau; // dD tau
  const double z = kAngular * model.delta_g_mhz * tau;          // dg tau
  LeadingOrderInfidelity r;
  r.r_general = 0.2 * (x - 0.25 * y) * (x - 0.25 * y) + y * y / 40.0 +
                0.2 * z * z;
  r.r02 = 27.0 / 80.0 * x * x + 0.2 * z * z;
  r.r20 = 11.0 / 80.0 * x * x + 0.2 * z * z;
  return r;
}

double leading_order_infidelity_cz02(double delta_f01_mhz, double tau_ns) {
  const double ft = delta_f01_mhz * 1e-3 * tau_ns;  // dimensionless
  return 27.0 * M_PI * M_PI / 20.0 * ft * ft;
}

CZModel calibrate_cz(const Device& device, const GateContext& ctx) {
  const ModulationResponse resp = fourier_coefficients(
      device.transmon(ctx.tunable_qubit), kDefaultHarmonics, ctx.bias_phi0);
  const double dbar_ghz = resp.mean_detuning(ctx.gate_amp_phi0);
  CZModel model;
  model.kind = ctx.kind;
  model.g_eff_mhz = ctx.g_eff_mhz;
  model.tau_ns = CZModel::tau_for_g_eff(ctx.g_eff_mhz);
  model.f_m_mhz = 0.5 * std::abs(dbar_ghz) * 1e3;
  return model;
}

namespace {

GatePerturbations perturbations_impl(const Device& device,
                                     const GateContext& ctx,
                                     const FluxProgram& adversary,
                                     PerturbationPath path, bool worst_case) {
  const CZModel cal = calibrate_cz(device, ctx);
  const double f_m = cal.f_m_mhz;
  const int qt = ctx.tunable_qubit;

  // adversary contribution alone (crosstalk-scaled, phasor-combined)
  const EffectiveFlux adv = effective_flux(device, adversary, qt);

  // gate tone rides on the qubit's own line
  FluxProgram gate_only;
  gate_only.unit = FluxUnit::Phi0;
  gate_only.set_dc(qt, ctx.bias_phi0);
  gate_only.add_tone(qt, {ctx.gate_amp_phi0, f_m, 0.0, cal.tau_ns});

  const EffectiveFlux gate_eff = effective_flux(device, gate_only, qt);
  const double bias_cal = gate_eff.dc_phi0;
  const double bias_with = bias_cal + adv.dc_phi0;

  // combine the gate tone with adversary tones per frequency
  double amp_at_fm = ctx.gate_amp_phi0;
  std::vector<double> other_amps;
  if (worst_case) {
    for (const Tone& t : adv.tones) {
      if (std::abs(t.freq_mhz - f_m) < 1e-9) {
        amp_at_fm += t.amp;  // fully constructive
      } else {
        other_amps.push_back(t.amp);
      }
    }
  } else {
    complexd phasor = ctx.gate_amp_phi0;  // gate tone at phase 0
    for (const Tone& t : adv.tones) {
      if (std::abs(t.freq_mhz - f_m) < 1e-9) {
        phasor += t.amp * std::exp(complexd(0.0, t.phase_rad));
      } else {
        other_amps.push_back(t.amp);
      }
    }
    amp_at_fm = std::abs(phasor);
  }

  const TunableTransmon& q = device.transmon(qt);
  const ModulationResponse resp_cal =
      fourier_coefficients(q, kDefaultHarmonics, bias_cal);
  const double f_cal = resp_cal.mean_f01(ctx.gate_amp_phi0);

  GatePerturbations pert;
  pert.delta_amp_phi0 = amp_at_fm - ctx.gate_amp_phi0;

  double f_with;
  if (path == PerturbationPath::Exact) {
    const ModulationResponse resp_with =
        bias_with == bias_cal ? resp_cal
                              : fourier_coefficients(q, kDefaultHarmonics,
                                                     bias_with);
    std::vector<double> amps = other_amps;
    amps.push_back(amp_at_fm);
    f_with = resp_with.mean_f01(amps);
  } else {
    const double d = pert.delta_amp_phi0;
    f_with = f_cal + resp_cal.slope(ctx.gate_amp_phi0) * d +
             0.5 * resp_cal.curvature(ctx.gate_amp_phi0) * d * d;
  }

  pert.delta_f01_mhz = (f_with - f_cal) * 1e3;
  pert.delta_mean_shift_mhz = (ctx.kind == CZKind::CZ02)
                                  ? -pert.delta_f01_mhz
                                  : pert.delta_f01_mhz;
  pert.delta_g_mhz = ctx.g_eff_slope_mhz_per_phi0 * pert.delta_amp_phi0;
  return pert;
}

}  // namespace

GatePerturbations crosstalk_to_perturbations(const Device& device,
                                             const GateContext& ctx,
                                             const FluxProgram& adversary,
                                             PerturbationPath path) {
  return perturbations_impl(device, ctx, adversary, path, false);
}

GatePerturbations worst_case_perturbations(const Device& device,
                                           const GateContext& ctx,
                                           const FluxProgram& adversary) {
  return perturbations_impl(device, ctx, adversary, PerturbationPath::Exact,
                            true);
}

CZModel perturbed_model(const Device& device, const GateContext& ctx,
                        const GatePerturbations& pert) {
  CZModel model = calibrate_cz(device, ctx);
  model.delta_f01_mhz = pert.delta_f01_mhz;
  model.delta_mean_shift_mhz = pert.delta_mean_shift_mhz;
  model.delta_g_mhz = pert.delta_g_mhz;
  return model;
}

std::vector<ResiliencePoint> resilience_sweep(
    const Device& device, const GateContext& base, int adversary_qubit,
    const std::vector<double>& adversary_amps_volts,
    const std::vector<double>& gate_amps_phi0, double adversary_phase_rad) {
  std::vector<ResiliencePoint> table;
  const Eigen::Matrix4cd ideal = cz_ideal();
  for (double gate_amp : gate_amps_phi0) {
    GateContext ctx = base;
    ctx.gate_amp_phi0 = gate_amp;
    const CZModel cal = calibrate_cz(device, ctx);
    for (double adv_amp : adversary_amps_volts) {
      ResiliencePoint pt;
      pt.gate_amp_phi0 = gate_amp;
      pt.adversary_amp_volts = adv_amp;
      pt.gate_tau_ns = cal.tau_ns;
      pt.f_m_mhz = cal.f_m_mhz;
      pt.baseline_fidelity =
          1.0 - average_infidelity(cz_unitary(cal), ideal);
      if (adv_amp == 0.0) {
        pt.adversarial_fidelity = pt.baseline_fidelity;
        pt.predicted_fidelity = pt.baseline_fidelity;
        table.push_back(pt);
        continue;
      }
      FluxProgram adversary;
      adversary.unit = FluxUnit::Volts;
      adversary.add_tone(adversary_qubit,
                         {adv_amp, cal.f_m_mhz, adversary_phase_rad, cal.tau_ns});

      const GatePerturbations pert =
          crosstalk_to_perturbations(device, ctx, adversary);
      pt.delta_f01_mhz = pert.delta_f01_mhz;
      pt.adversarial_fidelity =
          1.0 - average_infidelity(cz_unitary(perturbed_model(device, ctx, pert)),
                                   ideal);
      const GatePerturbations worst =
          worst_case_perturbations(device, ctx, adversary);
      pt.predicted_fidelity =
          1.0 - std::min(1.0, leading_order_infidelity_cz02(worst.delta_f01_mhz,
                                                            cal.tau_ns));
      table.push_back(pt);
    }
  }
  return table;
}

}  // namespace fluxtalk

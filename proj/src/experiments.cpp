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

#include "fluxtalk/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "fluxtalk/errors.hpp"
#include "fluxtalk/io.hpp"
#include "fluxtalk/optimize.hpp"

namespace fluxtalk {

namespace {

double method_elapsed(const MethodTiming& timing, size_t n_points) {
  return static_cast<double>(n_points) * timing.shots_per_point /
             (timing.shot_rate_khz * 1e3) +
         timing.latency_s;
}

}  // namespace

void ExperimentRecord::validate() const {
  if (x.size() != y.size() || x.size() != y_sigma.size()) {
    throw ConfigError("experiment record arrays must be aligned");
  }
  for (double s : y_sigma) {
    if (!(s > 0.0)) throw ConfigError("experiment record sigmas must be > 0");
  }
}

void ExperimentRecord::write(const std::string& basename) const {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    rows.push_back({format_double(x[i]), format_double(y[i]),
                    format_double(y_sigma[i])});
  }
  write_csv(basename + ".csv", {"x", "y", "y_sigma"}, rows);
  nlohmann::json meta = extra;
  meta["method"] = method;
  meta["qubits"] = qubits;
  meta["shots_per_point"] = shots_per_point;
  meta["elapsed_s"] = elapsed_s;
  meta["points"] = x.size();
  write_text_file(basename + ".meta.json", meta.dump(2) + "\n");
}

double CalibrationSnapshot::ac_volts_per_phi0(const Device& device,
                                              int qubit_id,
                                              double freq_mhz) const {
  return device.flux_line(qubit_id).ac_volts_per_phi0.at(freq_mhz) *
         ac_conv_scale.at(qubit_id);
}

namespace {

CalibrationSnapshot make_snapshot(const Device& device, std::uint64_t seed) {
  CalibrationSnapshot snap;
  snap.conversion_rel_sigma = device.noise.conversion_rel_sigma;
  Rng rng(mix_seed(seed, hash_tag("calibration-snapshot")));
  for (const auto& q : device.transmons) {
    const FluxLine& line = device.flux_line(q.id);
    snap.dc_volts_per_phi0[q.id] =
        line.dc_volts_per_phi0 *
        (1.0 + snap.conversion_rel_sigma * rng.gaussian());
    snap.ac_conv_scale[q.id] = 1.0 + snap.conversion_rel_sigma * rng.gaussian();
    snap.f01_max_ghz[q.id] = f01(q, 0.0);
    snap.ec_ghz[q.id] = q.ec_ghz;
    snap.asymmetry[q.id] = q.asymmetry();
    const Resonator& r = device.resonator(q.id);
    snap.f_bare_ghz[q.id] = r.f_bare_ghz;
    snap.g_ghz[q.id] = r.g_ghz;
  }
  return snap;
}

}  // namespace

VirtualLab::VirtualLab(const Device& device, std::uint64_t seed,
                       LabFidelity fidelity)
    : device_(&device),
      seed_(seed),
      fidelity_(fidelity),
      rng_(mix_seed(seed, hash_tag("virtual-lab"))),
      snapshot_(make_snapshot(device, seed)) {}

const ModulationResponse& VirtualLab::response_at_bias(int target,
                                                       double bias_phi0) const {
  const int idx = device_->index_of(target);
  const auto key = std::make_pair(idx, bias_phi0);
  auto it = response_cache_.find(key);
  if (it == response_cache_.end()) {
    it = response_cache_
             .emplace(key, fourier_coefficients(device_->transmons[idx],
                                                kDefaultHarmonics, bias_phi0))
             .first;
  }
  return it->second;
}

double VirtualLab::true_static_f01(int target, const FluxProgram& program) const {
  const EffectiveFlux eff = effective_flux(*device_, program, target);
  return f01(device_->transmon(target), eff.dc_phi0);
}

double VirtualLab::true_mean_f01(int target, const FluxProgram& program) const {
  const EffectiveFlux eff = effective_flux(*device_, program, target);
  if (eff.tones.empty()) return f01(device_->transmon(target), eff.dc_phi0);
  const ModulationResponse& resp = response_at_bias(target, eff.dc_phi0);
  std::vector<double> amps;
  amps.reserve(eff.tones.size());
  for (const Tone& t : eff.tones) amps.push_back(t.amp);
  return resp.mean_f01(amps);
}

ExperimentRecord VirtualLab::resonator_scan(
    int target, int adversary, double adversary_bias_phi0,
    const std::vector<double>& bias_grid_volts) {
  if (bias_grid_volts.size() < 8) {
    throw ConfigError("resonator_scan: bias grid too small");
  }
  const FluxLine& line = device_->flux_line(target);
  const auto [vmin, vmax] =
      std::minmax_element(bias_grid_volts.begin(), bias_grid_volts.end());
  if ((*vmax - *vmin) / line.dc_volts_per_phi0 < 1.0) {
    throw ConfigError("resonator_scan: grid must cover >= 1 flux period");
  }
  const TunableTransmon& q = device_->transmon(target);
  const Resonator& res = device_->resonator(target);
  const double sigma_ghz = device_->noise.resonator_fit_sigma_mhz * 1e-3;

  ExperimentRecord rec;
  rec.method = "dc_resonator";
  rec.qubits = {target, adversary};
  rec.shots_per_point = device_->noise.dc_resonator.shots_per_point;
  // the adversary bias is requested through the lab's (imperfect)
  // conversion knowledge, like a real measurement would
  const double adv_volts =
      adversary_bias_phi0 * snapshot_.dc_volts_per_phi0.at(adversary);
  for (double v : bias_grid_volts) {
    FluxProgram prog;
    prog.unit = FluxUnit::Volts;
    prog.set_dc(target, v);
    prog.set_dc(adversary, adv_volts);
    const EffectiveFlux eff = effective_flux(*device_, prog, target);
    const double f = dressed_resonator_freq(res, q, eff.dc_phi0);
    rec.x.push_back(v);
    rec.y.push_back(f + sigma_ghz * rng_.gaussian());
    rec.y_sigma.push_back(std::max(sigma_ghz, 1e-12));
  }
  rec.elapsed_s = method_elapsed(device_->noise.dc_resonator, rec.x.size());
  rec.extra = {{"x_unit", "V"},
               {"y_unit", "GHz"},
               {"adversary_bias_phi0", adversary_bias_phi0}};
  return rec;
}

double VirtualLab::ramsey_fast(double truth_ghz, double sigma_mhz) {
  return truth_ghz + sigma_mhz * 1e-3 * rng_.gaussian();
}

FrequencyEstimate VirtualLab::ramsey_full(int target, double truth_ghz,
                                          double /*sigma_mhz*/) {
  // Coarse prior (short spectroscopy prefix), then a detuned fringe fit.
  // The rotating frame is placed 2 MHz below the coarse estimate so the
  // fringe frequency is positive; the delay step keeps the mirror alias
  // of the scanned band outside it.
  const TunableTransmon& q = device_->transmon(target);
  const double coarse_ghz = truth_ghz + 0.3e-3 * rng_.gaussian();
  const double f_ref_ghz = coarse_ghz - 2.0e-3;
  const double delta_mhz = (truth_ghz - f_ref_ghz) * 1e3;

  const int n_delays = 81;
  const double dt_us = 0.14;
  const int shots = device_->noise.dc_qubit.shots_per_point;
  const double t2_us = q.t2_us;
  std::vector<double> t_us(n_delays), p_meas(n_delays), p_sigma(n_delays);
  for (int i = 0; i < n_delays; ++i) {
    t_us[i] = dt_us * i;
    const double p = 0.5 * (1.0 + std::cos(2.0 * M_PI * delta_mhz * t_us[i]) *
                                      std::exp(-t_us[i] / t2_us));
    const int k = rng_.binomial(shots, std::clamp(p, 0.0, 1.0));
    p_meas[i] = static_cast<double>(k) / shots;
    p_sigma[i] = std::max(std::sqrt(0.25 / shots), 1e-6);
  }

  const ResidualFn resid = [&](const Eigen::VectorXd& par) {
    Eigen::VectorXd r(n_delays);
    for (int i = 0; i < n_delays; ++i) {
      const double model =
          par[2] + par[1] * std::cos(2.0 * M_PI * par[0] * t_us[i]) *
                       std::exp(-t_us[i] / t2_us);
      r[i] = (p_meas[i] - model) / p_sigma[i];
    }
    return r;
  };

  // periodogram-style initialization over the expected fringe band
  double best_delta = 2.0, best_chi2 = 1e300;
  for (int k = 0; k <= 300; ++k) {
    Eigen::VectorXd par(3);
    par << 0.5 + 3.0 * k / 300.0, 0.5, 0.5;
    const double chi2 = resid(par).squaredNorm();
    if (chi2 < best_chi2) {
      best_chi2 = chi2;
      best_delta = par[0];
    }
  }
  Eigen::VectorXd x0(3);
  x0 << best_delta, 0.5, 0.5;
  const LsqResult fit = levenberg_marquardt(resid, x0);
  if (!fit.converged || fit.params[0] <= 0.0) {
    throw FitFailure("ramsey_frequency: fringe fit did not converge");
  }
  FrequencyEstimate est;
  est.f01_ghz = f_ref_ghz + fit.params[0] * 1e-3;
  est.sigma_mhz = std::sqrt(std::max(fit.covariance(0, 0), 0.0));
  return est;
}

FrequencyEstimate VirtualLab::ramsey_frequency(int target,
                                               const FluxProgram& program) {
  const EffectiveFlux eff = effective_flux(*device_, program, target);
  const bool modulated = !eff.tones.empty();
  const double sigma_mhz = modulated
                               ? device_->noise.ramsey_freq_sigma_mod_mhz
                               : device_->noise.ramsey_freq_sigma_static_mhz;
  const double truth =
      modulated ? true_mean_f01(target, program) : true_static_f01(target, program);
  if (fidelity_ == LabFidelity::Fast || sigma_mhz == 0.0) {
    return {ramsey_fast(truth, sigma_mhz), std::max(sigma_mhz, 1e-9)};
  }
  return ramsey_full(target, truth, sigma_mhz);
}

ExperimentRecord VirtualLab::amplitude_scan(int target,
                                            const std::vector<double>& amps_volts,
                                            double freq_mhz) {
  const double f01_parked = f01(device_->transmon(target), 0.0);
  const double sigma = device_->noise.ramsey_freq_sigma_mod_mhz;
  // parked reference measured once per scan
  const double ref_err_mhz =
      device_->noise.ramsey_freq_sigma_static_mhz * rng_.gaussian();

  ExperimentRecord rec;
  rec.method = "ac";
  rec.qubits = {target};
  rec.shots_per_point = device_->noise.ac.shots_per_point;
  for (double amp : amps_volts) {
    double mean;
    if (amp == 0.0) {
      mean = f01_parked;
    } else {
      FluxProgram prog;
      prog.unit = FluxUnit::Volts;
      prog.add_tone(target, {amp, freq_mhz, 0.0, 1000.0});
      mean = true_mean_f01(target, prog);
    }
    const double dbar_mhz = (mean - f01_parked) * 1e3;
    rec.x.push_back(amp);
    rec.y.push_back(dbar_mhz + sigma * rng_.gaussian() + ref_err_mhz);
    rec.y_sigma.push_back(std::max(sigma, 1e-9));
  }
  rec.elapsed_s = method_elapsed(device_->noise.ac, rec.x.size());
  rec.extra = {{"x_unit", "V"},
               {"y_unit", "MHz"},
               {"freq_mhz", freq_mhz},
               {"quantity", "mean_shift"}};
  return rec;
}

ExperimentRecord VirtualLab::phase_interference_scan(
    int target, int adversary, double amp_target_volts,
    double amp_adversary_volts, double freq_mhz,
    const std::vector<double>& phase_grid) {
  const double f01_parked = f01(device_->transmon(target), 0.0);
  const double sigma = device_->noise.ramsey_freq_sigma_mod_mhz;
  const double ref_err_mhz =
      device_->noise.ramsey_freq_sigma_static_mhz * rng_.gaussian();

  ExperimentRecord rec;
  rec.method = "ac";
  rec.qubits = {target, adversary};
  rec.shots_per_point = device_->noise.ac.shots_per_point;
  for (double theta : phase_grid) {
    FluxProgram prog;
    prog.unit = FluxUnit::Volts;
    prog.add_tone(target, {amp_target_volts, freq_mhz, 0.0, 1000.0});
    prog.add_tone(adversary, {amp_adversary_volts, freq_mhz, theta, 1000.0});
    const double mean = true_mean_f01(target, prog);
    rec.x.push_back(theta);
    rec.y.push_back((mean - f01_parked) * 1e3 + sigma * rng_.gaussian() +
                    ref_err_mhz);
    rec.y_sigma.push_back(std::max(sigma, 1e-9));
  }
  rec.elapsed_s = method_elapsed(device_->noise.ac, rec.x.size());
  rec.extra = {{"x_unit", "rad"},
               {"y_unit", "MHz"},
               {"freq_mhz", freq_mhz},
               {"amp_target_volts", amp_target_volts},
               {"amp_adversary_volts", amp_adversary_volts},
               {"quantity", "mean_shift"}};
  return rec;
}

std::vector<double> VirtualLab::default_resonator_grid(int target) const {
  const double conv = snapshot_.dc_volts_per_phi0.at(target);
  const int n = 61;
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) {
    grid[i] = conv * (-0.6 + 1.2 * i / (n - 1));
  }
  return grid;
}

std::vector<double> VirtualLab::default_amp_grid(int target, double freq_mhz,
                                                 int n) const {
  const ModulationResponse& resp = response_at_bias(target, 0.0);
  const double sweet = find_sweet_spot(resp);
  const double vmax =
      1.25 * sweet * snapshot_.ac_volts_per_phi0(*device_, target, freq_mhz);
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) grid[i] = vmax * i / (n - 1);
  return grid;
}

std::vector<double> VirtualLab::default_phase_grid(int n) {
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) grid[i] = 2.0 * M_PI * i / n;
  return grid;
}

DcQubitRecords dc_qubit_scan(VirtualLab& lab, int target, int adversary,
                             double own_half_span_phi0) {
  const Device& device = lab.device();
  const CalibrationSnapshot& snap = lab.snapshot();
  const MethodTiming& timing = device.noise.dc_qubit;
  const double conv_t = snap.dc_volts_per_phi0.at(target);
  const double conv_a = snap.dc_volts_per_phi0.at(adversary);

  DcQubitRecords out;
  out.own.method = out.adversary.method = "dc_qubit";
  out.own.qubits = {target, adversary};
  out.adversary.qubits = {target, adversary};
  out.own.shots_per_point = out.adversary.shots_per_point = timing.shots_per_point;

  // f01 vs own flux about the max-sensitivity bias Phi0/4
  for (double dphi : {-own_half_span_phi0, 0.0, own_half_span_phi0}) {
    FluxProgram prog;
    prog.unit = FluxUnit::Volts;
    prog.set_dc(target, (0.25 + dphi) * conv_t);
    const FrequencyEstimate est = lab.ramsey_frequency(target, prog);
    out.own.x.push_back(0.25 + dphi);
    out.own.y.push_back(est.f01_ghz * 1e3);
    out.own.y_sigma.push_back(est.sigma_mhz);
  }
  // f01 vs adversary flux in {-1, 0, +1} Phi0, target parked at Phi0/4
  for (double phi_b : {-1.0, 0.0, 1.0}) {
    FluxProgram prog;
    prog.unit = FluxUnit::Volts;
    prog.set_dc(target, 0.25 * conv_t);
    prog.set_dc(adversary, phi_b * conv_a);
    const FrequencyEstimate est = lab.ramsey_frequency(target, prog);
    out.adversary.x.push_back(phi_b);
    out.adversary.y.push_back(est.f01_ghz * 1e3);
    out.adversary.y_sigma.push_back(est.sigma_mhz);
  }
  out.own.elapsed_s = method_elapsed(timing, out.own.x.size());
  out.adversary.elapsed_s = method_elapsed(timing, out.adversary.x.size());
  out.own.extra = {{"x_unit", "Phi0"}, {"y_unit", "MHz"}, {"axis", "own"}};
  out.adversary.extra = {
      {"x_unit", "Phi0"}, {"y_unit", "MHz"}, {"axis", "adversary"}};
  return out;
}

std::vector<ExperimentRecord> dc_resonator_scan(VirtualLab& lab, int target,
                                                int adversary) {
  const std::vector<double> grid = lab.default_resonator_grid(target);
  std::vector<ExperimentRecord> records;
  for (double bias : {-1.0, 0.0, 1.0}) {
    records.push_back(lab.resonator_scan(target, adversary, bias, grid));
  }
  return records;
}

}  // namespace fluxtalk

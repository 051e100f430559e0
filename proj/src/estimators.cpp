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

#include "fluxtalk/estimators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "fluxtalk/errors.hpp"
#include "fluxtalk/io.hpp"
#include "fluxtalk/optimize.hpp"

namespace fluxtalk {

namespace {

// Fit-internal transmon shape; exact algebraic inversion of the parked
// frequency, no validation so optimizers can probe freely.
TunableTransmon transmon_from_shape(double f01_max_ghz, double asymmetry,
                                    double ec_ghz) {
  const double d = std::clamp(asymmetry, 0.02, 0.98);
  const double ec = std::max(ec_ghz, 1e-4);
  const double fmax = std::max(f01_max_ghz, 10.0 * ec);
  const double ejsum = (fmax + ec) * (fmax + ec) / (8.0 * ec);
  TunableTransmon q;
  q.ec_ghz = ec;
  q.ej1_ghz = 0.5 * ejsum * (1.0 + d);
  q.ej2_ghz = 0.5 * ejsum * (1.0 - d);
  return q;
}

// Dressed-resonator model without the dispersive-regime guard; the fit
// must stay evaluable wherever the optimizer wanders.
double dressed_model(double f_bare, double g, const TunableTransmon& q,
                     double phi) {
  const double delta = f01(q, phi) - f_bare;
  const double eta = -q.ec_ghz;
  const double safe = std::abs(delta) < 1e-4 ? (delta < 0 ? -1e-4 : 1e-4) : delta;
  const double chi = 2.0 * g * g * eta / (safe * (safe + eta));
  return f_bare + g * g / safe + 0.5 * chi;
}

double wrap_offset(double x) {
  double w = x - std::round(x);
  if (w <= -0.5) w += 1.0;
  if (w > 0.5) w -= 1.0;
  return w;
}

constexpr int kFitHarmonics = 40;
constexpr int kFitSamples = 2048;
constexpr double kAdversaryAmpPhi0 = 0.3;

ModulationResponse shape_response(double f01_max_ghz, double asymmetry,
                                  double ec_ghz) {
  const TunableTransmon q = transmon_from_shape(f01_max_ghz, asymmetry, ec_ghz);
  return fourier_coefficients_of([&](double phi) { return f01(q, phi); },
                                 kFitHarmonics, 0.0, kFitSamples);
}

}  // namespace

GlobalPeriodicFit fit_resonator_traces(const std::vector<ExperimentRecord>& traces,
                                       const ResonatorFitHints& hints) {
  if (traces.size() < 2) {
    throw DegenerateTraces("resonator fit needs >= 2 traces");
  }
  const int n_traces = static_cast<int>(traces.size());
  int m = 0;
  for (const auto& t : traces) {
    t.validate();
    m += static_cast<int>(t.x.size());
  }
  const int n_par = 5 + n_traces;

  // params: [volts_per_phi0, f_bare, g, f01_max, asymmetry, offsets...]
  const ResidualFn resid = [&](const Eigen::VectorXd& p) {
    const double conv = std::max(p[0], 1e-6);
    const double f_bare = p[1];
    const double g = std::clamp(p[2], 1e-4, 1.0);
    const TunableTransmon q = transmon_from_shape(p[3], p[4], hints.ec_ghz);
    Eigen::VectorXd r(m);
    int k = 0;
    for (int ti = 0; ti < n_traces; ++ti) {
      const double off = p[5 + ti];
      const auto& tr = traces[ti];
      for (size_t i = 0; i < tr.x.size(); ++i) {
        const double phi = tr.x[i] / conv + off;
        r[k++] = (tr.y[i] - dressed_model(f_bare, g, q, phi)) / tr.y_sigma[i];
      }
    }
    return r;
  };

  auto scan_offset = [&](const Eigen::VectorXd& shared, int ti) {
    const double conv = shared[0];
    const TunableTransmon q = transmon_from_shape(shared[3], shared[4], hints.ec_ghz);
    double best_off = 0.0, best_chi2 = 1e300;
    const auto& tr = traces[ti];
    for (int s = 0; s < 400; ++s) {
      const double off = -0.5 + s / 400.0;
      double chi2 = 0.0;
      for (size_t i = 0; i < tr.x.size(); ++i) {
        const double res =
            (tr.y[i] - dressed_model(shared[1], shared[2], q, tr.x[i] / conv + off)) /
            tr.y_sigma[i];
        chi2 += res * res;
      }
      if (chi2 < best_chi2) {
        best_chi2 = chi2;
        best_off = off;
      }
    }
    return best_off;
  };

  const double d_scales[] = {1.0, 0.85, 1.15, 0.7, 1.3};
  LsqResult best;
  best.chi2 = 1e300;
  for (double ds : d_scales) {
    Eigen::VectorXd p0(n_par);
    p0[0] = hints.volts_per_phi0;
    p0[1] = hints.f_bare_ghz;
    p0[2] = hints.g_ghz;
    p0[3] = hints.f01_max_ghz;
    p0[4] = std::clamp(hints.asymmetry * ds, 0.05, 0.95);
    for (int ti = 0; ti < n_traces; ++ti) p0[5 + ti] = scan_offset(p0, ti);
    const LsqResult fit = levenberg_marquardt(resid, p0);
    if (fit.chi2 < best.chi2) best = fit;
    if (fit.converged && fit.chi2 / std::max(1, m - n_par) < 3.0) break;
  }
  if (best.chi2 / std::max(1, m - n_par) >= 3.0) {
    // derivative-free polish, then one more damped Gauss-Newton pass
    const ScalarFn chi2_fn = [&](const Eigen::VectorXd& p) {
      return resid(p).squaredNorm();
    };
    const NelderMeadResult nm = nelder_mead(chi2_fn, best.params, 0.02, 4000);
    best = levenberg_marquardt(resid, nm.x);
    if (best.chi2 / std::max(1, m - n_par) >= 3.0) {
      std::ostringstream os;
      os << "global periodic fit did not converge (chi2/dof = "
         << best.chi2 / std::max(1, m - n_par) << ")";
      throw FitFailure(os.str());
    }
  }

  GlobalPeriodicFit out;
  out.volts_per_phi0 = best.params[0];
  out.f_bare_ghz = best.params[1];
  out.g_ghz = best.params[2];
  out.f01_max_ghz = best.params[3];
  out.asymmetry = best.params[4];
  out.chi2 = best.chi2;
  out.dof = m - n_par;
  out.offset_covariance = best.covariance.block(5, 5, n_traces, n_traces);
  for (int ti = 0; ti < n_traces; ++ti) {
    out.offsets_phi0.push_back(wrap_offset(best.params[5 + ti]));
    out.offset_sigmas_phi0.push_back(
        std::sqrt(std::max(best.covariance(5 + ti, 5 + ti), 0.0)));
  }
  return out;
}

CrosstalkEstimate fit_dc_resonator(const std::vector<ExperimentRecord>& traces,
                                   const ResonatorFitHints& hints) {
  if (traces.size() < 3) {
    throw DegenerateTraces("dc_resonator needs 3 traces at distinct biases");
  }
  std::vector<double> biases;
  for (const auto& t : traces) {
    if (!t.extra.contains("adversary_bias_phi0")) {
      throw ConfigError("trace is missing adversary_bias_phi0 metadata");
    }
    biases.push_back(t.extra.at("adversary_bias_phi0").get<double>());
  }
  double span = 0.0;
  for (double b : biases) {
    for (double c : biases) span = std::max(span, std::abs(b - c));
  }
  if (span < 1e-9) {
    throw DegenerateTraces("adversary biases provide no lever arm");
  }

  const GlobalPeriodicFit gfit = fit_resonator_traces(traces, hints);

  // offsets vs adversary flux; the slope is the crosstalk ratio
  const LinearFit line =
      weighted_linear_fit(biases, gfit.offsets_phi0, gfit.offset_sigmas_phi0);

  // propagate the offset covariance through the linear-fit weights
  const int k = static_cast<int>(biases.size());
  double sw = 0, swx = 0, swxx = 0;
  std::vector<double> w(k);
  for (int i = 0; i < k; ++i) {
    w[i] = 1.0 / (gfit.offset_sigmas_phi0[i] * gfit.offset_sigmas_phi0[i]);
    sw += w[i];
    swx += w[i] * biases[i];
    swxx += w[i] * biases[i] * biases[i];
  }
  const double det = sw * swxx - swx * swx;
  Eigen::VectorXd coef(k);
  for (int i = 0; i < k; ++i) coef[i] = w[i] * (sw * biases[i] - swx) / det;
  const double slope_var = coef.transpose() * gfit.offset_covariance * coef;

  CrosstalkEstimate est;
  est.to_qubit = traces.front().qubits.at(0);
  est.from_qubit = traces.front().qubits.at(1);
  est.method = "dc_resonator";
  est.value = line.slope;
  const double conv_term = std::abs(est.value) * hints.conversion_rel_sigma;
  est.sigma = std::sqrt(std::max(slope_var, 0.0) + conv_term * conv_term);
  return est;
}

CrosstalkEstimate fit_dc_qubit(const DcQubitRecords& records,
                               const DcQubitHints& hints) {
  records.own.validate();
  records.adversary.validate();
  const LinearFit own =
      weighted_linear_fit(records.own.x, records.own.y, records.own.y_sigma);
  const LinearFit adv = weighted_linear_fit(
      records.adversary.x, records.adversary.y, records.adversary.y_sigma);

  if (std::abs(own.slope) < 10.0 * own.slope_sigma) {
    std::ostringstream os;
    os << "own-flux slope " << own.slope << " MHz/Phi0 is below 10x its error "
       << own.slope_sigma;
    throw ZeroDenominator(os.str());
  }

  CrosstalkEstimate est;
  est.to_qubit = records.own.qubits.at(0);
  est.from_qubit = records.own.qubits.at(1);
  est.method = "dc_qubit";
  est.value = adv.slope / own.slope;

  const double stat2 =
      std::pow(adv.slope_sigma / own.slope, 2) +
      std::pow(adv.slope * own.slope_sigma / (own.slope * own.slope), 2);
  // both lines' conversions enter the ratio
  const double conv = std::abs(est.value) * hints.conversion_rel_sigma * M_SQRT2;
  // uncorrected nonlinearity of f01 across the +-Phi0 adversary span,
  // quoted as a systematic: relative size |f'''/(6 f')| (X^2 - delta^2)
  double sys = 0.0;
  if (hints.f01_max_ghz > 0.0 && hints.ec_ghz > 0.0) {
    const TunableTransmon q =
        transmon_from_shape(hints.f01_max_ghz, hints.asymmetry, hints.ec_ghz);
    const double h = 1e-3;
    const double fp = f01_flux_slope(q, 0.25);
    const double fppp = (f01_flux_slope(q, 0.25 + h) - 2.0 * fp +
                         f01_flux_slope(q, 0.25 - h)) /
                        (h * h);
    const double x2 = est.value * est.value;
    const double d2 = hints.own_half_span_phi0 * hints.own_half_span_phi0;
    sys = std::abs(est.value) * std::abs(fppp / (6.0 * fp)) * std::abs(x2 - d2);
  }
  est.sigma = std::sqrt(stat2 + conv * conv + sys * sys);
  return est;
}

double AmplitudeCalibration::slope_mhz_per_phi0(double amp_phi0) const {
  return response.slope(amp_phi0) * 1e3;
}

AmplitudeCalibration fit_amplitude_calibration(const ExperimentRecord& record,
                                               const AmplitudeFitHints& hints) {
  record.validate();
  if (record.x.size() < 8) {
    throw InsufficientSpan("amplitude scan needs >= 8 points");
  }
  const int m = static_cast<int>(record.x.size());

  // params: [volts_per_phi0, f01_max, asymmetry]; EC held at the measured
  // anharmonicity
  const ResidualFn resid = [&](const Eigen::VectorXd& p) {
    const double conv = std::max(p[0], 1e-6);
    const ModulationResponse resp = shape_response(p[1], p[2], hints.ec_ghz);
    const double f_ref = resp.f_at_bias();
    Eigen::VectorXd r(m);
    for (int i = 0; i < m; ++i) {
      const double model = (resp.mean_f01(record.x[i] / conv) - f_ref) * 1e3;
      r[i] = (record.y[i] - model) / record.y_sigma[i];
    }
    return r;
  };

  const double d_scales[] = {1.0, 0.8, 1.2};
  LsqResult best;
  best.chi2 = 1e300;
  for (double ds : d_scales) {
    Eigen::VectorXd p0(3);
    p0 << hints.volts_per_phi0, hints.f01_max_ghz,
        std::clamp(hints.asymmetry * ds, 0.05, 0.95);
    const LsqResult fit = levenberg_marquardt(resid, p0);
    if (fit.chi2 < best.chi2) best = fit;
    if (fit.converged && fit.chi2 / std::max(1, m - 3) < 3.0) break;
  }
  if (!(best.chi2 / std::max(1, m - 3) < 3.0)) {
    throw FitFailure("amplitude calibration fit did not converge");
  }

  AmplitudeCalibration calib;
  calib.volts_per_phi0 = best.params[0];
  calib.volts_per_phi0_sigma = std::sqrt(std::max(best.covariance(0, 0), 0.0));
  calib.f01_max_ghz = best.params[1];
  calib.asymmetry = best.params[2];
  calib.ec_ghz = hints.ec_ghz;
  if (record.extra.contains("freq_mhz")) {
    calib.freq_mhz = record.extra.at("freq_mhz").get<double>();
  }
  calib.response = shape_response(calib.f01_max_ghz, calib.asymmetry, calib.ec_ghz);
  calib.covariance = best.covariance.block(0, 0, 3, 3);
  calib.chi2 = best.chi2;
  calib.dof = m - 3;
  try {
    calib.sweet_spot_phi0 = find_sweet_spot(calib.response);
  } catch (const NoInteriorMinimum&) {
    throw FitFailure("fitted response has no sweet spot in the search range");
  }
  const double max_amp_phi0 =
      *std::max_element(record.x.begin(), record.x.end()) / calib.volts_per_phi0;
  if (max_amp_phi0 < 0.8 * calib.sweet_spot_phi0) {
    std::ostringstream os;
    os << "scan reaches " << max_amp_phi0 << " Phi0 but the sweet spot is at "
       << calib.sweet_spot_phi0 << " Phi0";
    throw InsufficientSpan(os.str());
  }
  calib.operating_amp_phi0 = max_sensitivity_amp(calib.response);
  return calib;
}

namespace {

double slope_for_calib_params(double conv, double f01_max, double asym,
                              double ec, double amp_volts) {
  const ModulationResponse resp = shape_response(f01_max, asym, ec);
  return std::abs(resp.slope(amp_volts / std::max(conv, 1e-6))) * 1e3;
}

}  // namespace

CrosstalkEstimate fit_ac_crosstalk(const ExperimentRecord& phase_record,
                                   const AmplitudeCalibration& calib_target,
                                   const AmplitudeCalibration& calib_adversary,
                                   double amp_adversary_volts,
                                   bool require_phase) {
  phase_record.validate();
  const SinusoidFit sf =
      fit_sinusoid(phase_record.x, phase_record.y, phase_record.y_sigma);
  if (require_phase && sf.amplitude < 2.0 * sf.amplitude_sigma) {
    std::ostringstream os;
    os << "interference amplitude " << sf.amplitude << " MHz below 2 sigma ("
       << sf.amplitude_sigma << " MHz); phase is undetermined";
    throw AmbiguousPhase(os.str());
  }

  const double amp_target_volts =
      phase_record.extra.at("amp_target_volts").get<double>();
  const double phi_target = amp_target_volts / calib_target.volts_per_phi0;
  const double phi_adv = amp_adversary_volts / calib_adversary.volts_per_phi0;
  const double slope =
      std::abs(calib_target.slope_mhz_per_phi0(phi_target));  // MHz/Phi0
  if (slope <= 0.0 || phi_adv <= 0.0) {
    throw FitFailure("ac crosstalk: degenerate slope or adversary amplitude");
  }
  const double x_value = sf.amplitude / (slope * phi_adv);

  // error budget: sinusoid amplitude, target calibration (slope at the
  // operating point), adversary conversion
  Eigen::Vector3d grad;
  const Eigen::Vector3d p(calib_target.volts_per_phi0, calib_target.f01_max_ghz,
                          calib_target.asymmetry);
  const double s0 = slope_for_calib_params(p[0], p[1], p[2],
                                           calib_target.ec_ghz, amp_target_volts);
  for (int j = 0; j < 3; ++j) {
    Eigen::Vector3d pj = p;
    const double h = 1e-4 * std::max(std::abs(p[j]), 1e-3);
    pj[j] += h;
    grad[j] = (slope_for_calib_params(pj[0], pj[1], pj[2], calib_target.ec_ghz,
                                      amp_target_volts) -
               s0) / h;
  }
  const double slope_var = grad.transpose() * calib_target.covariance * grad;
  const double rel_slope = std::sqrt(std::max(slope_var, 0.0)) / s0;
  const double rel_conv_b =
      calib_adversary.volts_per_phi0_sigma / calib_adversary.volts_per_phi0;

  CrosstalkEstimate est;
  est.to_qubit = phase_record.qubits.at(0);
  est.from_qubit = phase_record.qubits.at(1);
  est.method = "ac";
  est.freq_mhz = calib_target.freq_mhz;
  est.value = x_value;
  const double abs_floor = sf.amplitude_sigma / (slope * phi_adv);
  est.sigma = std::sqrt(abs_floor * abs_floor +
                        x_value * x_value *
                            (rel_slope * rel_slope + rel_conv_b * rel_conv_b));
  return est;
}

CrosstalkEstimate measure_dc_resonator(VirtualLab& lab, int target,
                                       int adversary) {
  const auto traces = dc_resonator_scan(lab, target, adversary);
  const CalibrationSnapshot& snap = lab.snapshot();
  ResonatorFitHints hints;
  hints.volts_per_phi0 = snap.dc_volts_per_phi0.at(target);
  hints.f01_max_ghz = snap.f01_max_ghz.at(target);
  hints.ec_ghz = snap.ec_ghz.at(target);
  hints.f_bare_ghz = snap.f_bare_ghz.at(target);
  hints.g_ghz = snap.g_ghz.at(target);
  hints.asymmetry = snap.asymmetry.at(target);
  hints.conversion_rel_sigma = snap.conversion_rel_sigma;
  return fit_dc_resonator(traces, hints);
}

CrosstalkEstimate measure_dc_qubit(VirtualLab& lab, int target, int adversary) {
  const DcQubitRecords records = dc_qubit_scan(lab, target, adversary);
  const CalibrationSnapshot& snap = lab.snapshot();
  DcQubitHints hints;
  hints.f01_max_ghz = snap.f01_max_ghz.at(target);
  hints.ec_ghz = snap.ec_ghz.at(target);
  hints.asymmetry = snap.asymmetry.at(target);
  hints.conversion_rel_sigma = snap.conversion_rel_sigma;
  return fit_dc_qubit(records, hints);
}

AmplitudeCalibration calibrate_flux_line(VirtualLab& lab, int qubit,
                                         double freq_mhz) {
  const std::vector<double> grid = lab.default_amp_grid(qubit, freq_mhz);
  const ExperimentRecord rec = lab.amplitude_scan(qubit, grid, freq_mhz);
  const CalibrationSnapshot& snap = lab.snapshot();
  AmplitudeFitHints hints;
  hints.volts_per_phi0 = snap.ac_volts_per_phi0(lab.device(), qubit, freq_mhz);
  hints.f01_max_ghz = snap.f01_max_ghz.at(qubit);
  hints.ec_ghz = snap.ec_ghz.at(qubit);
  hints.asymmetry = snap.asymmetry.at(qubit);
  return fit_amplitude_calibration(rec, hints);
}

CrosstalkEstimate measure_ac(VirtualLab& lab, int target, int adversary,
                             double freq_mhz) {
  const AmplitudeCalibration calib_t = calibrate_flux_line(lab, target, freq_mhz);
  const AmplitudeCalibration calib_a =
      calibrate_flux_line(lab, adversary, freq_mhz);
  const double amp_t_volts =
      calib_t.operating_amp_phi0 * calib_t.volts_per_phi0;
  const double amp_a_volts = kAdversaryAmpPhi0 * calib_a.volts_per_phi0;
  const ExperimentRecord rec = lab.phase_interference_scan(
      target, adversary, amp_t_volts, amp_a_volts, freq_mhz,
      VirtualLab::default_phase_grid());
  return fit_ac_crosstalk(rec, calib_t, calib_a, amp_a_volts);
}

std::vector<CrosstalkEstimate> ac_crosstalk_spectrum(
    const Device& device, int target, int adversary,
    const std::vector<double>& freqs_mhz, std::uint64_t seed,
    LabFidelity fidelity) {
  const std::uint64_t salt =
      hash_tag("ac-spectrum") ^
      (static_cast<std::uint64_t>(target) * 1009 + adversary);
  VirtualLab lab(device, mix_seed(seed, salt), fidelity);
  std::vector<CrosstalkEstimate> out;
  for (double f : freqs_mhz) {
    out.push_back(measure_ac(lab, target, adversary, f));
  }
  return out;
}

namespace {

std::vector<CrosstalkEstimate> measure_matrix_impl(
    const Device& device, const std::string& tag, std::uint64_t seed,
    int jobs,
    const std::function<CrosstalkEstimate(VirtualLab&, int, int)>& one_pair) {
  struct Pair {
    int target, adversary;
  };
  std::vector<Pair> pairs;
  for (int t : device.qubit_ids()) {
    for (int a : device.qubit_ids()) {
      if (t != a) pairs.push_back({t, a});
    }
  }
  std::vector<CrosstalkEstimate> out(pairs.size());
  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&] {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= pairs.size()) break;
      try {
        const std::uint64_t salt =
            hash_tag(tag) ^ (static_cast<std::uint64_t>(pairs[i].target) * 1009 +
                             pairs[i].adversary);
        VirtualLab lab(device, mix_seed(seed, salt), LabFidelity::Fast);
        out[i] = one_pair(lab, pairs[i].target, pairs[i].adversary);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };

  const int n_threads = std::max(1, jobs);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int i = 0; i < n_threads; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

}  // namespace

std::vector<CrosstalkEstimate> measure_dc_matrix(const Device& device,
                                                 DcMethod method,
                                                 std::uint64_t seed,
                                                 LabFidelity fidelity,
                                                 int jobs) {
  (void)fidelity;  // matrix runs use the fast path; full is per-pair only
  if (method == DcMethod::Resonator) {
    return measure_matrix_impl(
        device, "dc-matrix-resonator", seed, jobs,
        [](VirtualLab& lab, int t, int a) {
          return measure_dc_resonator(lab, t, a);
        });
  }
  return measure_matrix_impl(
      device, "dc-matrix-qubit", seed, jobs,
      [](VirtualLab& lab, int t, int a) { return measure_dc_qubit(lab, t, a); });
}

std::vector<CrosstalkEstimate> measure_ac_matrix(const Device& device,
                                                 double freq_mhz,
                                                 std::uint64_t seed,
                                                 LabFidelity fidelity,
                                                 int jobs) {
  (void)fidelity;
  return measure_matrix_impl(device, "ac-matrix", seed, jobs,
                             [freq_mhz](VirtualLab& lab, int t, int a) {
                               return measure_ac(lab, t, a, freq_mhz);
                             });
}

MethodComparison compare_methods(const std::vector<CrosstalkEstimate>& a,
                                 const std::vector<CrosstalkEstimate>& b) {
  if (a.size() != b.size()) {
    throw PairMismatch("estimate sets have different sizes");
  }
  std::map<std::pair<int, int>, const CrosstalkEstimate*> index;
  for (const auto& e : b) index[{e.to_qubit, e.from_qubit}] = &e;

  MethodComparison cmp;
  double sum = 0.0, sum2 = 0.0;
  for (const auto& ea : a) {
    const auto it = index.find({ea.to_qubit, ea.from_qubit});
    if (it == index.end()) {
      std::ostringstream os;
      os << "pair (" << ea.to_qubit << " <- " << ea.from_qubit
         << ") missing from second set";
      throw PairMismatch(os.str());
    }
    const CrosstalkEstimate& eb = *it->second;
    const double denom = std::sqrt(ea.sigma * ea.sigma + eb.sigma * eb.sigma);
    const double z = denom > 0 ? (ea.value - eb.value) / denom : 0.0;
    cmp.pairs.push_back({ea.to_qubit, ea.from_qubit});
    cmp.normalized_diff.push_back(z);
    sum += z;
    sum2 += z * z;
  }
  const double n = static_cast<double>(cmp.normalized_diff.size());
  cmp.mean = n > 0 ? sum / n : 0.0;
  cmp.rms = n > 0 ? std::sqrt(sum2 / n) : 0.0;
  return cmp;
}

void write_crosstalk_csv(const std::string& path,
                         const std::vector<CrosstalkEstimate>& estimates) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(estimates.size());
  for (const auto& e : estimates) {
    rows.push_back({std::to_string(e.from_qubit), std::to_string(e.to_qubit),
                    e.method, e.freq_mhz ? format_double(*e.freq_mhz) : "",
                    format_double(e.value_pct()), format_double(e.sigma_pct())});
  }
  write_csv(path, {"from", "to", "method", "freq_mhz", "value_pct", "sigma_pct"},
            rows);
}

nlohmann::json crosstalk_to_json(const std::vector<CrosstalkEstimate>& estimates) {
  nlohmann::json doc;
  doc["entries"] = nlohmann::json::array();
  for (const auto& e : estimates) {
    nlohmann::json entry = {{"from", e.from_qubit},
                            {"to", e.to_qubit},
                            {"method", e.method},
                            {"value_pct", e.value_pct()},
                            {"sigma_pct", e.sigma_pct()}};
    if (e.freq_mhz) entry["freq_mhz"] = *e.freq_mhz;
    doc["entries"].push_back(entry);
  }
  return doc;
}

}  // namespace fluxtalk

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

#include "fluxtalk/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "fluxtalk/errors.hpp"
#include "fluxtalk/estimators.hpp"
#include "fluxtalk/gate.hpp"
#include "fluxtalk/io.hpp"
#include "fluxtalk/tomography.hpp"

namespace fluxtalk {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> kStudies = {
    "dc_resonator", "dc_qubit",       "dc_matrix",  "ac_matrix",
    "ac_spectrum",  "method_compare", "resilience", "qpt"};

int require_qubit(const nlohmann::json& params, const char* key) {
  if (!params.contains(key)) {
    throw ConfigError(std::string("study params missing '") + key + "'");
  }
  return params.at(key).get<int>();
}

/// Collects artifacts and writes the manifest at the end of a run.
class ArtifactSink {
 public:
  ArtifactSink(const std::string& out_dir) : dir_(out_dir) {
    fs::create_directories(dir_);
  }

  std::string path(const std::string& name) {
    names_.insert(name);
    return (dir_ / name).string();
  }

  /// For ExperimentRecord::write, which appends its own extensions.
  std::string record_stem(const std::string& stem) {
    names_.insert(stem + ".csv");
    names_.insert(stem + ".meta.json");
    return (dir_ / stem).string();
  }

  void write_manifest(const Scenario& scenario, const RunOptions& options,
                      std::uint64_t seed) {
    nlohmann::json manifest;
    manifest["version"] = kFluxtalkVersion;
    manifest["scenario_name"] = scenario.name;
    manifest["study"] = scenario.study;
    manifest["seed"] = seed;
    manifest["fidelity"] =
        options.fidelity == LabFidelity::Fast ? "fast" : "full";
    manifest["inputs"] = {
        {"device_config", sha256_file_hex(scenario.device_config)},
        {"params", sha256_hex(scenario.params.dump())}};
    nlohmann::json arts = nlohmann::json::object();
    for (const auto& name : names_) {
      arts[name] = sha256_file_hex((dir_ / name).string());
    }
    manifest["artifacts"] = arts;
    write_text_file((dir_ / "manifest.json").string(), manifest.dump(2) + "\n");
  }

 private:
  fs::path dir_;
  std::set<std::string> names_;
};

void write_estimate_artifacts(ArtifactSink& sink,
                              const std::vector<CrosstalkEstimate>& estimates,
                              const std::string& stem) {
  write_crosstalk_csv(sink.path(stem + ".csv"), estimates);
  write_text_file(sink.path(stem + ".json"),
                  crosstalk_to_json(estimates).dump(2) + "\n");
}

void run_dc_resonator(const Scenario& sc, const Device& device,
                      std::uint64_t seed, const RunOptions& opt,
                      ArtifactSink& sink) {
  const int target = require_qubit(sc.params, "target");
  const int adversary = require_qubit(sc.params, "adversary");
  VirtualLab lab(device, seed, opt.fidelity);
  const auto traces = dc_resonator_scan(lab, target, adversary);
  const char* names[] = {"trace_minus", "trace_zero", "trace_plus"};
  for (size_t i = 0; i < traces.size(); ++i) {
    traces[i].write(sink.record_stem(names[i]));
  }
  VirtualLab lab2(device, seed, opt.fidelity);
  write_estimate_artifacts(sink, {measure_dc_resonator(lab2, target, adversary)},
                           "estimate");
}

void run_dc_qubit(const Scenario& sc, const Device& device, std::uint64_t seed,
                  const RunOptions& opt, ArtifactSink& sink) {
  const int target = require_qubit(sc.params, "target");
  const int adversary = require_qubit(sc.params, "adversary");
  VirtualLab lab(device, seed, opt.fidelity);
  const DcQubitRecords records = dc_qubit_scan(lab, target, adversary);
  records.own.write(sink.record_stem("own_scan"));
  records.adversary.write(sink.record_stem("adversary_scan"));
  VirtualLab lab2(device, seed, opt.fidelity);
  write_estimate_artifacts(sink, {measure_dc_qubit(lab2, target, adversary)},
                           "estimate");
}

void run_dc_matrix(const Scenario& sc, const Device& device,
                   std::uint64_t seed, const RunOptions& opt,
                   ArtifactSink& sink) {
  const std::string method = sc.params.value("method", "qubit");
  if (method != "qubit" && method != "resonator") {
    throw ConfigError("dc_matrix method must be 'qubit' or 'resonator'");
  }
  const auto estimates = measure_dc_matrix(
      device, method == "qubit" ? DcMethod::Qubit : DcMethod::Resonator, seed,
      opt.fidelity, opt.jobs);
  write_estimate_artifacts(sink, estimates, "matrix");
}

void run_ac_matrix(const Scenario& sc, const Device& device,
                   std::uint64_t seed, const RunOptions& opt,
                   ArtifactSink& sink) {
  const double freq = sc.params.value("freq_mhz", 200.0);
  const auto estimates =
      measure_ac_matrix(device, freq, seed, opt.fidelity, opt.jobs);
  write_estimate_artifacts(sink, estimates, "matrix");
}

void run_ac_spectrum(const Scenario& sc, const Device& device,
                     std::uint64_t seed, const RunOptions& opt,
                     ArtifactSink& sink) {
  const int target = require_qubit(sc.params, "target");
  const int adversary = require_qubit(sc.params, "adversary");
  std::vector<double> freqs;
  if (sc.params.contains("freqs_mhz")) {
    freqs = sc.params.at("freqs_mhz").get<std::vector<double>>();
  } else {
    for (double f = 50.0; f <= 500.0; f += 50.0) freqs.push_back(f);
  }
  const auto spectrum =
      ac_crosstalk_spectrum(device, target, adversary, freqs, seed,
                            opt.fidelity);
  write_estimate_artifacts(sink, spectrum, "spectrum");

  // DC comparison line plotted alongside the spectrum
  VirtualLab lab(device, mix_seed(seed, hash_tag("spectrum-dc-ref")),
                 opt.fidelity);
  const CrosstalkEstimate dc_ref = measure_dc_qubit(lab, target, adversary);
  nlohmann::json ref = {{"method", dc_ref.method},
                        {"value_pct", dc_ref.value_pct()},
                        {"sigma_pct", dc_ref.sigma_pct()}};
  write_text_file(sink.path("dc_reference.json"), ref.dump(2) + "\n");
}

void run_method_compare(const Scenario& sc, const Device& device,
                        std::uint64_t seed, const RunOptions& opt,
                        ArtifactSink& sink) {
  (void)sc;
  const auto qubit = measure_dc_matrix(device, DcMethod::Qubit,
                                       mix_seed(seed, hash_tag("cmp-qubit")),
                                       opt.fidelity, opt.jobs);
  const auto resonator = measure_dc_matrix(
      device, DcMethod::Resonator, mix_seed(seed, hash_tag("cmp-resonator")),
      opt.fidelity, opt.jobs);
  write_estimate_artifacts(sink, qubit, "matrix_qubit");
  write_estimate_artifacts(sink, resonator, "matrix_resonator");

  const MethodComparison cmp = compare_methods(qubit, resonator);
  // histogram of normalized differences
  constexpr int kBins = 20;
  constexpr double kLo = -5.0, kHi = 5.0;
  std::vector<int> counts(kBins, 0);
  for (double z : cmp.normalized_diff) {
    const int bin = static_cast<int>((z - kLo) / (kHi - kLo) * kBins);
    if (bin >= 0 && bin < kBins) ++counts[bin];
  }
  std::vector<std::vector<std::string>> rows;
  for (int b = 0; b < kBins; ++b) {
    const double lo = kLo + (kHi - kLo) * b / kBins;
    const double hi = kLo + (kHi - kLo) * (b + 1) / kBins;
    rows.push_back({format_double(lo), format_double(hi),
                    std::to_string(counts[b])});
  }
  write_csv(sink.path("histogram.csv"), {"bin_lo", "bin_hi", "count"}, rows);
  nlohmann::json summary = {{"mean", cmp.mean},
                            {"rms", cmp.rms},
                            {"pairs", cmp.normalized_diff.size()}};
  write_text_file(sink.path("summary.json"), summary.dump(2) + "\n");
}

void run_resilience(const Scenario& sc, const Device& device,
                    std::uint64_t /*seed*/, const RunOptions& /*opt*/,
                    ArtifactSink& sink) {
  GateContext ctx;
  ctx.fixed_qubit = sc.params.value("fixed_qubit", -1);
  ctx.tunable_qubit = require_qubit(sc.params, "tunable_qubit");
  ctx.g_eff_mhz = sc.params.value("g_eff_mhz", 2.5);
  ctx.kind = sc.params.value("kind", std::string("cz02")) == "cz20"
                 ? CZKind::CZ20
                 : CZKind::CZ02;
  const int adversary = require_qubit(sc.params, "adversary");
  std::vector<double> gate_amps =
      sc.params.value("gate_amps_phi0", std::vector<double>{});
  if (gate_amps.empty()) {
    for (double a = 0.3; a <= 0.651; a += 0.025) gate_amps.push_back(a);
  }
  std::vector<double> adv_amps =
      sc.params.value("adversary_amps_volts", std::vector<double>{0.0, 0.05,
                                                                  0.1, 0.2});
  const double phase = sc.params.value("phase_rad", 0.0);

  const auto table = resilience_sweep(device, ctx, adversary, adv_amps,
                                      gate_amps, phase);
  std::vector<std::vector<std::string>> rows;
  for (const auto& pt : table) {
    rows.push_back({format_double(pt.gate_amp_phi0),
                    format_double(pt.adversary_amp_volts),
                    format_double(pt.gate_tau_ns), format_double(pt.f_m_mhz),
                    format_double(pt.delta_f01_mhz),
                    format_double(pt.baseline_fidelity),
                    format_double(pt.adversarial_fidelity),
                    format_double(pt.predicted_fidelity)});
  }
  write_csv(sink.path("resilience.csv"),
            {"gate_amp_phi0", "adversary_amp_volts", "tau_ns", "f_m_mhz",
             "delta_f01_mhz", "baseline_fidelity", "adversarial_fidelity",
             "predicted_fidelity"},
            rows);
}

void run_qpt(const Scenario& sc, const Device& device, std::uint64_t seed,
             const RunOptions& /*opt*/, ArtifactSink& sink) {
  GateContext ctx;
  ctx.fixed_qubit = sc.params.value("fixed_qubit", -1);
  ctx.tunable_qubit = require_qubit(sc.params, "tunable_qubit");
  ctx.g_eff_mhz = sc.params.value("g_eff_mhz", 2.5);
  ctx.gate_amp_phi0 = sc.params.value("gate_amp_phi0", 0.35);
  ctx.kind = sc.params.value("kind", std::string("cz02")) == "cz20"
                 ? CZKind::CZ20
                 : CZKind::CZ02;
  const int adversary = require_qubit(sc.params, "adversary");
  const double adv_amp = sc.params.value("adversary_amp_volts", 0.1);
  const double phase = sc.params.value("phase_rad", 0.0);

  const CZModel cal = calibrate_cz(device, ctx);
  FluxProgram prog;
  prog.unit = FluxUnit::Volts;
  if (adv_amp > 0.0) {
    prog.add_tone(adversary, {adv_amp, cal.f_m_mhz, phase, cal.tau_ns});
  }
  QptOptions options;
  options.sampling_sigma = sc.params.value("sampling_sigma", 0.0);
  options.prep_depol = sc.params.value("prep_depol", 0.0);
  options.seed = seed;
  const ProcessTomogram tomo = simulate_qpt(device, ctx, prog, options);
  const RzCorrection rz = optimize_rz_correction(tomo);

  nlohmann::json doc;
  doc["ptm_row_major"] = nlohmann::json::array();
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j < 16; ++j) doc["ptm_row_major"].push_back(tomo.ptm(i, j));
  }
  doc["leakage"] = tomo.leakage;
  doc["avg_fidelity"] = tomo.avg_fidelity;
  doc["rz_corrected"] = {{"alpha", rz.alpha},
                         {"beta", rz.beta},
                         {"fidelity", rz.fidelity}};
  doc["gate"] = {{"tunable_qubit", ctx.tunable_qubit},
                 {"kind", ctx.kind == CZKind::CZ02 ? "cz02" : "cz20"},
                 {"g_eff_mhz", ctx.g_eff_mhz},
                 {"gate_amp_phi0", ctx.gate_amp_phi0},
                 {"tau_ns", cal.tau_ns},
                 {"f_m_mhz", cal.f_m_mhz}};
  doc["adversary"] = {{"qubit", adversary},
                      {"amp_volts", adv_amp},
                      {"phase_rad", phase}};
  write_text_file(sink.path("tomogram.json"), doc.dump(2) + "\n");
}

}  // namespace

Scenario Scenario::from_json(const nlohmann::json& doc,
                             const std::string& base_dir) {
  Scenario sc;
  sc.name = doc.value("name", "scenario");
  if (!doc.contains("device_config")) {
    throw ConfigError("scenario is missing 'device_config'");
  }
  fs::path cfg = doc.at("device_config").get<std::string>();
  if (cfg.is_relative()) cfg = fs::path(base_dir) / cfg;
  sc.device_config = cfg.string();
  if (!doc.contains("study")) throw ConfigError("scenario is missing 'study'");
  sc.study = doc.at("study").get<std::string>();
  sc.params = doc.value("params", nlohmann::json::object());
  if (!doc.contains("seed")) {
    throw ConfigError("scenario is missing 'seed' (runs must be reproducible)");
  }
  sc.seed = doc.at("seed").get<std::uint64_t>();
  sc.out_dir = doc.value("out_dir", "out");
  sc.validate();
  return sc;
}

Scenario Scenario::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("scenario parse error: " + std::string(e.what()));
  }
  return from_json(doc, fs::path(path).parent_path().string());
}

void Scenario::validate() const {
  if (kStudies.find(study) == kStudies.end()) {
    throw ConfigError("unknown study '" + study + "'");
  }
  if (!params.is_object()) throw ConfigError("study params must be an object");
}

void run_scenario(const Scenario& scenario, const RunOptions& options) {
  scenario.validate();
  const Device device = Device::load(scenario.device_config);
  const std::uint64_t seed = options.seed.value_or(scenario.seed);
  const std::string out_dir = options.out_dir.value_or(scenario.out_dir);
  ArtifactSink sink(out_dir);

  if (scenario.study == "dc_resonator") {
    run_dc_resonator(scenario, device, seed, options, sink);
  } else if (scenario.study == "dc_qubit") {
    run_dc_qubit(scenario, device, seed, options, sink);
  } else if (scenario.study == "dc_matrix") {
    run_dc_matrix(scenario, device, seed, options, sink);
  } else if (scenario.study == "ac_matrix") {
    run_ac_matrix(scenario, device, seed, options, sink);
  } else if (scenario.study == "ac_spectrum") {
    run_ac_spectrum(scenario, device, seed, options, sink);
  } else if (scenario.study == "method_compare") {
    run_method_compare(scenario, device, seed, options, sink);
  } else if (scenario.study == "resilience") {
    run_resilience(scenario, device, seed, options, sink);
  } else if (scenario.study == "qpt") {
    run_qpt(scenario, device, seed, options, sink);
  }
  sink.write_manifest(scenario, options, seed);
}

}  // namespace fluxtalk

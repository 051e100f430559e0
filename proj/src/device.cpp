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

#include "fluxtalk/device.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fluxtalk/errors.hpp"
#include "fluxtalk/optimize.hpp"

namespace fluxtalk {

namespace {

constexpr double kTransmonRegimeMin = 20.0;
constexpr double kDispersiveFactor = 10.0;
constexpr double kToneFreqMatchMhz = 1e-9;

double ej_of_flux(const TunableTransmon& q, double phi) {
  const double c = std::cos(M_PI * phi);
  const double s = std::sin(M_PI * phi);
  const double d = q.asymmetry();
  return q.ej_sum() * std::sqrt(c * c + d * d * s * s);
}

}  // namespace

void TunableTransmon::validate() const {
  if (!(ej1_ghz >= ej2_ghz && ej2_ghz > 0.0)) {
    throw ConfigError("transmon " + std::to_string(id) +
                      ": junction energies must satisfy ej1 >= ej2 > 0");
  }
  if (!(ec_ghz > 0.0)) {
    throw ConfigError("transmon " + std::to_string(id) + ": ec must be > 0");
  }
  if (ej_sum() / ec_ghz < kTransmonRegimeMin) {
    std::ostringstream os;
    os << "transmon " << id << ": EJ/EC = " << ej_sum() / ec_ghz
       << " is outside the transmon regime (>= " << kTransmonRegimeMin << ")";
    throw ConfigError(os.str());
  }
  if (!(t1_us > 0.0 && t2_us > 0.0)) {
    throw ConfigError("transmon " + std::to_string(id) +
                      ": coherence times must be > 0");
  }
}

TunableTransmon TunableTransmon::from_spectrum(int id, double f01_max_ghz,
                                               double anharmonicity_ghz,
                                               double asymmetry, double t1_us,
                                               double t2_us) {
  if (!(anharmonicity_ghz < 0.0)) {
    throw ConfigError("transmon " + std::to_string(id) +
                      ": anharmonicity must be negative");
  }
  if (!(asymmetry > 0.0 && asymmetry < 1.0)) {
    throw ConfigError("transmon " + std::to_string(id) +
                      ": asymmetry must lie in (0, 1)");
  }
  const double ec = -anharmonicity_ghz;
  // Solve sqrt(8 EJsum EC) - EC = f01_max for EJsum.
  const double guess = (f01_max_ghz + ec) * (f01_max_ghz + ec) / (8.0 * ec);
  const double ejsum = bisect_root(
      [&](double e) { return std::sqrt(8.0 * e * ec) - ec - f01_max_ghz; },
      0.25 * guess, 4.0 * guess, 1e-12);
  TunableTransmon q;
  q.id = id;
  q.ec_ghz = ec;
  q.ej1_ghz = 0.5 * ejsum * (1.0 + asymmetry);
  q.ej2_ghz = 0.5 * ejsum * (1.0 - asymmetry);
  q.t1_us = t1_us;
  q.t2_us = t2_us;
  q.validate();
  if (std::abs(f01(q, 0.0) - f01_max_ghz) > 1e-6) {
    throw ConfigError("transmon " + std::to_string(id) +
                      ": spectrum inversion missed f01 by more than 1 kHz");
  }
  return q;
}

double f01(const TunableTransmon& q, double phi) {
  return std::sqrt(8.0 * ej_of_flux(q, phi) * q.ec_ghz) - q.ec_ghz;
}

double f01_flux_slope(const TunableTransmon& q, double phi) {
  const double d = q.asymmetry();
  const double c = std::cos(M_PI * phi);
  const double s = std::sin(M_PI * phi);
  const double u = c * c + d * d * s * s;
  const double du = -(1.0 - d * d) * M_PI * std::sin(2.0 * M_PI * phi);
  const double amp = std::sqrt(8.0 * q.ej_sum() * q.ec_ghz);
  return amp * 0.25 * std::pow(u, -0.75) * du;
}

double anharmonicity(const TunableTransmon& q, double /*phi*/) {
  return -q.ec_ghz;
}

void Resonator::validate() const {
  if (!(f_bare_ghz > 0.0 && g_ghz > 0.0)) {
    throw ConfigError("resonator for qubit " + std::to_string(qubit_id) +
                      ": f_bare and g must be > 0");
  }
}

double dispersive_shift(const Resonator& r, const TunableTransmon& q,
                        double phi) {
  const double delta = f01(q, phi) - r.f_bare_ghz;
  const double eta = anharmonicity(q, phi);
  return 2.0 * r.g_ghz * r.g_ghz * eta / (delta * (delta + eta));
}

double dressed_resonator_freq(const Resonator& r, const TunableTransmon& q,
                              double phi) {
  const double delta = f01(q, phi) - r.f_bare_ghz;
  if (std::abs(delta) < kDispersiveFactor * r.g_ghz) {
    std::ostringstream os;
    os << "qubit " << q.id << " at phi = " << phi << ": |Delta| = "
       << std::abs(delta) << " GHz < 10 g = " << kDispersiveFactor * r.g_ghz;
    throw DispersiveViolation(os.str());
  }
  return r.f_bare_ghz + r.g_ghz * r.g_ghz / delta +
         0.5 * dispersive_shift(r, q, phi);
}

void FrequencyTable::validate(const std::string& what) const {
  if (freq_mhz.size() < 2 || freq_mhz.size() != value.size()) {
    throw ConfigError(what + ": table needs >= 2 aligned grid points");
  }
  for (size_t i = 1; i < freq_mhz.size(); ++i) {
    if (!(freq_mhz[i] > freq_mhz[i - 1])) {
      throw ConfigError(what + ": frequency grid must be strictly increasing");
    }
  }
}

double FrequencyTable::at(double f_mhz) const {
  if (f_mhz < freq_mhz.front() || f_mhz > freq_mhz.back()) {
    std::ostringstream os;
    os << "frequency " << f_mhz << " MHz outside table domain ["
       << freq_mhz.front() << ", " << freq_mhz.back() << "] MHz";
    throw FrequencyOutOfRange(os.str());
  }
  const auto it = std::upper_bound(freq_mhz.begin(), freq_mhz.end(), f_mhz);
  if (it == freq_mhz.end()) return value.back();
  const size_t hi = static_cast<size_t>(it - freq_mhz.begin());
  if (hi == 0) return value.front();
  const double t = (f_mhz - freq_mhz[hi - 1]) / (freq_mhz[hi] - freq_mhz[hi - 1]);
  return value[hi - 1] + t * (value[hi] - value[hi - 1]);
}

void FluxLine::validate() const {
  if (!(dc_volts_per_phi0 > 0.0)) {
    throw ConfigError("flux line " + std::to_string(qubit_id) +
                      ": dc conversion must be > 0");
  }
  ac_volts_per_phi0.validate("flux line " + std::to_string(qubit_id) +
                             " ac conversion");
  for (double v : ac_volts_per_phi0.value) {
    if (!(v > 0.0)) {
      throw ConfigError("flux line " + std::to_string(qubit_id) +
                        ": ac conversion values must be > 0");
    }
  }
}

FluxProgram& FluxProgram::set_dc(int qubit_id, double value) {
  lines[qubit_id].dc = value;
  return *this;
}

FluxProgram& FluxProgram::add_tone(int qubit_id, const Tone& tone) {
  lines[qubit_id].tones.push_back(tone);
  return *this;
}

void FluxProgram::validate() const {
  for (const auto& [id, line] : lines) {
    for (const Tone& tone : line.tones) {
      if (tone.freq_mhz < kToneFreqMinMhz || tone.freq_mhz > kToneFreqMaxMhz) {
        std::ostringstream os;
        os << "line " << id << ": tone frequency " << tone.freq_mhz
           << " MHz outside [" << kToneFreqMinMhz << ", " << kToneFreqMaxMhz
           << "] MHz";
        throw ConfigError(os.str());
      }
      if (!(tone.duration_ns > 0.0)) {
        throw ConfigError("line " + std::to_string(id) +
                          ": tone duration must be > 0");
      }
    }
  }
}

void CrosstalkNetwork::validate(int n) const {
  if (x_dc.rows() != n || x_dc.cols() != n) {
    throw ConfigError("crosstalk_dc matrix must be N x N");
  }
  for (int i = 0; i < n; ++i) {
    if (x_dc(i, i) != 1.0) {
      throw ConfigError("crosstalk_dc diagonal must be exactly 1");
    }
    for (int j = 0; j < n; ++j) {
      if (i != j && !(std::abs(x_dc(i, j)) < 0.5)) {
        throw ConfigError("crosstalk_dc off-diagonal entries must be < 0.5");
      }
    }
  }
  for (const auto& [pair, table] : x_ac) {
    std::ostringstream name;
    name << "crosstalk_ac (" << pair.first << " <- " << pair.second << ")";
    table.validate(name.str());
    if (table.min_freq() > kToneFreqMinMhz || table.max_freq() < kToneFreqMaxMhz) {
      throw ConfigError(name.str() + ": table must cover [50, 500] MHz");
    }
  }
}

void NoiseModel::validate() const {
  if (ramsey_freq_sigma_static_mhz < 0 || ramsey_freq_sigma_mod_mhz < 0 ||
      resonator_fit_sigma_mhz < 0 || conversion_rel_sigma < 0) {
    throw ConfigError("noise sigmas must be >= 0");
  }
  for (const MethodTiming* t : {&dc_resonator, &dc_qubit, &ac}) {
    if (t->shots_per_point <= 0 || t->shot_rate_khz <= 0 || t->latency_s < 0) {
      throw ConfigError("method timing values must be positive");
    }
  }
}

int Device::index_of(int qubit_id) const {
  for (int i = 0; i < size(); ++i) {
    if (transmons[i].id == qubit_id) return i;
  }
  throw ConfigError("unknown qubit id " + std::to_string(qubit_id));
}

const TunableTransmon& Device::transmon(int qubit_id) const {
  return transmons[index_of(qubit_id)];
}

const Resonator& Device::resonator(int qubit_id) const {
  return resonators[index_of(qubit_id)];
}

const FluxLine& Device::flux_line(int qubit_id) const {
  return flux_lines[index_of(qubit_id)];
}

std::vector<int> Device::qubit_ids() const {
  std::vector<int> ids;
  ids.reserve(transmons.size());
  for (const auto& q : transmons) ids.push_back(q.id);
  return ids;
}

void Device::validate() const {
  const int n = size();
  if (n == 0) throw ConfigError("device has no transmons");
  if (static_cast<int>(resonators.size()) != n ||
      static_cast<int>(flux_lines.size()) != n) {
    throw ConfigError("transmons, resonators and flux_lines must be aligned");
  }
  for (int i = 0; i < n; ++i) {
    transmons[i].validate();
    resonators[i].validate();
    flux_lines[i].validate();
    if (resonators[i].qubit_id != transmons[i].id ||
        flux_lines[i].qubit_id != transmons[i].id) {
      throw ConfigError("resonator/flux line qubit ids must match transmons");
    }
    // dispersive regime must hold across the whole flux range
    for (int k = 0; k <= 50; ++k) {
      const double phi = 0.5 * k / 50.0;
      const double delta = f01(transmons[i], phi) - resonators[i].f_bare_ghz;
      if (std::abs(delta) < kDispersiveFactor * resonators[i].g_ghz) {
        std::ostringstream os;
        os << "qubit " << transmons[i].id
           << " leaves the dispersive regime at phi = " << phi;
        throw ConfigError(os.str());
      }
    }
  }
  network.validate(n);
  noise.validate();
}

namespace {

FrequencyTable table_from_json(const nlohmann::json& j) {
  FrequencyTable t;
  t.freq_mhz = j.at("freq_mhz").get<std::vector<double>>();
  t.value = j.at("value").get<std::vector<double>>();
  return t;
}

nlohmann::json table_to_json(const FrequencyTable& t) {
  return {{"freq_mhz", t.freq_mhz}, {"value", t.value}};
}

}  // namespace

Device Device::from_json(const nlohmann::json& doc) {
  Device dev;
  dev.name = doc.value("name", "device");
  for (const auto& jq : doc.at("transmons")) {
    const int id = jq.at("id").get<int>();
    const double t1 = jq.value("t1_us", 20.0);
    const double t2 = jq.value("t2_us", 15.0);
    if (jq.contains("ej1_ghz")) {
      TunableTransmon q;
      q.id = id;
      q.ej1_ghz = jq.at("ej1_ghz").get<double>();
      q.ej2_ghz = jq.at("ej2_ghz").get<double>();
      q.ec_ghz = jq.at("ec_ghz").get<double>();
      q.t1_us = t1;
      q.t2_us = t2;
      dev.transmons.push_back(q);
    } else {
      dev.transmons.push_back(TunableTransmon::from_spectrum(
          id, jq.at("f01_max_ghz").get<double>(),
          jq.at("anharmonicity_mhz").get<double>() * 1e-3,
          jq.at("asymmetry").get<double>(), t1, t2));
    }
  }
  for (const auto& jr : doc.at("resonators")) {
    Resonator r;
    r.qubit_id = jr.at("qubit").get<int>();
    r.f_bare_ghz = jr.at("f_bare_ghz").get<double>();
    r.g_ghz = jr.at("g_ghz").get<double>();
    dev.resonators.push_back(r);
  }
  for (const auto& jl : doc.at("flux_lines")) {
    FluxLine line;
    line.qubit_id = jl.at("qubit").get<int>();
    line.dc_volts_per_phi0 = jl.at("dc_volts_per_phi0").get<double>();
    line.ac_volts_per_phi0 = table_from_json(jl.at("ac_volts_per_phi0"));
    line.phase_offset_rad = jl.value("phase_offset_rad", 0.0);
    dev.flux_lines.push_back(line);
  }
  const auto& jm = doc.at("crosstalk_dc");
  const int n = static_cast<int>(dev.transmons.size());
  dev.network.x_dc.resize(n, n);
  if (static_cast<int>(jm.size()) != n) {
    throw ConfigError("crosstalk_dc must have one row per transmon");
  }
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(jm[i].size()) != n) {
      throw ConfigError("crosstalk_dc rows must have N entries");
    }
    for (int j = 0; j < n; ++j) dev.network.x_dc(i, j) = jm[i][j].get<double>();
  }
  if (doc.contains("crosstalk_ac")) {
    for (const auto& je : doc.at("crosstalk_ac")) {
      const int to = je.at("to").get<int>();
      const int from = je.at("from").get<int>();
      FrequencyTable t;
      t.freq_mhz = je.at("freq_mhz").get<std::vector<double>>();
      t.value = je.at("ratio").get<std::vector<double>>();
      dev.network.x_ac[{to, from}] = std::move(t);
    }
  }
  if (doc.contains("noise")) {
    const auto& jn = doc.at("noise");
    NoiseModel& nm = dev.noise;
    nm.ramsey_freq_sigma_static_mhz =
        jn.value("ramsey_freq_sigma_static_mhz", nm.ramsey_freq_sigma_static_mhz);
    nm.ramsey_freq_sigma_mod_mhz =
        jn.value("ramsey_freq_sigma_mod_mhz", nm.ramsey_freq_sigma_mod_mhz);
    nm.resonator_fit_sigma_mhz =
        jn.value("resonator_fit_sigma_mhz", nm.resonator_fit_sigma_mhz);
    nm.conversion_rel_sigma =
        jn.value("conversion_rel_sigma", nm.conversion_rel_sigma);
    nm.rng_seed = jn.value("rng_seed", nm.rng_seed);
    auto read_timing = [&](const char* key, MethodTiming& t) {
      if (!jn.contains("methods") || !jn.at("methods").contains(key)) return;
      const auto& jt = jn.at("methods").at(key);
      t.shots_per_point = jt.value("shots_per_point", t.shots_per_point);
      t.shot_rate_khz = jt.value("shot_rate_khz", t.shot_rate_khz);
      t.latency_s = jt.value("latency_s", t.latency_s);
    };
    read_timing("dc_resonator", nm.dc_resonator);
    read_timing("dc_qubit", nm.dc_qubit);
    read_timing("ac", nm.ac);
  }
  dev.validate();
  return dev;
}

Device Device::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open device config: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("device config parse error: " + std::string(e.what()));
  }
  return from_json(doc);
}

nlohmann::json Device::to_json() const {
  nlohmann::json doc;
  doc["name"] = name;
  for (const auto& q : transmons) {
    doc["transmons"].push_back({{"id", q.id},
                                {"ej1_ghz", q.ej1_ghz},
                                {"ej2_ghz", q.ej2_ghz},
                                {"ec_ghz", q.ec_ghz},
                                {"t1_us", q.t1_us},
                                {"t2_us", q.t2_us}});
  }
  for (const auto& r : resonators) {
    doc["resonators"].push_back({{"qubit", r.qubit_id},
                                 {"f_bare_ghz", r.f_bare_ghz},
                                 {"g_ghz", r.g_ghz}});
  }
  for (const auto& l : flux_lines) {
    doc["flux_lines"].push_back(
        {{"qubit", l.qubit_id},
         {"dc_volts_per_phi0", l.dc_volts_per_phi0},
         {"ac_volts_per_phi0", table_to_json(l.ac_volts_per_phi0)},
         {"phase_offset_rad", l.phase_offset_rad}});
  }
  for (int i = 0; i < size(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < size(); ++j) row.push_back(network.x_dc(i, j));
    doc["crosstalk_dc"].push_back(row);
  }
  for (const auto& [pair, table] : network.x_ac) {
    doc["crosstalk_ac"].push_back({{"to", pair.first},
                                   {"from", pair.second},
                                   {"freq_mhz", table.freq_mhz},
                                   {"ratio", table.value}});
  }
  doc["noise"] = {
      {"ramsey_freq_sigma_static_mhz", noise.ramsey_freq_sigma_static_mhz},
      {"ramsey_freq_sigma_mod_mhz", noise.ramsey_freq_sigma_mod_mhz},
      {"resonator_fit_sigma_mhz", noise.resonator_fit_sigma_mhz},
      {"conversion_rel_sigma", noise.conversion_rel_sigma},
      {"rng_seed", noise.rng_seed},
      {"methods",
       {{"dc_resonator",
         {{"shots_per_point", noise.dc_resonator.shots_per_point},
          {"shot_rate_khz", noise.dc_resonator.shot_rate_khz},
          {"latency_s", noise.dc_resonator.latency_s}}},
        {"dc_qubit",
         {{"shots_per_point", noise.dc_qubit.shots_per_point},
          {"shot_rate_khz", noise.dc_qubit.shot_rate_khz},
          {"latency_s", noise.dc_qubit.latency_s}}},
        {"ac",
         {{"shots_per_point", noise.ac.shots_per_point},
          {"shot_rate_khz", noise.ac.shot_rate_khz},
          {"latency_s", noise.ac.latency_s}}}}}};
  return doc;
}

EffectiveFlux effective_flux(const Device& device, const FluxProgram& program,
                             int target_qubit_id) {
  program.validate();
  const int target = device.index_of(target_qubit_id);
  EffectiveFlux out;

  // phasor accumulation per distinct tone frequency
  std::vector<double> freqs;
  std::vector<std::complex<double>> phasors;
  std::vector<double> durations;

  for (const auto& [source_id, line] : program.lines) {
    const int source = device.index_of(source_id);
    const FluxLine& sline = device.flux_lines[source];

    double ratio_dc = device.network.x_dc(target, source);
    double dc_phi0 = line.dc;
    if (program.unit == FluxUnit::Volts) dc_phi0 /= sline.dc_volts_per_phi0;
    out.dc_phi0 += ratio_dc * dc_phi0;

    for (const Tone& tone : line.tones) {
      double amp_phi0 = tone.amp;
      if (program.unit == FluxUnit::Volts) {
        amp_phi0 /= sline.ac_volts_per_phi0.at(tone.freq_mhz);
      }
      double ratio = 1.0;
      if (source != target) {
        const auto it = device.network.x_ac.find({target_qubit_id, source_id});
        if (it == device.network.x_ac.end()) continue;  // no AC path
        ratio = it->second.at(tone.freq_mhz);
      }
      const double phase = tone.phase_rad + sline.phase_offset_rad;
      const std::complex<double> phasor =
          ratio * amp_phi0 * std::exp(std::complex<double>(0.0, phase));

      size_t slot = freqs.size();
      for (size_t k = 0; k < freqs.size(); ++k) {
        if (std::abs(freqs[k] - tone.freq_mhz) < kToneFreqMatchMhz) {
          slot = k;
          break;
        }
      }
      if (slot == freqs.size()) {
        freqs.push_back(tone.freq_mhz);
        phasors.push_back(phasor);
        durations.push_back(tone.duration_ns);
      } else {
        phasors[slot] += phasor;
        durations[slot] = std::max(durations[slot], tone.duration_ns);
      }
    }
  }

  for (size_t k = 0; k < freqs.size(); ++k) {
    Tone t;
    t.freq_mhz = freqs[k];
    t.amp = std::abs(phasors[k]);
    t.phase_rad = std::arg(phasors[k]);
    t.duration_ns = durations[k];
    out.tones.push_back(t);
  }
  std::sort(out.tones.begin(), out.tones.end(),
            [](const Tone& a, const Tone& b) { return a.freq_mhz < b.freq_mhz; });
  return out;
}

}  // namespace fluxtalk

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

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "fluxtalk/experiments.hpp"

namespace fluxtalk {

inline constexpr const char* kFluxtalkVersion = "0.1.0";

/// A named study over a device config, fully determined by (config, study,
/// params, seed). Artifacts land in out_dir together with a manifest that
/// hashes all inputs and outputs.
struct Scenario {
  std::string name;
  std::string device_config;  // resolved relative to the scenario file
  std::string study;  // dc_resonator | dc_qubit | dc_matrix | ac_matrix |
                      // ac_spectrum | method_compare | resilience | qpt
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = 1;
  std::string out_dir = "out";

  static Scenario load(const std::string& path);
  static Scenario from_json(const nlohmann::json& doc,
                            const std::string& base_dir = ".");
  void validate() const;
};

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  LabFidelity fidelity = LabFidelity::Fast;
  int jobs = 1;
};

/// Executes the study and writes artifacts plus `manifest.json`.
/// Throws ConfigError (validation), FitFailure (estimation), or other
/// fluxtalk errors; the CLI maps these onto exit codes.
void run_scenario(const Scenario& scenario, const RunOptions& options = {});

}  // namespace fluxtalk

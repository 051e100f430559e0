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

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fluxtalk/errors.hpp"
#include "fluxtalk/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"fluxtalk: flux-crosstalk studies on simulated tunable transmons"};
  app.set_version_flag("--version", fluxtalk::kFluxtalkVersion);
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "execute a scenario file");
  std::string scenario_path;
  run->add_option("scenario", scenario_path, "scenario JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  std::uint64_t seed = 0;
  auto* seed_opt = run->add_option("--seed", seed, "override the scenario seed");
  std::string out_dir;
  auto* out_opt = run->add_option("--out", out_dir, "override the output dir");
  bool fast = false, full = false;
  run->add_flag("--fast", fast, "analytic-noise experiments (default)");
  run->add_flag("--full", full, "shot-sampled Ramsey experiments");
  int jobs = 1;
  run->add_option("--jobs", jobs, "worker threads for matrix studies")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    const fluxtalk::Scenario scenario = fluxtalk::Scenario::load(scenario_path);
    fluxtalk::RunOptions options;
    if (*seed_opt) options.seed = seed;
    if (*out_opt) options.out_dir = out_dir;
    if (full && fast) {
      std::cerr << "error: --fast and --full are mutually exclusive\n";
      return 2;
    }
    options.fidelity =
        full ? fluxtalk::LabFidelity::Full : fluxtalk::LabFidelity::Fast;
    options.jobs = jobs;
    fluxtalk::run_scenario(scenario, options);
    std::cout << "wrote artifacts to "
              << options.out_dir.value_or(scenario.out_dir) << "\n";
    return 0;
  } catch (const fluxtalk::FitFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const fluxtalk::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fluxtalk::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

// Copyright 2026 The tpc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Run configuration: flat `dotted.key = value` text, one setting per line,
// `#` starts a comment. Lists are comma separated.
//
// Layers, later wins: built-in defaults, recipe, config file, TPC_OUT_DIR
// (output directory only), command-line flags.

#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tpc/experiments.hpp"

namespace tpc {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CliConfig {
  ExperimentConfig experiment;
  std::string out_dir = "out";

  std::vector<SweepAxis> sweep_axes{SweepAxis::kNLinks};
  std::vector<double> sweep_n_links{5, 10, 15, 20, 25};
  std::vector<double> sweep_pathloss_exponent{2.0, 2.5, 3.0, 3.5, 4.0};
  std::vector<double> sweep_shadowing_std{0.0, 2.0, 4.0, 6.0, 8.0, 10.0};

  std::vector<std::string> scenarios{"scen1", "scen2"};
  double scen2_max_pair_distance_m = 3.0;
  std::vector<std::size_t> iteration_grid{1, 2, 5, 10, 20, 40, 60, 100, 200, 500, 1000};
  std::size_t max_unfolded_layers = 100;

  std::string channel_file;  // pgd subcommand input; empty samples one
  std::size_t gradcheck_instances = 20;
};

/// Table defaults: N = 20, step 0.1, 40 layers, 1000 iterations.
CliConfig default_config();

/// Throws ConfigError naming the key on unknown keys, malformed values and
/// violated constraints.
void apply_setting(CliConfig& cfg, std::string_view key, std::string_view value);

/// `origin` prefixes error messages (file name or "--set").
void apply_config_text(CliConfig& cfg, std::string_view text, const std::string& origin);
void apply_config_file(CliConfig& cfg, const std::filesystem::path& path);

/// Cross-field checks that single settings cannot catch.
void validate(const CliConfig& cfg);

/// Every result-affecting key with its effective value, in key order.
/// Output directory and worker count are left out: they never change
/// results.
std::vector<std::pair<std::string, std::string>> config_echo(const CliConfig& cfg);

std::vector<std::string> config_keys();

/// The experiment for a named scenario ("scen1" or "scen2").
ExperimentConfig scenario_experiment(const CliConfig& cfg, const std::string& label);

}  // namespace tpc

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

// Figure artifacts. Each figure writes <out_dir>/<name>.csv and a JSON
// summary <out_dir>/<name>.json; both carry the config echo, seed and tool
// version and contain nothing run-dependent such as timestamps.
//
//   fig2  scenario,method,iterations,mean_link_rate
//   fig3  scenario,method,sum_rate,cdf
//   fig4  scenario,method,link_rate,cdf
//   fig5  method,<one column per scenario>   (mean sum-rate gain over max_power)
//   fig6  scenario,method,power_w,cdf
//   fig7  scenario,n_links,seed,method,mean_link_rate
//   fig8  scenario,axis,value,seed,method,mean_link_rate

#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "tpc/config.hpp"
#include "tpc/serialization.hpp"

namespace tpc {

std::vector<std::string> figure_names();

/// "# key = value" provenance lines for CSV artifacts.
std::vector<std::string> provenance_lines(const CliConfig& cfg);

/// {"tool", "version", "seed", "config"} for JSON artifacts.
Json provenance_json(const CliConfig& cfg);

/// Throws std::invalid_argument for unknown names. Returns written files.
std::vector<std::filesystem::path> reproduce_figure(const std::string& name, const CliConfig& cfg,
                                                    std::ostream& log);

}  // namespace tpc

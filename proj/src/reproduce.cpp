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

#include "tpc/reproduce.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <stdexcept>

#include "tpc/experiments.hpp"
#include "tpc/version.hpp"

namespace tpc {
namespace {

namespace fs = std::filesystem;

struct Labeled {
  std::string scenario;
  ExperimentReport report;
};

std::vector<Labeled> run_scenarios(const CliConfig& cfg, std::ostream& log) {
  std::vector<Labeled> out;
  for (const std::string& label : cfg.scenarios) {
    log << fmt::format("running {} ({} realizations)\n", label, cfg.experiment.n_realizations);
    out.push_back({label, run_experiment(scenario_experiment(cfg, label))});
  }
  return out;
}

Json summary_json(const std::vector<Labeled>& runs) {
  Json j = Json::object();
  for (const Labeled& run : runs) {
    Json per = Json::object();
    const bool has_base = run.report.has(MethodId::kMaxPower);
    const std::vector<MethodValue> gains =
        has_base ? mean_rate_increase(run.report) : std::vector<MethodValue>{};
    for (const MethodSamples& s : run.report.methods) {
      const MethodSummary m = run.report.summary(s.method);
      Json e;
      e["mean_sum_rate"] = m.mean_sum_rate;
      e["mean_link_rate"] = m.mean_link_rate;
      e["mean_power_w"] = m.mean_power_w;
      if (m.mean_power_dbw) {
        e["mean_power_dbw"] = *m.mean_power_dbw;
      } else {
        e["mean_power_dbw"] = "zero power";
      }
      for (const MethodValue& g : gains) {
        if (g.method == s.method) e["mean_rate_increase"] = g.value;
      }
      e["sum_rate_samples"] = s.sum_rate.size();
      e["link_samples"] = s.link_rate.size();
      per[to_string(s.method)] = e;
    }
    j[run.scenario] = per;
  }
  return j;
}

std::vector<fs::path> emit(const CliConfig& cfg, const std::string& name, const CsvWriter& csv,
                           Json summary) {
  const fs::path dir(cfg.out_dir);
  Json j;
  j["format"] = "figure";
  j["version"] = kFormatVersion;
  j["figure"] = name;
  j["provenance"] = provenance_json(cfg);
  j["summary"] = std::move(summary);
  write_text(dir / (name + ".csv"), csv.str());
  write_json(dir / (name + ".json"), j);
  return {dir / (name + ".csv"), dir / (name + ".json")};
}

std::vector<fs::path> fig2(const CliConfig& cfg, std::ostream& log) {
  CsvWriter csv(provenance_lines(cfg), {"scenario", "method", "iterations", "mean_link_rate"});
  Json summary = Json::object();
  for (const std::string& label : cfg.scenarios) {
    log << fmt::format("rate vs iterations for {}\n", label);
    const auto points =
        rate_vs_iterations(scenario_experiment(cfg, label), cfg.iteration_grid, cfg.max_unfolded_layers);
    for (const IterationPoint& pt : points) {
      csv.cell(label).cell(to_string(pt.method)).cell(pt.iterations).cell(pt.mean_link_rate).end_row();
    }
    summary[label] = points.size();
  }
  return emit(cfg, "fig2", csv, {{"points", summary}});
}

std::vector<fs::path> cdf_figure(const CliConfig& cfg, std::ostream& log, const std::string& name,
                                 const char* value_column,
                                 const std::vector<double> MethodSamples::*field) {
  const std::vector<Labeled> runs = run_scenarios(cfg, log);
  CsvWriter csv(provenance_lines(cfg), {"scenario", "method", value_column, "cdf"});
  for (const Labeled& run : runs) {
    for (const MethodSamples& s : run.report.methods) {
      for (const CdfPoint& pt : empirical_cdf(s.*field)) {
        csv.cell(run.scenario).cell(to_string(s.method)).cell(pt.value).cell(pt.probability).end_row();
      }
    }
  }
  return emit(cfg, name, csv, summary_json(runs));
}

std::vector<fs::path> fig5(const CliConfig& cfg, std::ostream& log) {
  const std::vector<Labeled> runs = run_scenarios(cfg, log);
  std::vector<std::string> header{"method"};
  std::vector<std::vector<MethodValue>> gains;
  for (const Labeled& run : runs) {
    header.push_back(run.scenario);
    gains.push_back(mean_rate_increase(run.report));
  }
  CsvWriter csv(provenance_lines(cfg), header);
  for (std::size_t m = 0; m < cfg.experiment.methods.size(); ++m) {
    csv.cell(to_string(cfg.experiment.methods[m]));
    for (const auto& g : gains) csv.cell(g[m].value);
    csv.end_row();
  }
  return emit(cfg, "fig5", csv, summary_json(runs));
}

std::vector<fs::path> fig7(const CliConfig& cfg, std::ostream& log) {
  CsvWriter csv(provenance_lines(cfg), {"scenario", "n_links", "seed", "method", "mean_link_rate"});
  for (const std::string& label : cfg.scenarios) {
    log << fmt::format("n_links sweep for {}\n", label);
    for (const SweepRow& r :
         sensitivity_sweep(scenario_experiment(cfg, label), SweepAxis::kNLinks, cfg.sweep_n_links)) {
      csv.cell(label).cell(r.value).cell(std::to_string(r.seed)).cell(to_string(r.method));
      csv.cell(r.mean_link_rate).end_row();
    }
  }
  return emit(cfg, "fig7", csv, Json::object());
}

std::vector<fs::path> fig8(const CliConfig& cfg, std::ostream& log) {
  CsvWriter csv(provenance_lines(cfg), {"scenario", "axis", "value", "seed", "method", "mean_link_rate"});
  for (const std::string& label : cfg.scenarios) {
    for (SweepAxis axis : cfg.sweep_axes) {
      const std::vector<double>& values = axis == SweepAxis::kNLinks ? cfg.sweep_n_links
                                          : axis == SweepAxis::kPathlossExponent
                                              ? cfg.sweep_pathloss_exponent
                                              : cfg.sweep_shadowing_std;
      log << fmt::format("{} sweep for {}\n", to_string(axis), label);
      for (const SweepRow& r : sensitivity_sweep(scenario_experiment(cfg, label), axis, values)) {
        csv.cell(label).cell(to_string(axis)).cell(r.value).cell(std::to_string(r.seed));
        csv.cell(to_string(r.method)).cell(r.mean_link_rate).end_row();
      }
    }
  }
  return emit(cfg, "fig8", csv, Json::object());
}

}  // namespace

std::vector<std::string> figure_names() {
  return {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"};
}

std::vector<std::string> provenance_lines(const CliConfig& cfg) {
  std::vector<std::string> lines{fmt::format("{} {}", kToolName, kVersion)};
  for (const auto& [key, value] : config_echo(cfg)) lines.push_back(key + " = " + value);
  return lines;
}

Json provenance_json(const CliConfig& cfg) {
  Json j;
  j["tool"] = kToolName;
  j["tool_version"] = kVersion;
  j["seed"] = cfg.experiment.seed;
  Json config = Json::object();
  for (const auto& [key, value] : config_echo(cfg)) config[key] = value;
  j["config"] = config;
  return j;
}

std::vector<fs::path> reproduce_figure(const std::string& name, const CliConfig& cfg,
                                       std::ostream& log) {
  validate(cfg);
  if (name == "fig2") return fig2(cfg, log);
  if (name == "fig3") return cdf_figure(cfg, log, "fig3", "sum_rate", &MethodSamples::sum_rate);
  if (name == "fig4") return cdf_figure(cfg, log, "fig4", "link_rate", &MethodSamples::link_rate);
  if (name == "fig5") return fig5(cfg, log);
  if (name == "fig6") return cdf_figure(cfg, log, "fig6", "power_w", &MethodSamples::power_w);
  if (name == "fig7") return fig7(cfg, log);
  if (name == "fig8") return fig8(cfg, log);
  throw std::invalid_argument(fmt::format("unknown figure '{}'", name));
}

}  // namespace tpc

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

#include "tpc/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <optional>

#include "tpc/config.hpp"
#include "tpc/experiments.hpp"
#include "tpc/gradcheck.hpp"
#include "tpc/reproduce.hpp"
#include "tpc/serialization.hpp"
#include "tpc/version.hpp"

namespace tpc {
namespace {

namespace fs = std::filesystem;

constexpr const char* kOutDirEnv = "TPC_OUT_DIR";
constexpr double kGradcheckTolerance = 1e-4;

struct Flags {
  std::string config_file;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> workers;
  std::string recipes = "recipes";
  std::string figure;
};

CliConfig build_config(const Flags& flags, const std::optional<fs::path>& recipe) {
  CliConfig cfg = default_config();
  if (recipe) apply_config_file(cfg, *recipe);
  if (!flags.config_file.empty()) apply_config_file(cfg, flags.config_file);
  if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') {
    apply_setting(cfg, "out_dir", env);
  }
  for (const std::string& s : flags.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("--set expects key=value, got '{}'", s));
    apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  if (flags.seed) cfg.experiment.seed = *flags.seed;
  if (flags.out) apply_setting(cfg, "out_dir", *flags.out);
  if (flags.workers) cfg.experiment.workers = *flags.workers;
  validate(cfg);
  return cfg;
}

Json artifact(const char* format, const CliConfig& cfg) {
  Json j;
  j["format"] = format;
  j["version"] = kFormatVersion;
  j["provenance"] = provenance_json(cfg);
  return j;
}

int cmd_gradcheck(const CliConfig& cfg, std::ostream& out) {
  GradcheckConfig g;
  g.scenario = cfg.experiment.scenario;
  g.propagation = cfg.experiment.propagation;
  g.p_max_w = cfg.experiment.p_max_w;
  g.seed = cfg.experiment.seed;
  g.instances = cfg.gradcheck_instances;
  const GradcheckResult r = run_gradcheck(g);
  out << fmt::format("grad_rho  checks {:>5}  max relative error {:.3e}\n", r.grad_rho_checks,
                     r.grad_rho_max_rel_error);
  out << fmt::format("backward  checks {:>5}  max relative error {:.3e}\n", r.backward_checks,
                     r.backward_max_rel_error);
  const double worst = std::max(r.grad_rho_max_rel_error, r.backward_max_rel_error);
  out << fmt::format("max relative error {:.3e} (tolerance {:.0e})\n", worst, kGradcheckTolerance);
  return worst <= kGradcheckTolerance ? 0 : 1;
}

int cmd_pgd(const CliConfig& cfg, std::ostream& out) {
  const ExperimentConfig& e = cfg.experiment;
  const ChannelMatrix h = cfg.channel_file.empty() ? realization_channel(e, 0)
                                                   : channel_from_json(read_json(cfg.channel_file));
  Rng rng = make_rng(e.seed, Stream::kInit, 0);
  const SolveResult r = run_pgd(h, e.pgd, e.p_max_w, rng);

  const fs::path dir(cfg.out_dir);
  Json j = artifact("pgd_result", cfg);
  j["channel"] = to_json(h);
  j["allocation"] = to_json(r.p_final);
  j["sum_rate"] = r.sum_rate_final;
  j["iterations_run"] = r.iterations_run;
  j["non_monotone_steps"] = r.non_monotone_steps;
  write_json(dir / "pgd.json", j);
  if (e.pgd.record_trajectory) {
    CsvWriter csv(provenance_lines(cfg), {"iteration", "sum_rate"});
    for (std::size_t k = 0; k < r.trajectory.size(); ++k) csv.cell(k + 1).cell(r.trajectory[k]).end_row();
    write_text(dir / "pgd_trajectory.csv", csv.str());
  }
  out << fmt::format("sum rate {:.6f} bps/Hz after {} iterations\n", r.sum_rate_final,
                     r.iterations_run);
  return 0;
}

int cmd_train(const CliConfig& cfg, std::ostream& out) {
  const ExperimentConfig& e = cfg.experiment;
  TrainConfig t = e.dupgd.train;
  t.seed = e.seed;
  t.workers = e.workers;
  const TrainResult r =
      train_offline(t, e.scenario, e.propagation, e.dupgd.net, UnrollSetup{e.p_max_w, e.pgd.init});

  const fs::path dir(cfg.out_dir);
  Json j = artifact("train_result", cfg);
  j["params"] = to_json(r.params, e.p_max_w);
  write_json(dir / "params.json", j);
  CsvWriter csv(provenance_lines(cfg), {"batch", "loss"});
  for (std::size_t b = 0; b < r.history.losses.size(); ++b) {
    csv.cell(b).cell(r.history.losses[b]).end_row();
  }
  write_text(dir / "train_history.csv", csv.str());
  if (!r.history.losses.empty()) {
    out << fmt::format("final batch loss {:.6f}\n", r.history.losses.back());
  }
  out << fmt::format("trained {} batches in {:.1f} s\n", r.history.losses.size(),
                     r.history.wall_clock_s);
  return 0;
}

int cmd_evaluate(const CliConfig& cfg, std::ostream& out) {
  const ExperimentReport report = run_experiment(cfg.experiment);
  const fs::path dir(cfg.out_dir);

  Json j = artifact("evaluation", cfg);
  Json summary = Json::object();
  const bool has_base = report.has(MethodId::kMaxPower);
  const auto gains = has_base ? mean_rate_increase(report) : std::vector<MethodValue>{};
  CsvWriter table(provenance_lines(cfg), {"method", "mean_sum_rate", "mean_link_rate",
                                          "mean_power_w", "mean_power_dbw"});
  for (std::size_t m = 0; m < report.methods.size(); ++m) {
    const MethodSummary s = report.summary(report.methods[m].method);
    Json e;
    e["mean_sum_rate"] = s.mean_sum_rate;
    e["mean_link_rate"] = s.mean_link_rate;
    e["mean_power_w"] = s.mean_power_w;
    e["mean_power_dbw"] = s.mean_power_dbw ? Json(*s.mean_power_dbw) : Json("zero power");
    if (has_base) e["mean_rate_increase"] = gains[m].value;
    summary[to_string(s.method)] = e;
    table.cell(to_string(s.method)).cell(s.mean_sum_rate).cell(s.mean_link_rate).cell(s.mean_power_w);
    table.cell(s.mean_power_dbw ? format_double(*s.mean_power_dbw) : std::string("zero power"));
    table.end_row();
    out << fmt::format("{:<14} sum rate {:>9.4f}  link rate {:>8.4f}  power {:>7.3f} W\n",
                       to_string(s.method), s.mean_sum_rate, s.mean_link_rate, s.mean_power_w);
  }
  j["n_realizations"] = cfg.experiment.n_realizations;
  j["summary"] = summary;
  j["channel_hashes"] = report.channel_hashes;
  write_json(dir / "evaluate.json", j);
  write_text(dir / "evaluate.csv", table.str());

  CsvWriter samples(provenance_lines(cfg), {"realization", "method", "sum_rate"});
  for (const MethodSamples& s : report.methods) {
    for (std::size_t r = 0; r < s.sum_rate.size(); ++r) {
      samples.cell(r).cell(to_string(s.method)).cell(s.sum_rate[r]).end_row();
    }
  }
  write_text(dir / "evaluate_samples.csv", samples.str());
  return 0;
}

int cmd_sweep(const CliConfig& cfg, std::ostream& out) {
  CsvWriter csv(provenance_lines(cfg), {"axis", "value", "seed", "method", "mean_link_rate"});
  for (SweepAxis axis : cfg.sweep_axes) {
    const std::vector<double>& values = axis == SweepAxis::kNLinks ? cfg.sweep_n_links
                                        : axis == SweepAxis::kPathlossExponent
                                            ? cfg.sweep_pathloss_exponent
                                            : cfg.sweep_shadowing_std;
    for (const SweepRow& r : sensitivity_sweep(cfg.experiment, axis, values)) {
      csv.cell(to_string(axis)).cell(r.value).cell(std::to_string(r.seed));
      csv.cell(to_string(r.method)).cell(r.mean_link_rate).end_row();
      out << fmt::format("{} = {:<6} {:<14} link rate {:.4f}\n", to_string(axis), r.value,
                         to_string(r.method), r.mean_link_rate);
    }
  }
  write_text(fs::path(cfg.out_dir) / "sweep.csv", csv.str());
  return 0;
}

int cmd_reproduce(const CliConfig& cfg, const std::string& figure, std::ostream& out) {
  for (const fs::path& p : reproduce_figure(figure, cfg, out)) out << "wrote " << p.string() << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transmit power control simulator: projected gradient descent and its deep-unfolded "
               "variant on random D2D channels"};
  app.name(kToolName);
  app.set_version_flag("--version", fmt::format("{} {}", kToolName, kVersion));
  app.require_subcommand(1, 1);
  app.fallthrough();

  Flags flags;
  app.add_option("--config", flags.config_file, "Config file (key = value lines)")->check(CLI::ExistingFile);
  app.add_option("--set", flags.sets, "Override one setting, key=value (repeatable)");
  app.add_option("--seed", flags.seed, "Master seed (overrides config)");
  app.add_option("--out", flags.out, "Output directory (overrides config and TPC_OUT_DIR)");
  app.add_option("--workers", flags.workers, "Worker threads, 0 = all available");

  CLI::App* gradcheck = app.add_subcommand("gradcheck", "Finite-difference gradient checks");
  CLI::App* pgd = app.add_subcommand("pgd", "Run projected gradient descent on one channel");
  CLI::App* train = app.add_subcommand("train", "Train the unfolded network offline");
  CLI::App* evaluate = app.add_subcommand("evaluate", "Monte-Carlo comparison of all methods");
  CLI::App* sweep = app.add_subcommand("sweep", "Sensitivity sweeps");
  CLI::App* reproduce = app.add_subcommand("reproduce", "Run a figure recipe");
  reproduce->add_option("figure", flags.figure, "Figure name (fig2 ... fig8)")
      ->required()
      ->check(CLI::IsMember(figure_names()));
  reproduce->add_option("--recipes", flags.recipes, "Directory holding figN.cfg recipes");

  std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  for (std::size_t i = 0; i < rest.size(); ++i) {
    const std::string& a = rest[i];
    if (a.starts_with("-")) {
      if (a.find('=') == std::string::npos && app.get_option_no_throw(a) != nullptr &&
          app.get_option_no_throw(a)->get_expected_min() > 0) {
        ++i;
      }
      continue;
    }
    if (app.get_subcommand_no_throw(a) == nullptr) {
      err << fmt::format("unknown subcommand '{}'\n", a) << app.help();
      return 2;
    }
    break;
  }
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (reproduce->parsed()) {
      const fs::path recipe = fs::path(flags.recipes) / (flags.figure + ".cfg");
      if (!fs::exists(recipe)) throw ConfigError(fmt::format("recipe {} not found", recipe.string()));
      return cmd_reproduce(build_config(flags, recipe), flags.figure, out);
    }
    const CliConfig cfg = build_config(flags, std::nullopt);
    if (gradcheck->parsed()) return cmd_gradcheck(cfg, out);
    if (pgd->parsed()) return cmd_pgd(cfg, out);
    if (train->parsed()) return cmd_train(cfg, out);
    if (evaluate->parsed()) return cmd_evaluate(cfg, out);
    if (sweep->parsed()) return cmd_sweep(cfg, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace tpc

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

#include "tpc/config.hpp"

#include <gtest/gtest.h>

#include <filesystem>

#include "tpc/reproduce.hpp"

namespace tpc {
namespace {

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(DefaultConfig, TableValues) {
  const CliConfig cfg = default_config();
  EXPECT_EQ(cfg.experiment.scenario.n_links, 20u);
  EXPECT_EQ(cfg.experiment.pgd.step_size, 0.1);
  EXPECT_EQ(cfg.experiment.pgd.max_iters, 1000u);
  EXPECT_EQ(cfg.experiment.dupgd.net.n_layers, 40u);
  EXPECT_EQ(cfg.experiment.propagation.pathloss_exponent, 2.0);
  EXPECT_EQ(cfg.experiment.propagation.shadowing_std_db, 5.0);
  EXPECT_EQ(cfg.experiment.p_max_w, 10.0);
  EXPECT_EQ(cfg.experiment.n_realizations, 500u);
  EXPECT_FALSE(cfg.experiment.scenario.max_pair_distance_m.has_value());
  EXPECT_NO_THROW(validate(cfg));
}

TEST(DefaultConfig, EmptyTextKeepsDefaults) {
  CliConfig cfg = default_config();
  apply_config_text(cfg, "", "empty");
  apply_config_text(cfg, "# only a comment\n\n   \n", "comments");
  EXPECT_EQ(config_echo(cfg), config_echo(default_config()));
}

TEST(ApplySetting, ParsesEveryKind) {
  CliConfig cfg = default_config();
  apply_config_text(cfg,
                    "seed = 42\n"
                    "scenario.n_links = 10   # trailing comment\n"
                    "scenario.max_pair_distance_m = 3\n"
                    "pgd.init = constant\n"
                    "pgd.init_value_w = 2.5\n"
                    "dupgd.variant = mlp_layer\n"
                    "dupgd.online_init = pretrained\n"
                    "train.online_schedule = layerwise\n"
                    "experiment.methods = pgd, max_power\n"
                    "sweep.axes = shadowing_std\n"
                    "reproduce.iteration_grid = 1,10,100\n",
                    "inline");
  EXPECT_EQ(cfg.experiment.seed, 42u);
  EXPECT_EQ(cfg.experiment.scenario.n_links, 10u);
  EXPECT_EQ(*cfg.experiment.scenario.max_pair_distance_m, 3.0);
  EXPECT_EQ(cfg.experiment.pgd.init.rule, InitRule::kConstant);
  EXPECT_EQ(cfg.experiment.pgd.init.value_w, 2.5);
  EXPECT_EQ(cfg.experiment.dupgd.net.variant, Variant::kMlpLayer);
  EXPECT_EQ(cfg.experiment.dupgd.online_init, OnlineInit::kPretrained);
  EXPECT_EQ(cfg.experiment.dupgd.train.online_schedule, OnlineSchedule::kLayerwise);
  ASSERT_EQ(cfg.experiment.methods.size(), 2u);
  EXPECT_EQ(cfg.experiment.methods[0], MethodId::kPgd);
  EXPECT_EQ(cfg.sweep_axes, std::vector<SweepAxis>{SweepAxis::kShadowingStd});
  EXPECT_EQ(cfg.iteration_grid, (std::vector<std::size_t>{1, 10, 100}));
  apply_setting(cfg, "scenario.max_pair_distance_m", "none");
  EXPECT_FALSE(cfg.experiment.scenario.max_pair_distance_m.has_value());
}

TEST(ApplySetting, StepSizeConstraintNamesKey) {
  CliConfig cfg = default_config();
  const std::string msg = error_of([&] { apply_setting(cfg, "pgd.step_size", "1.5"); });
  EXPECT_NE(msg.find("pgd.step_size"), std::string::npos) << msg;
  EXPECT_EQ(cfg.experiment.pgd.step_size, 0.1);
}

TEST(ApplySetting, UnknownKeyRejected) {
  CliConfig cfg = default_config();
  const std::string msg = error_of([&] { apply_setting(cfg, "pgd.stepsize", "0.2"); });
  EXPECT_NE(msg.find("pgd.stepsize"), std::string::npos) << msg;
}

TEST(ApplySetting, TypeMismatchNamesKey) {
  CliConfig cfg = default_config();
  for (const auto& [key, value] : std::vector<std::pair<std::string, std::string>>{
           {"scenario.n_links", "ten"},
           {"scenario.n_links", "-3"},
           {"scenario.n_links", "2.5"},
           {"propagation.noise_power_w", "abc"},
           {"pgd.record_trajectory", "yes"},
           {"dupgd.variant", "transformer"},
           {"experiment.methods", "pgd,wmmse"},
           {"reproduce.iteration_grid", "0,5"},
           {"reproduce.iteration_grid", "5,2"},
           {"sweep.n_links", "3,4.5"},
           {"propagation.pathloss_exponent", "0"},
           {"train.beta1", "1"},
       }) {
    const std::string msg = error_of([&] { apply_setting(cfg, key, value); });
    EXPECT_NE(msg.find(key), std::string::npos) << key << " = " << value << ": " << msg;
  }
}

TEST(ApplyConfigText, LineNumbersInErrors) {
  CliConfig cfg = default_config();
  const std::string msg =
      error_of([&] { apply_config_text(cfg, "seed = 1\n\npgd.max_iters = 0\n", "recipe.cfg"); });
  EXPECT_NE(msg.find("recipe.cfg:3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("pgd.max_iters"), std::string::npos) << msg;
  EXPECT_NE(error_of([&] { apply_config_text(cfg, "seed 3\n", "x"); }), "");
}

TEST(ApplyConfigText, LaterSettingWins) {
  CliConfig cfg = default_config();
  apply_config_text(cfg, "seed = 1\nseed = 9\n", "x");
  EXPECT_EQ(cfg.experiment.seed, 9u);
}

TEST(Validate, CrossFieldChecks) {
  CliConfig cfg = default_config();
  apply_setting(cfg, "pgd.init", "constant");
  apply_setting(cfg, "pgd.init_value_w", "12");
  EXPECT_NE(error_of([&] { validate(cfg); }).find("pgd.init_value_w"), std::string::npos);

  cfg = default_config();
  apply_setting(cfg, "scenario.max_pair_distance_m", "40");
  EXPECT_NE(error_of([&] { validate(cfg); }).find("scenario.max_pair_distance_m"),
            std::string::npos);
}

TEST(ConfigEcho, CoversResultKeysOnly) {
  const auto echo = config_echo(default_config());
  std::vector<std::string> keys;
  for (const auto& kv : echo) keys.push_back(kv.first);
  EXPECT_TRUE(std::is_sorted(keys.begin(), keys.end()));
  EXPECT_EQ(std::count(keys.begin(), keys.end(), "seed"), 1);
  EXPECT_EQ(std::count(keys.begin(), keys.end(), "out_dir"), 0);
  EXPECT_EQ(std::count(keys.begin(), keys.end(), "workers"), 0);
  EXPECT_EQ(keys.size() + 2, config_keys().size());
}

TEST(ConfigEcho, RoundTripsThroughText) {
  CliConfig cfg = default_config();
  apply_config_text(cfg, "seed = 5\nscenario.n_links = 7\nsweep.shadowing_std = 0.5,1.25\n", "x");
  std::string text;
  for (const auto& [key, value] : config_echo(cfg)) text += key + " = " + value + "\n";
  CliConfig again = default_config();
  apply_config_text(again, text, "echo");
  EXPECT_EQ(config_echo(again), config_echo(cfg));
}

TEST(ScenarioExperiment, Labels) {
  CliConfig cfg = default_config();
  EXPECT_FALSE(scenario_experiment(cfg, "scen1").scenario.max_pair_distance_m.has_value());
  EXPECT_EQ(*scenario_experiment(cfg, "scen2").scenario.max_pair_distance_m, 3.0);
  EXPECT_THROW(scenario_experiment(cfg, "scen3"), ConfigError);
}

TEST(Recipes, EveryFigureRecipeParses) {
  for (const std::string& name : figure_names()) {
    CliConfig cfg = default_config();
    const std::filesystem::path path = std::filesystem::path(TPC_RECIPE_DIR) / (name + ".cfg");
    ASSERT_TRUE(std::filesystem::exists(path)) << path;
    EXPECT_NO_THROW(apply_config_file(cfg, path)) << name;
    EXPECT_NO_THROW(validate(cfg)) << name;
  }
}

TEST(ApplyConfigFile, MissingFile) {
  CliConfig cfg = default_config();
  EXPECT_THROW(apply_config_file(cfg, "/nonexistent/recipe.cfg"), ConfigError);
}

}  // namespace
}  // namespace tpc

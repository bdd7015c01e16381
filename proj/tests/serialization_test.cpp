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

#include "tpc/serialization.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "test_support.hpp"

namespace tpc {
namespace {

TEST(ChannelJson, RoundTripIsExact) {
  const ChannelMatrix h = testing::scenario_channel(5, 3);
  const Json j = to_json(h);
  EXPECT_EQ(j["format"], "channel");
  EXPECT_EQ(j["gains"].size(), 25u);
  EXPECT_EQ(j["gains"][1].get<double>(), h(0, 1));
  const ChannelMatrix back = channel_from_json(Json::parse(j.dump()));
  EXPECT_EQ(back, h);
  EXPECT_EQ(back.hash(), h.hash());
}

TEST(ChannelJson, RejectsWrongDocuments) {
  Json j = to_json(ChannelMatrix(1, {1e-6}, 1e-10));
  j["version"] = 2;
  EXPECT_THROW(channel_from_json(j), std::invalid_argument);
  EXPECT_THROW(channel_from_json(to_json(PowerVector::full(1, 1.0))), std::invalid_argument);
  Json bad = to_json(ChannelMatrix(2, {1, 1, 1, 1}, 1e-10));
  bad["n"] = 3;
  EXPECT_THROW(channel_from_json(bad), std::invalid_argument);
}

TEST(DeploymentJson, RoundTrip) {
  Rng rng(4);
  const Deployment dep = generate_deployment(ScenarioSpec::scen2(6), rng);
  const Deployment back = deployment_from_json(Json::parse(to_json(dep).dump()));
  ASSERT_EQ(back.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(back.tx[i].x, dep.tx[i].x);
    EXPECT_EQ(back.rx[i].y, dep.rx[i].y);
  }
  EXPECT_EQ(*back.scenario.max_pair_distance_m, 3.0);

  Rng again(4);
  const Deployment open = generate_deployment(ScenarioSpec::scen1(2), again);
  EXPECT_FALSE(deployment_from_json(to_json(open)).scenario.max_pair_distance_m.has_value());
}

TEST(PowerJson, RoundTripAndValidation) {
  const PowerVector p({0.0, 2.5, 10.0}, 10.0);
  EXPECT_EQ(power_from_json(to_json(p)), p);
  Json j = to_json(p);
  j["p_w"][0] = 11.0;
  EXPECT_THROW(power_from_json(j), std::invalid_argument);
}

TEST(ParamsJson, RoundTripBothVariants) {
  Rng rng(9);
  for (Variant v : {Variant::kScalarStep, Variant::kMlpLayer}) {
    const UnfoldedParams p = init_params({3, v, 4}, 0.1, 2, rng);
    const Json j = to_json(p, 10.0);
    EXPECT_EQ(j["n_layers"], 3);
    EXPECT_EQ(params_from_json(Json::parse(j.dump())), p);
  }
}

TEST(ParamsJson, RangeViolationRejected) {
  Rng rng(1);
  Json j = to_json(init_params({2, Variant::kScalarStep, 1}, 0.1, 2, rng), 10.0);
  j["delta1"][0] = 0.5;
  EXPECT_THROW(params_from_json(j), std::invalid_argument);
}

TEST(FormatDouble, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678, -2.5e-10}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.25), "0.25");
}

TEST(CsvWriter, ProvenanceHeaderAndRows) {
  CsvWriter csv({"tool 1", "seed = 3"}, {"a", "b"});
  csv.cell("x").cell(0.5).end_row();
  csv.cell(std::size_t{7}).cell(2.0).end_row();
  EXPECT_EQ(csv.str(), "# tool 1\n# seed = 3\na,b\nx,0.5\n7,2\n");
}

TEST(CsvWriter, ShapeErrors) {
  CsvWriter csv({}, {"a", "b"});
  csv.cell("x");
  EXPECT_THROW(csv.end_row(), std::logic_error);
  csv.cell("y");
  EXPECT_THROW(csv.cell("z"), std::logic_error);
  EXPECT_THROW(csv.cell("needs,quote"), std::invalid_argument);
  EXPECT_THROW(CsvWriter({}, {}), std::invalid_argument);
}

TEST(Files, WriteCreatesDirectoriesAndReadsBack) {
  const auto dir = std::filesystem::temp_directory_path() / "tpc_serialization_test";
  std::filesystem::remove_all(dir);
  write_json(dir / "nested" / "h.json", to_json(ChannelMatrix(1, {1e-6}, 1e-10)));
  EXPECT_EQ(channel_from_json(read_json(dir / "nested" / "h.json")).direct(0), 1e-6);
  EXPECT_THROW(read_json(dir / "missing.json"), std::runtime_error);
  write_text(dir / "broken.json", "{not json");
  EXPECT_THROW(read_json(dir / "broken.json"), std::runtime_error);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace tpc

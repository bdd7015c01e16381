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

#include <fmt/format.h>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tpc {
namespace {

void expect_format(const Json& j, const char* format) {
  if (!j.is_object() || j.value("format", "") != format) {
    throw std::invalid_argument(fmt::format("expected a '{}' document", format));
  }
  if (j.value("version", 0) != kFormatVersion) {
    throw std::invalid_argument(fmt::format("unsupported '{}' version", format));
  }
}

Json header(const char* format) {
  Json j;
  j["format"] = format;
  j["version"] = kFormatVersion;
  return j;
}

Json points_to_json(const std::vector<Point>& pts) {
  Json out = Json::array();
  for (const Point& p : pts) out.push_back({p.x, p.y});
  return out;
}

std::vector<Point> points_from_json(const Json& j) {
  std::vector<Point> out;
  for (const Json& p : j) out.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  return out;
}

}  // namespace

Json to_json(const ChannelMatrix& h) {
  Json j = header("channel");
  j["n"] = h.size();
  j["noise_power_w"] = h.noise_power();
  j["gains"] = std::vector<double>(h.gains().begin(), h.gains().end());
  return j;
}

ChannelMatrix channel_from_json(const Json& j) {
  expect_format(j, "channel");
  return ChannelMatrix(j.at("n").get<std::size_t>(), j.at("gains").get<std::vector<double>>(),
                       j.at("noise_power_w").get<double>());
}

Json to_json(const Deployment& dep) {
  Json j = header("deployment");
  j["area_m"] = {dep.scenario.area_x_m, dep.scenario.area_y_m};
  if (dep.scenario.max_pair_distance_m) {
    j["max_pair_distance_m"] = *dep.scenario.max_pair_distance_m;
  } else {
    j["max_pair_distance_m"] = nullptr;
  }
  j["tx"] = points_to_json(dep.tx);
  j["rx"] = points_to_json(dep.rx);
  return j;
}

Deployment deployment_from_json(const Json& j) {
  expect_format(j, "deployment");
  Deployment dep;
  dep.tx = points_from_json(j.at("tx"));
  dep.rx = points_from_json(j.at("rx"));
  if (dep.tx.size() != dep.rx.size()) {
    throw std::invalid_argument("deployment tx and rx counts differ");
  }
  dep.scenario.area_x_m = j.at("area_m").at(0).get<double>();
  dep.scenario.area_y_m = j.at("area_m").at(1).get<double>();
  dep.scenario.n_links = dep.tx.size();
  if (!j.at("max_pair_distance_m").is_null()) {
    dep.scenario.max_pair_distance_m = j.at("max_pair_distance_m").get<double>();
  }
  dep.scenario.validate();
  return dep;
}

Json to_json(const PowerVector& p) {
  Json j = header("power");
  j["p_max_w"] = p.p_max();
  j["p_w"] = p.values();
  return j;
}

PowerVector power_from_json(const Json& j) {
  expect_format(j, "power");
  return PowerVector(j.at("p_w").get<std::vector<double>>(), j.at("p_max_w").get<double>());
}

Json to_json(const UnfoldedParams& params, double p_max_w) {
  Json j = header("dupgd_params");
  j["variant"] = to_string(params.variant);
  j["n_layers"] = params.n_layers();
  j["p_max_w"] = p_max_w;
  j["delta1"] = params.delta1;
  j["delta2"] = params.delta2;
  Json layers = Json::array();
  for (const MlpWeights& w : params.mlp) {
    layers.push_back({{"n_links", w.n_links}, {"hidden", w.hidden}, {"w1", w.w1}, {"b1", w.b1},
                      {"w2", w.w2}, {"b2", w.b2}, {"w3", w.w3}, {"b3", w.b3}});
  }
  j["mlp"] = layers;
  return j;
}

UnfoldedParams params_from_json(const Json& j) {
  expect_format(j, "dupgd_params");
  UnfoldedParams p;
  p.variant = parse_variant(j.at("variant").get<std::string>());
  p.delta1 = j.at("delta1").get<std::vector<double>>();
  p.delta2 = j.at("delta2").get<std::vector<double>>();
  for (const Json& l : j.at("mlp")) {
    MlpWeights w;
    w.n_links = l.at("n_links").get<std::size_t>();
    w.hidden = l.at("hidden").get<std::size_t>();
    w.w1 = l.at("w1").get<std::vector<double>>();
    w.b1 = l.at("b1").get<std::vector<double>>();
    w.w2 = l.at("w2").get<std::vector<double>>();
    w.b2 = l.at("b2").get<std::vector<double>>();
    w.w3 = l.at("w3").get<std::vector<double>>();
    w.b3 = l.at("b3").get<std::vector<double>>();
    p.mlp.push_back(std::move(w));
  }
  if (p.n_layers() != j.at("n_layers").get<std::size_t>()) {
    throw std::invalid_argument("dupgd_params n_layers does not match the delta arrays");
  }
  p.validate();
  return p;
}

std::string format_double(double v) { return fmt::format("{}", v); }

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open {}", path.string()));
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::runtime_error(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  out << text;
  if (!out) throw std::runtime_error(fmt::format("write failed for {}", path.string()));
}

void write_json(const std::filesystem::path& path, const Json& j) {
  write_text(path, j.dump(2) + "\n");
}

CsvWriter::CsvWriter(std::vector<std::string> provenance, std::vector<std::string> header)
    : columns_(header.size()) {
  if (header.empty()) throw std::invalid_argument("csv header must not be empty");
  for (const std::string& line : provenance) text_ += "# " + line + "\n";
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i > 0) text_ += ',';
    text_ += header[i];
  }
  text_ += '\n';
}

CsvWriter& CsvWriter::cell(const std::string& s) {
  if (s.find_first_of(",\"\n") != std::string::npos) {
    throw std::invalid_argument(fmt::format("csv cell needs quoting: {}", s));
  }
  if (pending_ == columns_) throw std::logic_error("csv row has too many cells");
  if (pending_ > 0) text_ += ',';
  text_ += s;
  ++pending_;
  return *this;
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_double(v)); }

CsvWriter& CsvWriter::cell(std::size_t v) { return cell(std::to_string(v)); }

void CsvWriter::end_row() {
  if (pending_ != columns_) throw std::logic_error("csv row has too few cells");
  text_ += '\n';
  pending_ = 0;
}

}  // namespace tpc

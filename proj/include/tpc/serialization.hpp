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

// JSON fixtures and artifacts, plus a small CSV writer.
//
// Every JSON document carries "format" and "version". Gain matrices are
// row-major with entry [i * n + j] the power gain from transmitter i to
// receiver j; all quantities are SI (W, m, Hz).

#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

#include "tpc/channel_model.hpp"
#include "tpc/objective.hpp"
#include "tpc/unfolded_net.hpp"

namespace tpc {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

Json to_json(const ChannelMatrix& h);
ChannelMatrix channel_from_json(const Json& j);

Json to_json(const Deployment& dep);
Deployment deployment_from_json(const Json& j);

Json to_json(const PowerVector& p);
PowerVector power_from_json(const Json& j);

Json to_json(const UnfoldedParams& params, double p_max_w);
UnfoldedParams params_from_json(const Json& j);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

Json read_json(const std::filesystem::path& path);
/// Writes `text` verbatim, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const Json& j);

/// Accumulates CSV text with LF line endings. Lines starting with '#'
/// before the header carry provenance.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> provenance, std::vector<std::string> header);

  CsvWriter& cell(const std::string& s);
  CsvWriter& cell(double v);
  CsvWriter& cell(std::size_t v);
  void end_row();

  const std::string& str() const { return text_; }

 private:
  std::size_t columns_;
  std::size_t pending_ = 0;
  std::string text_;
};

}  // namespace tpc

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

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "tpc/serialization.hpp"

namespace tpc {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double to_real(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v)) {
    throw std::invalid_argument(fmt::format("expected a real number, got '{}'", s));
  }
  return v;
}

std::uint64_t to_u64(const std::string& s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw std::invalid_argument(fmt::format("expected a non-negative integer, got '{}'", s));
  }
  return v;
}

std::size_t to_count(const std::string& s) { return static_cast<std::size_t>(to_u64(s)); }

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

const char* to_string(InitRule r) {
  switch (r) {
    case InitRule::kMaxPower:
      return "max_power";
    case InitRule::kUniformRandom:
      return "uniform_random";
    case InitRule::kConstant:
      return "constant";
  }
  return "?";
}

InitRule parse_init_rule(const std::string& s) {
  for (InitRule r : {InitRule::kMaxPower, InitRule::kUniformRandom, InitRule::kConstant}) {
    if (s == to_string(r)) return r;
  }
  throw std::invalid_argument(fmt::format("unknown init rule '{}'", s));
}

const char* to_string(OnlineSchedule s) {
  return s == OnlineSchedule::kWholeUnroll ? "whole_unroll" : "layerwise";
}

OnlineSchedule parse_schedule(const std::string& s) {
  if (s == "whole_unroll") return OnlineSchedule::kWholeUnroll;
  if (s == "layerwise") return OnlineSchedule::kLayerwise;
  throw std::invalid_argument(fmt::format("unknown online schedule '{}'", s));
}

template <typename T, typename Fmt>
std::string join(const std::vector<T>& xs, Fmt f) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += ',';
    out += f(xs[i]);
  }
  return out;
}

std::string real_list(const std::vector<double>& xs) {
  return join(xs, [](double v) { return format_double(v); });
}

std::vector<double> parse_real_list(const std::string& s) {
  std::vector<double> out;
  for (const std::string& item : split_list(s)) out.push_back(to_real(item));
  require(!out.empty(), "list must not be empty");
  return out;
}

struct Entry {
  bool echoed = true;
  std::function<std::string(const CliConfig&)> get;
  std::function<void(CliConfig&, const std::string&)> set;
};

#define TPC_REAL(field, check, message)                                      \
  Entry {                                                                    \
    true, [](const CliConfig& c) { return format_double(c.field); },         \
        [](CliConfig& c, const std::string& s) {                             \
          const double v = to_real(s);                                       \
          require(check, message);                                           \
          c.field = v;                                                       \
        }                                                                    \
  }

#define TPC_COUNT(field, check, message)                                     \
  Entry {                                                                    \
    true, [](const CliConfig& c) { return std::to_string(c.field); },        \
        [](CliConfig& c, const std::string& s) {                             \
          const std::size_t v = to_count(s);                                 \
          require(check, message);                                           \
          c.field = v;                                                       \
        }                                                                    \
  }

const std::map<std::string, Entry>& registry() {
  static const std::map<std::string, Entry> entries = [] {
    std::map<std::string, Entry> m;
    m["seed"] = {true, [](const CliConfig& c) { return std::to_string(c.experiment.seed); },
                 [](CliConfig& c, const std::string& s) { c.experiment.seed = to_u64(s); }};
    m["workers"] = {false, [](const CliConfig& c) { return std::to_string(c.experiment.workers); },
                    [](CliConfig& c, const std::string& s) { c.experiment.workers = to_count(s); }};
    m["out_dir"] = {false, [](const CliConfig& c) { return c.out_dir; },
                    [](CliConfig& c, const std::string& s) {
                      require(!s.empty(), "must not be empty");
                      c.out_dir = s;
                    }};

    m["scenario.area_x_m"] = TPC_REAL(experiment.scenario.area_x_m, v > 0.0, "must be > 0");
    m["scenario.area_y_m"] = TPC_REAL(experiment.scenario.area_y_m, v > 0.0, "must be > 0");
    m["scenario.n_links"] = TPC_COUNT(experiment.scenario.n_links, v >= 1, "must be >= 1");
    m["scenario.max_pair_distance_m"] = {
        true,
        [](const CliConfig& c) {
          const auto& d = c.experiment.scenario.max_pair_distance_m;
          return d ? format_double(*d) : std::string("none");
        },
        [](CliConfig& c, const std::string& s) {
          if (s == "none") {
            c.experiment.scenario.max_pair_distance_m.reset();
            return;
          }
          const double v = to_real(s);
          require(v >= 0.0, "must be >= 0 or 'none'");
          c.experiment.scenario.max_pair_distance_m = v;
        }};

    m["propagation.carrier_freq_hz"] =
        TPC_REAL(experiment.propagation.carrier_freq_hz, v > 0.0, "must be > 0");
    m["propagation.pathloss_exponent"] =
        TPC_REAL(experiment.propagation.pathloss_exponent, v > 0.0, "must be > 0");
    m["propagation.shadowing_std_db"] =
        TPC_REAL(experiment.propagation.shadowing_std_db, v >= 0.0, "must be >= 0");
    m["propagation.noise_power_w"] =
        TPC_REAL(experiment.propagation.noise_power_w, v > 0.0, "must be > 0");
    m["propagation.bandwidth_hz"] =
        TPC_REAL(experiment.propagation.bandwidth_hz, v > 0.0, "must be > 0");

    m["power.p_max_w"] = TPC_REAL(experiment.p_max_w, v > 0.0, "must be > 0");

    m["pgd.step_size"] = TPC_REAL(experiment.pgd.step_size, v > 0.0 && v < 1.0, "must be in (0, 1)");
    m["pgd.max_iters"] = TPC_COUNT(experiment.pgd.max_iters, v >= 1, "must be >= 1");
    m["pgd.init"] = {true, [](const CliConfig& c) { return std::string(to_string(c.experiment.pgd.init.rule)); },
                     [](CliConfig& c, const std::string& s) { c.experiment.pgd.init.rule = parse_init_rule(s); }};
    m["pgd.init_value_w"] = TPC_REAL(experiment.pgd.init.value_w, v >= 0.0, "must be >= 0");
    m["pgd.early_stop_tol"] = TPC_REAL(experiment.pgd.early_stop_tol, v >= 0.0, "must be >= 0");
    m["pgd.record_trajectory"] = {
        true, [](const CliConfig& c) { return std::string(c.experiment.pgd.record_trajectory ? "true" : "false"); },
        [](CliConfig& c, const std::string& s) {
          require(s == "true" || s == "false", "expected true or false");
          c.experiment.pgd.record_trajectory = s == "true";
        }};
    m["pgd.channel_file"] = {true, [](const CliConfig& c) { return c.channel_file; },
                             [](CliConfig& c, const std::string& s) { c.channel_file = s; }};

    m["dupgd.n_layers"] = TPC_COUNT(experiment.dupgd.net.n_layers, v >= 1, "must be >= 1");
    m["dupgd.variant"] = {true, [](const CliConfig& c) { return std::string(to_string(c.experiment.dupgd.net.variant)); },
                          [](CliConfig& c, const std::string& s) { c.experiment.dupgd.net.variant = parse_variant(s); }};
    m["dupgd.hidden_width"] = TPC_COUNT(experiment.dupgd.net.hidden_width, v >= 1, "must be >= 1");
    m["dupgd.online_init"] = {true, [](const CliConfig& c) { return std::string(to_string(c.experiment.dupgd.online_init)); },
                              [](CliConfig& c, const std::string& s) { c.experiment.dupgd.online_init = parse_online_init(s); }};

    m["train.batch_size"] = TPC_COUNT(experiment.dupgd.train.batch_size, v >= 1, "must be >= 1");
    m["train.lr"] = TPC_REAL(experiment.dupgd.train.lr, v > 0.0, "must be > 0");
    m["train.beta1"] = TPC_REAL(experiment.dupgd.train.beta1, v >= 0.0 && v < 1.0, "must be in [0, 1)");
    m["train.beta2"] = TPC_REAL(experiment.dupgd.train.beta2, v >= 0.0 && v < 1.0, "must be in [0, 1)");
    m["train.eps"] = TPC_REAL(experiment.dupgd.train.eps, v > 0.0, "must be > 0");
    m["train.n_batches"] = TPC_COUNT(experiment.dupgd.train.n_batches, true, "");
    m["train.online_steps"] = TPC_COUNT(experiment.dupgd.train.online_steps, true, "");
    m["train.init_step_size"] =
        TPC_REAL(experiment.dupgd.train.init_step_size, v > 0.0 && v <= 1.0, "must be in (0, 1]");
    m["train.online_schedule"] = {
        true, [](const CliConfig& c) { return std::string(to_string(c.experiment.dupgd.train.online_schedule)); },
        [](CliConfig& c, const std::string& s) { c.experiment.dupgd.train.online_schedule = parse_schedule(s); }};

    m["experiment.methods"] = {
        true, [](const CliConfig& c) { return join(c.experiment.methods, [](MethodId v) { return std::string(to_string(v)); }); },
        [](CliConfig& c, const std::string& s) {
          std::vector<MethodId> methods;
          for (const std::string& item : split_list(s)) methods.push_back(parse_method(item));
          require(!methods.empty(), "list must not be empty");
          c.experiment.methods = methods;
        }};
    m["experiment.n_realizations"] = TPC_COUNT(experiment.n_realizations, v >= 1, "must be >= 1");

    m["sweep.axes"] = {
        true, [](const CliConfig& c) { return join(c.sweep_axes, [](SweepAxis a) { return std::string(to_string(a)); }); },
        [](CliConfig& c, const std::string& s) {
          std::vector<SweepAxis> axes;
          for (const std::string& item : split_list(s)) axes.push_back(parse_sweep_axis(item));
          require(!axes.empty(), "list must not be empty");
          c.sweep_axes = axes;
        }};
    m["sweep.n_links"] = {true, [](const CliConfig& c) { return real_list(c.sweep_n_links); },
                          [](CliConfig& c, const std::string& s) {
                            const auto v = parse_real_list(s);
                            for (double x : v) require(x >= 1.0 && x == std::floor(x), "entries must be positive integers");
                            c.sweep_n_links = v;
                          }};
    m["sweep.pathloss_exponent"] = {true, [](const CliConfig& c) { return real_list(c.sweep_pathloss_exponent); },
                                    [](CliConfig& c, const std::string& s) {
                                      const auto v = parse_real_list(s);
                                      for (double x : v) require(x > 0.0, "entries must be > 0");
                                      c.sweep_pathloss_exponent = v;
                                    }};
    m["sweep.shadowing_std"] = {true, [](const CliConfig& c) { return real_list(c.sweep_shadowing_std); },
                                [](CliConfig& c, const std::string& s) {
                                  const auto v = parse_real_list(s);
                                  for (double x : v) require(x >= 0.0, "entries must be >= 0");
                                  c.sweep_shadowing_std = v;
                                }};

    m["reproduce.scenarios"] = {
        true, [](const CliConfig& c) { return join(c.scenarios, [](const std::string& v) { return v; }); },
        [](CliConfig& c, const std::string& s) {
          const auto labels = split_list(s);
          require(!labels.empty(), "list must not be empty");
          for (const std::string& l : labels) require(l == "scen1" || l == "scen2", "entries must be scen1 or scen2");
          c.scenarios = labels;
        }};
    m["reproduce.scen2_max_pair_distance_m"] =
        TPC_REAL(scen2_max_pair_distance_m, v >= 0.0, "must be >= 0");
    m["reproduce.iteration_grid"] = {
        true, [](const CliConfig& c) { return join(c.iteration_grid, [](std::size_t v) { return std::to_string(v); }); },
        [](CliConfig& c, const std::string& s) {
          std::vector<std::size_t> grid;
          for (const std::string& item : split_list(s)) grid.push_back(to_count(item));
          require(!grid.empty(), "list must not be empty");
          for (std::size_t i = 0; i < grid.size(); ++i) {
            require(grid[i] >= 1, "entries must be >= 1");
            require(i == 0 || grid[i] > grid[i - 1], "entries must be strictly ascending");
          }
          c.iteration_grid = grid;
        }};
    m["reproduce.max_unfolded_layers"] = TPC_COUNT(max_unfolded_layers, v >= 1, "must be >= 1");

    m["gradcheck.instances"] = TPC_COUNT(gradcheck_instances, v >= 1, "must be >= 1");
    return m;
  }();
  return entries;
}

#undef TPC_REAL
#undef TPC_COUNT

}  // namespace

CliConfig default_config() {
  CliConfig cfg;
  cfg.experiment.workers = 0;
  return cfg;
}

void apply_setting(CliConfig& cfg, std::string_view key, std::string_view value) {
  const auto& entries = registry();
  const auto it = entries.find(std::string(key));
  if (it == entries.end()) throw ConfigError(fmt::format("unknown config key '{}'", key));
  try {
    it->second.set(cfg, trim(value));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("{}: {}", key, e.what()));
  }
}

void apply_config_text(CliConfig& cfg, std::string_view text, const std::string& origin) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find('\n', start), text.size());
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("{}:{}: expected 'key = value'", origin, line_no));
    }
    try {
      apply_setting(cfg, trim(body.substr(0, eq)), body.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("{}:{}: {}", origin, line_no, e.what()));
    }
  }
}

void apply_config_file(CliConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read config file {}", path.string()));
  std::ostringstream text;
  text << in.rdbuf();
  apply_config_text(cfg, text.str(), path.string());
}

void validate(const CliConfig& cfg) {
  const ExperimentConfig& e = cfg.experiment;
  if (e.pgd.init.rule == InitRule::kConstant && e.pgd.init.value_w > e.p_max_w) {
    throw ConfigError("pgd.init_value_w: must not exceed power.p_max_w");
  }
  const auto& d = e.scenario.max_pair_distance_m;
  if (d && *d > std::hypot(e.scenario.area_x_m, e.scenario.area_y_m)) {
    throw ConfigError("scenario.max_pair_distance_m: larger than the area diagonal");
  }
  if (cfg.scen2_max_pair_distance_m > std::hypot(e.scenario.area_x_m, e.scenario.area_y_m)) {
    throw ConfigError("reproduce.scen2_max_pair_distance_m: larger than the area diagonal");
  }
  try {
    e.validate();
  } catch (const std::invalid_argument& err) {
    throw ConfigError(fmt::format("invalid configuration: {}", err.what()));
  }
}

std::vector<std::pair<std::string, std::string>> config_echo(const CliConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [key, entry] : registry()) {
    if (entry.echoed) out.emplace_back(key, entry.get(cfg));
  }
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& [key, entry] : registry()) out.push_back(key);
  return out;
}

ExperimentConfig scenario_experiment(const CliConfig& cfg, const std::string& label) {
  ExperimentConfig e = cfg.experiment;
  if (label == "scen1") {
    e.scenario.max_pair_distance_m.reset();
  } else if (label == "scen2") {
    e.scenario.max_pair_distance_m = cfg.scen2_max_pair_distance_m;
  } else {
    throw ConfigError(fmt::format("reproduce.scenarios: unknown scenario '{}'", label));
  }
  return e;
}

}  // namespace tpc

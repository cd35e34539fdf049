// Copyright 2026 The SmoothMix Authors
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

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "smoothmix/data.hpp"
#include "smoothmix/training.hpp"
#include "smoothmix_tools/config.hpp"

namespace smoothmix::tools {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

struct RunOptions {
  std::filesystem::path config;
  std::filesystem::path out = "out";
  std::optional<std::uint64_t> seed;
  int workers = 1;
  // Zero every wall-clock field so repeated runs are byte-identical.
  bool timings = true;
};

struct Manifest {
  std::string command;
  std::string run_id;
  std::string version;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> config;
  std::map<std::string, std::string> artifacts;  // name -> file name inside out
  std::map<std::string, double> timings;
  std::map<std::string, std::string> summary;

  std::string to_json() const;
};

std::string version_string();

// Every key any subcommand understands. Other keys are rejected.
const std::set<std::string>& known_config_keys();

// Dataset described by the data.* keys, split into (train, test).
std::pair<Dataset, Dataset> load_splits(const FlatConfig& cfg, std::uint64_t seed);

TrainRunConfig train_run_config(const FlatConfig& cfg, std::uint64_t seed);
MethodConfig method_config(const FlatConfig& cfg);

// Runs fn(i) for i in [0, count) on `workers` threads. fn must only touch
// state owned by index i.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

Manifest cmd_train(const FlatConfig& cfg, const RunOptions& opts);
Manifest cmd_certify(const FlatConfig& cfg, const RunOptions& opts);
Manifest cmd_evaluate(const FlatConfig& cfg, const RunOptions& opts);
Manifest cmd_attack_demo(const FlatConfig& cfg, const RunOptions& opts);
Manifest cmd_mixratio(const FlatConfig& cfg, const RunOptions& opts);
Manifest cmd_theory_sim(const FlatConfig& cfg, const RunOptions& opts);

// Loads the config, dispatches, writes <out>/manifest.json. Throws
// ConfigError for bad input and other exceptions for runtime failures.
Manifest run_command(const std::string& command, const RunOptions& opts);

// Full CLI entry point; returns the process exit code.
int cli_main(int argc, char** argv);

}  // namespace smoothmix::tools

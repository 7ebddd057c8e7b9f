// Copyright 2026 The hetconv Authors.
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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hetconv/datagen.hpp"
#include "hetconv/training.hpp"

namespace hetconv::cli {

// Everything a command can be configured with. JSON keys match the field
// names; "generator" holds a generator spec object.
struct RunConfig {
  TrainConfig train;
  std::optional<GenSpec> generator;
  double train_percent = 80.0;
};

// Throws ConfigError on unknown keys or bad values.
RunConfig parse_run_config(const std::string& json_text);
std::string run_config_to_json(const RunConfig& cfg);

// Keeps up to `max_per_type` linked objects of every type (features cut to
// `max_features` columns) with the links among them, for cheap gradient
// checks on real data.
HinGraph induced_subgraph(const HinGraph& g, long max_per_type, long max_features);

// Runs one command line (args excludes the program name) and returns the
// process exit code: 0 success, 1 usage or config error, 2 data error,
// 3 numerical check failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hetconv::cli

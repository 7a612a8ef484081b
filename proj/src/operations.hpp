// Copyright 2026 The ckn-lab Authors
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

#include <map>
#include <string>
#include <vector>

#include "ckn/experiment.hpp"

namespace ckn::experiment::detail {

struct OperationInfo {
  std::string module;
  std::string operation;
  std::vector<std::string> option_keys;
  std::map<std::string, double> tolerances;
  bool uses_family = false;
  /// False for operations that take no parameter tuple.
  bool needs_params = true;
};

/// Throws ConfigError for unknown subcommands.
const OperationInfo& operation_info(const std::string& name, const std::string& path);

struct Outcome {
  json summary = json::object();
  json series = json::object();
  json labels = json::object();
  std::vector<Check> checks;
  std::vector<std::string> grids;
};

Outcome execute(const ExperimentConfig& config, TolProfile profile);

}  // namespace ckn::experiment::detail

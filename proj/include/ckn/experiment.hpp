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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ckn/errors.hpp"
#include "ckn/params.hpp"
#include "ckn/stability.hpp"

namespace ckn::experiment {

using json = nlohmann::json;

extern const char* const kArtifactVersion;

enum class TolProfile { fast, strict };
TolProfile parse_profile(const std::string& name);
std::string to_string(TolProfile profile);

struct GridSpec {
  double panel_width = 0.25;
  double t_cap = 150.0;
  /// Node multiplier applied on top of the suggested grid.
  int refine = 1;
  int angles = 64;
};

/// One experiment. `operation` is a CLI subcommand name; options and
/// tolerances are validated against the keys that operation understands.
struct ExperimentConfig {
  std::string id;
  std::string operation;
  std::string description;
  std::vector<CknParams> params;
  int random_params = 0;
  GridSpec grid;
  std::optional<FamilySpec> family;
  std::map<std::string, double> tolerances;
  json options = json::object();
  std::uint64_t seed = 1;
};

/// A config file holds either one experiment or {"id", "suite": [...]}.
struct SuiteConfig {
  std::string id;
  std::vector<ExperimentConfig> experiments;
};

/// Throws ConfigError naming the offending field path.
ExperimentConfig parse_config(const json& j, const std::string& path = "config");
json to_json(const ExperimentConfig& config);
SuiteConfig parse_suite(const json& j);
SuiteConfig load_suite(const std::string& file);

struct Check {
  std::string name;
  double value = 0.0;
  std::string relation;
  double limit = 0.0;
  bool pass = false;
};

struct ResultRecord {
  std::string id;
  std::string timestamp;
  std::string module;
  std::string operation;
  std::string version;
  std::string inputs_digest;
  std::string outputs_digest;
  std::string status;
  /// {"summary": {name: real}, "series": {name: [real]}, "labels": {name: text}}
  json outputs;
  std::vector<Check> checks;

  bool passed() const { return status == "pass"; }
};

json to_json(const ResultRecord& record);
/// Throws FormatError on missing or mistyped fields.
ResultRecord record_from_json(const json& j);

struct RunOptions {
  /// Empty: no ledger write.
  std::string ledger_path;
  /// Directory for CSV side-products; empty: none.
  std::string out_dir;
  TolProfile profile = TolProfile::fast;
  std::optional<std::uint64_t> seed_override;
  /// When set, every experiment must carry this operation.
  std::string expected_operation;
};

ResultRecord run_experiment(const ExperimentConfig& config, const RunOptions& options);
std::vector<ResultRecord> run_suite(const SuiteConfig& suite, const RunOptions& options);

/// Every record of a JSON-lines ledger; LedgerCorrupt names the bad line.
std::vector<ResultRecord> read_ledger(const std::string& path);

struct ReportOutput {
  std::size_t rows = 0;
  std::vector<std::string> files;
  std::string text;
};

/// filter: empty, or comma-separated key=value terms over id, module,
/// operation, status and version.
ReportOutput report(const std::string& ledger_path, const std::string& filter, const std::string& out_dir);

std::string sha256_hex(const std::string& data);

/// 0 success, 2 configuration, 3 numerical failure, 4 invariant violation.
int exit_code_for(ErrorKind kind);

/// Subcommand names in CLI order (report excluded).
const std::vector<std::string>& operations();

}  // namespace ckn::experiment

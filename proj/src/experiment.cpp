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

#include "ckn/experiment.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>

#include "operations.hpp"

namespace ckn::experiment {

const char* const kArtifactVersion = "0.1.0";

namespace {

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
  fail(ErrorKind::ConfigError, path + ": " + what);
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) config_error(path, "expected an object");
}

void reject_unknown(const json& j, const std::string& path, const std::vector<std::string>& allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      config_error(path + "." + it.key(), "unknown key");
    }
  }
}

double number_at(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) config_error(path + "." + key, "missing");
  if (!j[key].is_number()) config_error(path + "." + key, "expected a number");
  return j[key].get<double>();
}

double number_or(const json& j, const std::string& key, const std::string& path, double fallback) {
  return j.contains(key) ? number_at(j, key, path) : fallback;
}

long long integer_at(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) config_error(path + "." + key, "missing");
  if (!j[key].is_number_integer()) config_error(path + "." + key, "expected an integer");
  return j[key].get<long long>();
}

std::string string_at(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) config_error(path + "." + key, "missing");
  if (!j[key].is_string()) config_error(path + "." + key, "expected a string");
  return j[key].get<std::string>();
}

std::vector<double> numbers_at(const json& j, const std::string& key, const std::string& path) {
  if (!j[key].is_array()) config_error(path + "." + key, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j[key].size(); ++i) {
    if (!j[key][i].is_number()) config_error(path + "." + key + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(j[key][i].get<double>());
  }
  return out;
}

std::string strip_kind(const Error& e) {
  const std::string what = e.what();
  const auto pos = what.find(": ");
  return pos == std::string::npos ? what : what.substr(pos + 2);
}

CknParams parse_params(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"n", "p", "a", "b"});
  const long long n = integer_at(j, "n", path);
  const double p = number_at(j, "p", path);
  const double a = number_at(j, "a", path);
  const double b = number_at(j, "b", path);
  try {
    return derive_params(static_cast<int>(n), p, a, b);
  } catch (const Error& e) {
    config_error(path, strip_kind(e));
  }
}

FamilySpec parse_family(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path,
                 {"name", "eps", "centers", "width", "scale", "count", "eps_min", "eps_max", "center_min",
                  "center_max", "orthogonalize"});
  FamilySpec f;
  f.name = string_at(j, "name", path);
  if (j.contains("eps")) f.eps = numbers_at(j, "eps", path);
  if (j.contains("centers")) f.centers = numbers_at(j, "centers", path);
  f.width = number_or(j, "width", path, f.width);
  f.scale = number_or(j, "scale", path, f.scale);
  if (j.contains("count")) f.count = static_cast<int>(integer_at(j, "count", path));
  f.eps_min = number_or(j, "eps_min", path, f.eps_min);
  f.eps_max = number_or(j, "eps_max", path, f.eps_max);
  f.center_min = number_or(j, "center_min", path, f.center_min);
  f.center_max = number_or(j, "center_max", path, f.center_max);
  if (j.contains("orthogonalize")) {
    if (!j["orthogonalize"].is_boolean()) config_error(path + ".orthogonalize", "expected a boolean");
    f.orthogonalize = j["orthogonalize"].get<bool>();
  }
  if (f.name != "bubble_plus_bump" && f.name != "random_bumps" && f.name != "exact_bubbles") {
    config_error(path + ".name", "unknown family '" + f.name + "'");
  }
  return f;
}

json family_json(const FamilySpec& f) {
  return json{{"name", f.name},         {"eps", f.eps},         {"centers", f.centers},
              {"width", f.width},       {"scale", f.scale},     {"count", f.count},
              {"eps_min", f.eps_min},   {"eps_max", f.eps_max}, {"center_min", f.center_min},
              {"center_max", f.center_max}, {"orthogonalize", f.orthogonalize}};
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
  }
  return v.dump();
}

void write_series_csv(const std::filesystem::path& file, const json& series, const std::vector<std::string>& keys) {
  std::ofstream os(file);
  if (!os) fail(ErrorKind::ConfigError, "cannot write " + file.string());
  std::size_t rows = 0;
  for (std::size_t k = 0; k < keys.size(); ++k) {
    os << (k ? "," : "") << keys[k];
    rows = std::max(rows, series[keys[k]].size());
  }
  os << "\n";
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < keys.size(); ++k) {
      const json& col = series[keys[k]];
      os << (k ? "," : "") << (i < col.size() ? csv_cell(col[i]) : "");
    }
    os << "\n";
  }
}

std::mutex& ledger_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

TolProfile parse_profile(const std::string& name) {
  if (name == "fast") return TolProfile::fast;
  if (name == "strict") return TolProfile::strict;
  fail(ErrorKind::ConfigError, "tol-profile must be fast or strict, got '" + name + "'");
}

std::string to_string(TolProfile profile) { return profile == TolProfile::fast ? "fast" : "strict"; }

ExperimentConfig parse_config(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path,
                 {"id", "operation", "description", "params", "random_params", "grid", "family", "tolerances",
                  "options", "seed"});
  ExperimentConfig c;
  c.id = string_at(j, "id", path);
  if (c.id.empty() || c.id.find_first_not_of("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_.-") !=
                          std::string::npos) {
    config_error(path + ".id", "must be non-empty and use only [A-Za-z0-9_.-]");
  }
  c.operation = string_at(j, "operation", path);
  const detail::OperationInfo& info = detail::operation_info(c.operation, path + ".operation");
  if (j.contains("description")) c.description = string_at(j, "description", path);
  if (j.contains("params")) {
    if (!j["params"].is_array()) config_error(path + ".params", "expected an array");
    for (std::size_t i = 0; i < j["params"].size(); ++i) {
      c.params.push_back(parse_params(j["params"][i], path + ".params[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("random_params")) {
    const long long r = integer_at(j, "random_params", path);
    if (r < 0) config_error(path + ".random_params", "must be >= 0");
    c.random_params = static_cast<int>(r);
  }
  if (info.needs_params && c.params.empty() && c.random_params == 0) config_error(path + ".params", "missing");
  if (j.contains("grid")) {
    const json& g = j["grid"];
    const std::string gp = path + ".grid";
    require_object(g, gp);
    reject_unknown(g, gp, {"panel_width", "t_cap", "refine", "angles"});
    c.grid.panel_width = number_or(g, "panel_width", gp, c.grid.panel_width);
    c.grid.t_cap = number_or(g, "t_cap", gp, c.grid.t_cap);
    if (g.contains("refine")) c.grid.refine = static_cast<int>(integer_at(g, "refine", gp));
    if (g.contains("angles")) c.grid.angles = static_cast<int>(integer_at(g, "angles", gp));
    if (!(c.grid.panel_width > 0.0)) config_error(gp + ".panel_width", "must be positive");
    if (c.grid.refine < 1) config_error(gp + ".refine", "must be >= 1");
    if (c.grid.angles < 2) config_error(gp + ".angles", "must be >= 2");
  }
  if (j.contains("family")) {
    if (!info.uses_family) config_error(path + ".family", "operation '" + c.operation + "' takes no family");
    c.family = parse_family(j["family"], path + ".family");
  }
  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    const std::string tp = path + ".tolerances";
    require_object(t, tp);
    for (auto it = t.begin(); it != t.end(); ++it) {
      if (!info.tolerances.count(it.key())) config_error(tp + "." + it.key(), "unknown key");
      c.tolerances[it.key()] = number_at(t, it.key(), tp);
    }
  }
  if (j.contains("options")) {
    const std::string op = path + ".options";
    require_object(j["options"], op);
    reject_unknown(j["options"], op, info.option_keys);
    c.options = j["options"];
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) config_error(path + ".seed", "expected a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["id"] = c.id;
  j["operation"] = c.operation;
  j["description"] = c.description;
  j["params"] = json::array();
  for (const CknParams& p : c.params) j["params"].push_back({{"n", p.n}, {"p", p.p}, {"a", p.a}, {"b", p.b}});
  j["random_params"] = c.random_params;
  j["grid"] = {{"panel_width", c.grid.panel_width},
               {"t_cap", c.grid.t_cap},
               {"refine", c.grid.refine},
               {"angles", c.grid.angles}};
  if (c.family) j["family"] = family_json(*c.family);
  j["tolerances"] = json::object();
  for (const auto& [k, v] : c.tolerances) j["tolerances"][k] = v;
  j["options"] = c.options;
  j["seed"] = c.seed;
  return j;
}

SuiteConfig parse_suite(const json& j) {
  require_object(j, "config");
  SuiteConfig s;
  if (!j.contains("suite")) {
    s.experiments.push_back(parse_config(j));
    s.id = s.experiments.front().id;
    return s;
  }
  reject_unknown(j, "config", {"id", "description", "suite"});
  s.id = string_at(j, "id", "config");
  if (!j["suite"].is_array() || j["suite"].empty()) config_error("config.suite", "expected a non-empty array");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < j["suite"].size(); ++i) {
    const std::string path = "config.suite[" + std::to_string(i) + "]";
    s.experiments.push_back(parse_config(j["suite"][i], path));
    if (!ids.insert(s.experiments.back().id).second) config_error(path + ".id", "duplicate id");
  }
  return s;
}

SuiteConfig load_suite(const std::string& file) {
  std::ifstream is(file);
  if (!is) fail(ErrorKind::ConfigError, "cannot open config " + file);
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::ConfigError, file + ": " + e.what());
  }
  return parse_suite(j);
}

json to_json(const ResultRecord& r) {
  json checks = json::array();
  for (const Check& c : r.checks) {
    checks.push_back({{"name", c.name}, {"value", c.value}, {"relation", c.relation}, {"limit", c.limit},
                      {"pass", c.pass}});
  }
  return json{{"id", r.id},
              {"timestamp", r.timestamp},
              {"module", r.module},
              {"operation", r.operation},
              {"version", r.version},
              {"inputs_digest", r.inputs_digest},
              {"outputs_digest", r.outputs_digest},
              {"status", r.status},
              {"outputs", r.outputs},
              {"checks", checks}};
}

ResultRecord record_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorKind::FormatError, "record is not an object");
  auto text = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_string()) fail(ErrorKind::FormatError, std::string("record lacks '") + key + "'");
    return j[key].get<std::string>();
  };
  ResultRecord r;
  r.id = text("id");
  r.timestamp = text("timestamp");
  r.module = text("module");
  r.operation = text("operation");
  r.version = text("version");
  r.inputs_digest = text("inputs_digest");
  r.outputs_digest = text("outputs_digest");
  r.status = text("status");
  if (!j.contains("outputs") || !j["outputs"].is_object()) fail(ErrorKind::FormatError, "record lacks 'outputs'");
  r.outputs = j["outputs"];
  if (!j.contains("checks") || !j["checks"].is_array()) fail(ErrorKind::FormatError, "record lacks 'checks'");
  for (const json& c : j["checks"]) {
    try {
      r.checks.push_back({c.at("name").get<std::string>(), c.at("value").get<double>(),
                          c.at("relation").get<std::string>(), c.at("limit").get<double>(), c.at("pass").get<bool>()});
    } catch (const json::exception& e) {
      fail(ErrorKind::FormatError, std::string("bad check entry: ") + e.what());
    }
  }
  return r;
}

ResultRecord run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  ExperimentConfig c = config;
  if (options.seed_override) c.seed = *options.seed_override;
  if (!options.expected_operation.empty() && c.operation != options.expected_operation) {
    fail(ErrorKind::ConfigError, "config.operation: '" + c.operation + "' given to the '" +
                                     options.expected_operation + "' subcommand");
  }
  const detail::OperationInfo& info = detail::operation_info(c.operation, "config.operation");
  detail::Outcome outcome;
  try {
    outcome = detail::execute(c, options.profile);
  } catch (const Error& e) {
    throw Error(e.kind(), "experiment '" + c.id + "' (" + c.operation + "): " + strip_kind(e));
  }

  ResultRecord r;
  r.id = c.id;
  r.timestamp = utc_timestamp();
  r.module = info.module;
  r.operation = info.operation;
  r.version = kArtifactVersion;
  r.outputs = json{{"summary", outcome.summary}, {"series", outcome.series}, {"labels", outcome.labels}};
  r.checks = outcome.checks;
  r.status = std::all_of(r.checks.begin(), r.checks.end(), [](const Check& k) { return k.pass; }) ? "pass" : "fail";

  std::string inputs = std::string(kArtifactVersion) + "\n" + to_json(c).dump() + "\n" + to_string(options.profile);
  for (const std::string& g : outcome.grids) inputs += "\n" + g;
  r.inputs_digest = sha256_hex(inputs);
  json check_json = to_json(r)["checks"];
  r.outputs_digest = sha256_hex(r.outputs.dump() + "\n" + check_json.dump());

  if (!options.ledger_path.empty()) {
    std::lock_guard<std::mutex> lock(ledger_mutex());
    std::ofstream os(options.ledger_path, std::ios::app);
    if (!os) fail(ErrorKind::ConfigError, "cannot open ledger " + options.ledger_path);
    os << to_json(r).dump() << "\n";
    os.flush();
  }
  if (!options.out_dir.empty() && !outcome.series.empty()) {
    std::filesystem::create_directories(options.out_dir);
    std::vector<std::string> keys;
    for (auto it = outcome.series.begin(); it != outcome.series.end(); ++it) keys.push_back(it.key());
    write_series_csv(std::filesystem::path(options.out_dir) / (c.id + ".csv"), outcome.series, keys);
  }
  return r;
}

std::vector<ResultRecord> run_suite(const SuiteConfig& suite, const RunOptions& options) {
  std::vector<ResultRecord> out;
  for (const ExperimentConfig& c : suite.experiments) out.push_back(run_experiment(c, options));
  return out;
}

std::vector<ResultRecord> read_ledger(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorKind::LedgerCorrupt, "cannot read ledger " + path);
  std::vector<ResultRecord> out;
  std::string line;
  for (std::size_t number = 1; std::getline(is, line); ++number) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(record_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      fail(ErrorKind::LedgerCorrupt, path + " line " + std::to_string(number) + ": " + e.what());
    } catch (const Error& e) {
      fail(ErrorKind::LedgerCorrupt, path + " line " + std::to_string(number) + ": " + strip_kind(e));
    }
  }
  return out;
}

ReportOutput report(const std::string& ledger_path, const std::string& filter, const std::string& out_dir) {
  std::vector<std::pair<std::string, std::string>> terms;
  std::stringstream ss(filter);
  std::string term;
  while (std::getline(ss, term, ',')) {
    if (term.empty()) continue;
    const auto eq = term.find('=');
    if (eq == std::string::npos) fail(ErrorKind::ConfigError, "filter term '" + term + "' is not key=value");
    const std::string key = term.substr(0, eq);
    if (key != "id" && key != "module" && key != "operation" && key != "status" && key != "version") {
      fail(ErrorKind::ConfigError, "filter key '" + key + "' is not one of id, module, operation, status, version");
    }
    terms.emplace_back(key, term.substr(eq + 1));
  }
  std::vector<ResultRecord> rows;
  for (ResultRecord& r : read_ledger(ledger_path)) {
    const json j = to_json(r);
    const bool keep = std::all_of(terms.begin(), terms.end(),
                                  [&](const auto& t) { return j[t.first].template get<std::string>() == t.second; });
    if (keep) rows.push_back(std::move(r));
  }

  std::set<std::string> summary_keys;
  for (const ResultRecord& r : rows) {
    for (auto it = r.outputs["summary"].begin(); it != r.outputs["summary"].end(); ++it) summary_keys.insert(it.key());
  }

  ReportOutput out;
  out.rows = rows.size();
  const std::filesystem::path dir = out_dir.empty() ? "." : out_dir;
  std::filesystem::create_directories(dir);

  const std::filesystem::path csv = dir / "report.csv";
  {
    std::ofstream os(csv);
    if (!os) fail(ErrorKind::ConfigError, "cannot write " + csv.string());
    os << "id,timestamp,module,operation,version,status,checks_passed,checks_total,inputs_digest,outputs_digest";
    for (const std::string& k : summary_keys) os << "," << k;
    os << "\n";
    for (const ResultRecord& r : rows) {
      const auto passed = std::count_if(r.checks.begin(), r.checks.end(), [](const Check& c) { return c.pass; });
      os << csv_cell(r.id) << "," << r.timestamp << "," << r.module << "," << r.operation << "," << r.version << ","
         << r.status << "," << passed << "," << r.checks.size() << "," << r.inputs_digest << "," << r.outputs_digest;
      for (const std::string& k : summary_keys) {
        os << "," << (r.outputs["summary"].contains(k) ? csv_cell(r.outputs["summary"][k]) : "");
      }
      os << "\n";
    }
  }
  out.files.push_back(csv.string());

  for (const ResultRecord& r : rows) {
    const json& series = r.outputs["series"];
    if (series.contains("plot_x") && series.contains("plot_y")) {
      const std::filesystem::path plot = dir / (r.id + "_plot.csv");
      json xy = {{"x", series["plot_x"]}, {"y", series["plot_y"]}};
      write_series_csv(plot, xy, {"x", "y"});
      out.files.push_back(plot.string());
    }
  }

  std::ostringstream text;
  std::size_t wid = 2, wop = 9;
  for (const ResultRecord& r : rows) {
    wid = std::max(wid, r.id.size());
    wop = std::max(wop, r.operation.size());
  }
  text << std::left << std::setw(static_cast<int>(wid) + 2) << "id" << std::setw(static_cast<int>(wop) + 2)
       << "operation" << std::setw(8) << "status" << std::setw(9) << "checks"
       << "outputs digest\n";
  std::size_t failed = 0;
  for (const ResultRecord& r : rows) {
    const auto passed = std::count_if(r.checks.begin(), r.checks.end(), [](const Check& c) { return c.pass; });
    if (!r.passed()) ++failed;
    text << std::setw(static_cast<int>(wid) + 2) << r.id << std::setw(static_cast<int>(wop) + 2) << r.operation
         << std::setw(8) << r.status << std::setw(9) << (std::to_string(passed) + "/" + std::to_string(r.checks.size()))
         << r.outputs_digest.substr(0, 16) << "\n";
  }
  text << rows.size() << " records, " << failed << " failing\n";
  out.text = text.str();
  const std::filesystem::path txt = dir / "report.txt";
  std::ofstream(txt) << out.text;
  out.files.push_back(txt.string());
  return out;
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    fail(ErrorKind::FormatError, "SHA-256 digest failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigError:
    case ErrorKind::RegionViolation:
    case ErrorKind::GammaMismatch:
    case ErrorKind::BadGridSpec:
    case ErrorKind::BadExponent:
    case ErrorKind::BasisTooSmall:
    case ErrorKind::CaseRangeViolation:
    case ErrorKind::TranslationForbidden:
    case ErrorKind::LedgerCorrupt:
    case ErrorKind::FormatError:
      return 2;
    case ErrorKind::OptimizerStall:
    case ErrorKind::RootFindFailure:
    case ErrorKind::DegenerateFit:
      return 3;
    default:
      return 4;
  }
}

}  // namespace ckn::experiment

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

// ckn: batch front-end. Every subcommand except `report` runs the
// experiments of one config file and appends a record per experiment to the
// ledger.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "ckn/exec.hpp"
#include "ckn/experiment.hpp"

namespace ex = ckn::experiment;

namespace {

struct Flags {
  std::string config;
  std::string ledger;
  std::string out;
  std::string profile = "fast";
  std::string filter;
  int threads = 0;
  std::uint64_t seed = 0;
};

std::string ledger_path(const Flags& flags) {
  if (!flags.ledger.empty()) return flags.ledger;
  if (const char* env = std::getenv("CKN_LEDGER"); env && *env) return env;
  return "ckn_ledger.jsonl";
}

void print_record(const ex::ResultRecord& r) {
  std::cout << r.id << "  " << r.operation << "  " << r.status << "  " << r.outputs_digest.substr(0, 16) << "\n";
  for (auto it = r.outputs["summary"].begin(); it != r.outputs["summary"].end(); ++it) {
    std::cout << "    " << it.key() << " = " << it.value().dump() << "\n";
  }
  for (const ex::Check& c : r.checks) {
    std::cout << "    [" << (c.pass ? "ok" : "FAIL") << "] " << c.name << " = " << c.value << " " << c.relation << " "
              << c.limit << "\n";
  }
}

int run_operation(const std::string& name, const Flags& flags, bool seed_given) {
  ex::RunOptions options;
  options.ledger_path = ledger_path(flags);
  options.out_dir = flags.out;
  options.profile = ex::parse_profile(flags.profile);
  options.expected_operation = name;
  if (seed_given) options.seed_override = flags.seed;
  const ex::SuiteConfig suite = ex::load_suite(flags.config);
  bool all_pass = true;
  for (const ex::ExperimentConfig& c : suite.experiments) {
    const ex::ResultRecord r = ex::run_experiment(c, options);
    print_record(r);
    all_pass = all_pass && r.passed();
  }
  return all_pass ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted Sobolev inequality experiments"};
  app.require_subcommand(1);
  Flags flags;

  std::vector<std::pair<std::string, CLI::App*>> subs;
  const std::map<std::string, std::string> help = {
      {"constants", "sharp constant: closed form, Rayleigh quotient and k-ratio law"},
      {"transform-check", "k-map q-norm and gradient identities"},
      {"project", "deficit and manifold distance of extremals"},
      {"stability-scan", "stability ratios over a perturbation family"},
      {"slope-fit", "deficit against distance exponent"},
      {"chain-check", "radial power-map monotonicity chain"},
      {"embedding-check", "embedding constants in a ball"},
      {"spectral-gap", "Hessian ratio on tangent-orthogonal probes"},
      {"thm5", "residual, Q and N scalings near the manifold"},
      {"alt-check", "residual against distance alternative"},
      {"ineq-const", "constants of the elementary vector inequalities"},
  };
  for (const std::string& name : ex::operations()) {
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", flags.config, "experiment or suite config (JSON)")->required()->check(CLI::ExistingFile);
    subs.emplace_back(name, sub);
  }
  CLI::App* report = app.add_subcommand("report", "summarise ledger records as CSV and text");
  report->add_option("--filter", flags.filter, "comma-separated key=value terms (id, module, operation, status, version)");

  for (auto& [name, sub] : subs) {
    sub->add_option("--seed", flags.seed, "override the config seed");
    sub->add_option("--tol-profile", flags.profile, "fast or strict")->check(CLI::IsMember({"fast", "strict"}));
    sub->add_option("--threads", flags.threads, "worker threads (0: runtime default)")->check(CLI::NonNegativeNumber);
  }
  for (auto& [name, sub] : subs) {
    sub->add_option("--ledger", flags.ledger, "ledger path (default: $CKN_LEDGER or ckn_ledger.jsonl)");
    sub->add_option("--out", flags.out, "directory for CSV side-products");
  }
  report->add_option("--ledger", flags.ledger, "ledger path (default: $CKN_LEDGER or ckn_ledger.jsonl)");
  report->add_option("--out", flags.out, "directory for report.csv and report.txt");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (flags.threads > 0) ckn::exec::set_threads(flags.threads);
    if (report->parsed()) {
      const ex::ReportOutput out = ex::report(ledger_path(flags), flags.filter, flags.out);
      std::cout << out.text;
      for (const std::string& f : out.files) std::cout << "wrote " << f << "\n";
      return 0;
    }
    for (auto& [name, sub] : subs) {
      if (sub->parsed()) return run_operation(name, flags, sub->count("--seed") > 0);
    }
  } catch (const ckn::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ex::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}

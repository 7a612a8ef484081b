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

// Acceptance runner: executes every config under configs/acceptance into a
// scratch ledger, prints one line per criterion, then re-runs the whole set
// and compares digests.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "ckn/experiment.hpp"

namespace fs = std::filesystem;
namespace ex = ckn::experiment;

namespace {

struct Digest {
  std::string id, inputs, outputs;
  bool operator==(const Digest&) const = default;
};

std::vector<fs::path> criterion_configs() {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(fs::path(CKN_SOURCE_DIR) / "configs" / "acceptance")) {
    if (entry.path().extension() == ".json") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string failing_checks(const std::vector<ex::ResultRecord>& records) {
  std::string out;
  for (const ex::ResultRecord& r : records) {
    for (const ex::Check& c : r.checks) {
      if (!c.pass) out += " " + r.id + ":" + c.name + "=" + std::to_string(c.value);
    }
  }
  return out;
}

std::vector<Digest> digests(const std::string& ledger) {
  std::vector<Digest> out;
  for (const ex::ResultRecord& r : ex::read_ledger(ledger)) out.push_back({r.id, r.inputs_digest, r.outputs_digest});
  return out;
}

}  // namespace

int main() {
  const fs::path scratch = fs::temp_directory_path() / ("ckn_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(scratch);
  const std::vector<fs::path> configs = criterion_configs();
  int failures = 0;

  auto run_all = [&](const std::string& ledger, bool report) {
    ex::RunOptions options;
    options.ledger_path = ledger;
    for (std::size_t i = 0; i < configs.size(); ++i) {
      const std::string name = configs[i].stem().string();
      const int criterion = std::stoi(name.substr(1, 2));
      const auto start = std::chrono::steady_clock::now();
      std::string line;
      bool pass = false;
      try {
        const std::vector<ex::ResultRecord> records = ex::run_suite(ex::load_suite(configs[i].string()), options);
        pass = std::all_of(records.begin(), records.end(), [](const ex::ResultRecord& r) { return r.passed(); });
        line = pass ? "" : failing_checks(records);
      } catch (const std::exception& e) {
        line = std::string(" error: ") + e.what();
      }
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (report) {
        std::printf("criterion %d: %s (%s, %.1f s)%s\n", criterion, pass ? "PASS" : "FAIL", name.c_str(), secs,
                    line.c_str());
        std::fflush(stdout);
        if (!pass) ++failures;
      }
    }
  };

  const std::string first = (scratch / "first.jsonl").string();
  const std::string second = (scratch / "second.jsonl").string();
  run_all(first, true);
  run_all(second, false);
  bool identical = false;
  std::size_t records = 0;
  try {
    const std::vector<Digest> a = digests(first), b = digests(second);
    records = a.size();
    identical = !a.empty() && a == b;
  } catch (const std::exception& e) {
    std::printf("criterion 10: ledger unreadable: %s\n", e.what());
  }
  std::printf("criterion 10: %s (%zu records, inputs and outputs digests %s)\n", identical ? "PASS" : "FAIL", records,
              identical ? "bit-identical" : "differ");
  if (!identical) ++failures;

  fs::remove_all(scratch);
  std::printf("%d of 10 criteria failing\n", failures);
  return failures == 0 ? 0 : 1;
}

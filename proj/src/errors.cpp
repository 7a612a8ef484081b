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

#include "ckn/errors.hpp"

namespace ckn {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::RegionViolation: return "RegionViolation";
    case ErrorKind::GammaMismatch: return "GammaMismatch";
    case ErrorKind::BadGridSpec: return "BadGridSpec";
    case ErrorKind::TranslationForbidden: return "TranslationForbidden";
    case ErrorKind::ZeroField: return "ZeroField";
    case ErrorKind::MissingGradient: return "MissingGradient";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::BadExponent: return "BadExponent";
    case ErrorKind::RootFindFailure: return "RootFindFailure";
    case ErrorKind::OptimizerStall: return "OptimizerStall";
    case ErrorKind::OnManifold: return "OnManifold";
    case ErrorKind::EmptyFamily: return "EmptyFamily";
    case ErrorKind::DegenerateFit: return "DegenerateFit";
    case ErrorKind::UnsupportedField: return "UnsupportedField";
    case ErrorKind::BasisTooSmall: return "BasisTooSmall";
    case ErrorKind::NotOrthogonal: return "NotOrthogonal";
    case ErrorKind::FarFromManifold: return "FarFromManifold";
    case ErrorKind::CaseRangeViolation: return "CaseRangeViolation";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::LedgerCorrupt: return "LedgerCorrupt";
    case ErrorKind::FormatError: return "FormatError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace ckn

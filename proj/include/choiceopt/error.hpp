// Copyright 2026 The choiceopt Authors
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

#ifndef CHOICEOPT_ERROR_HPP
#define CHOICEOPT_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace choiceopt {

enum class ErrorCode {
  NonPositiveBeta,
  InvariantError,
  SingularSystem,
  McBaseSystemDegenerate,
  NoSharedAttribute,
  A3Violated,
  DimensionMismatch,
  NumericalFailure,
  ConstructionFailed,
  NotOptimal,
  DegenerateShare,
  S3Infeasible,
  TooManyDims,
  SchemaError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveBeta: return "NonPositiveBeta";
    case ErrorCode::InvariantError: return "InvariantError";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::McBaseSystemDegenerate: return "McBaseSystemDegenerate";
    case ErrorCode::NoSharedAttribute: return "NoSharedAttribute";
    case ErrorCode::A3Violated: return "A3Violated";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::ConstructionFailed: return "ConstructionFailed";
    case ErrorCode::NotOptimal: return "NotOptimal";
    case ErrorCode::DegenerateShare: return "DegenerateShare";
    case ErrorCode::S3Infeasible: return "S3Infeasible";
    case ErrorCode::TooManyDims: return "TooManyDims";
    case ErrorCode::SchemaError: return "SchemaError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it onto an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace choiceopt

#endif  // CHOICEOPT_ERROR_HPP

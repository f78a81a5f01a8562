// Copyright 2026 The Stagg Authors. All Rights Reserved.
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

#include "stagg/error.hpp"

namespace stagg {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSyntaxError: return "SyntaxError";
    case ErrorCode::kUnboundTensor: return "UnboundTensor";
    case ErrorCode::kRankMismatch: return "RankMismatch";
    case ErrorCode::kInconsistentExtent: return "InconsistentExtent";
    case ErrorCode::kDivisionByZero: return "DivisionByZero";
    case ErrorCode::kEmptyCandidateSet: return "EmptyCandidateSet";
    case ErrorCode::kTooManyIndices: return "TooManyIndices";
    case ErrorCode::kInvalidDimensionList: return "InvalidDimensionList";
    case ErrorCode::kNotInLanguage: return "NotInLanguage";
    case ErrorCode::kZeroWeightClass: return "ZeroWeightClass";
    case ErrorCode::kNonConvergence: return "NonConvergence";
    case ErrorCode::kOracleFailure: return "OracleFailure";
    case ErrorCode::kOracleMiss: return "OracleMiss";
    case ErrorCode::kMissingField: return "MissingField";
    case ErrorCode::kMalformedDescriptor: return "MalformedDescriptor";
    case ErrorCode::kOracleMissing: return "OracleMissing";
    case ErrorCode::kNetworkError: return "NetworkError";
    case ErrorCode::kAuthError: return "AuthError";
    case ErrorCode::kRateLimited: return "RateLimited";
    case ErrorCode::kFixtureMissing: return "FixtureMissing";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace stagg

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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace stagg {

enum class ErrorCode {
  kSyntaxError,
  kUnboundTensor,
  kRankMismatch,
  kInconsistentExtent,
  kDivisionByZero,
  kEmptyCandidateSet,
  kTooManyIndices,
  kInvalidDimensionList,
  kNotInLanguage,
  kZeroWeightClass,
  kNonConvergence,
  kOracleFailure,
  kOracleMiss,
  kMissingField,
  kMalformedDescriptor,
  kOracleMissing,
  kNetworkError,
  kAuthError,
  kRateLimited,
  kFixtureMissing,
  kInvalidConfig,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, const std::string& message)
      : Error(ErrorCode::kSyntaxError,
              message + " at offset " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class RateLimitedError : public Error {
 public:
  RateLimitedError(const std::string& message, double retry_after_secs)
      : Error(ErrorCode::kRateLimited, message),
        retry_after_secs_(retry_after_secs) {}

  // Negative when the server gave no Retry-After header.
  double retry_after_secs() const noexcept { return retry_after_secs_; }

 private:
  double retry_after_secs_;
};

}  // namespace stagg

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

#include <filesystem>
#include <string>
#include <string_view>

namespace stagg {

enum class LlmBackend { kFixture, kLive };

inline constexpr std::string_view kDefaultRole =
    "You are a scientific assistant that knows a lot about transpilation";

struct LlmConfig {
  LlmBackend backend = LlmBackend::kFixture;
  std::filesystem::path fixture;

  std::string endpoint;  // full URL of the chat-completion route
  std::string model;
  // Name of the environment variable holding the key; the key itself is
  // never stored in the config.
  std::string api_key_env = "STAGG_LLM_API_KEY";
  double temperature = 1.0;
  std::string role{kDefaultRole};
  int timeout_secs = 120;

  // Live backend configured from STAGG_LLM_ENDPOINT and STAGG_LLM_MODEL.
  static LlmConfig live_from_env();
  // Throws InvalidConfig (FixtureMissing for an unset fixture path).
  void check() const;
};

// The fixed instruction text followed by the C source, verbatim.
std::string build_prompt(std::string_view c_source);

// Raw assistant text. Throws NetworkError, AuthError, RateLimited or
// FixtureMissing.
std::string fetch_candidates(std::string_view prompt, const LlmConfig& cfg);

// Wire helpers, exposed for tests.
std::string chat_request_body(std::string_view prompt, const LlmConfig& cfg);
std::string chat_response_text(std::string_view body);

}  // namespace stagg

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

#include "stagg/llm_client.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include "stagg/error.hpp"

namespace stagg {

using nlohmann::json;

namespace {

constexpr std::string_view kInstruction =
    "You are a scientific assistant that knows a lot about transpilation. "
    "Translate the following C code to an expression in the TACO tensor index "
    "notation. The expression must be valid as input to the taco compiler. "
    "Return a list with 10 possible expressions. Return the list and only the "
    "list, no explanations. \n";

constexpr int kAttempts = 2;

std::string env(const char* name) {
  const char* v = std::getenv(name);
  return v ? v : "";
}

}  // namespace

LlmConfig LlmConfig::live_from_env() {
  LlmConfig cfg;
  cfg.backend = LlmBackend::kLive;
  cfg.endpoint = env("STAGG_LLM_ENDPOINT");
  cfg.model = env("STAGG_LLM_MODEL");
  return cfg;
}

void LlmConfig::check() const {
  if (backend == LlmBackend::kFixture) {
    if (fixture.empty()) throw Error(ErrorCode::kFixtureMissing, "no fixture path configured");
    return;
  }
  if (endpoint.empty()) throw Error(ErrorCode::kInvalidConfig, "live backend needs an endpoint");
  if (env(api_key_env.c_str()).empty()) {
    throw Error(ErrorCode::kInvalidConfig, "live backend needs " + api_key_env + " set");
  }
}

std::string build_prompt(std::string_view c_source) {
  if (c_source.empty()) spdlog::warn("building a prompt for empty C source");
  std::string out(kInstruction);
  out += c_source;
  return out;
}

std::string chat_request_body(std::string_view prompt, const LlmConfig& cfg) {
  json body = {
      {"model", cfg.model},
      {"temperature", cfg.temperature},
      {"messages",
       json::array({{{"role", "system"}, {"content", cfg.role}},
                    {{"role", "user"}, {"content", std::string(prompt)}}})},
  };
  return body.dump();
}

std::string chat_response_text(std::string_view body) {
  try {
    json j = json::parse(body);
    const json& content = j.at("choices").at(0).at("message").at("content");
    return content.is_string() ? content.get<std::string>() : std::string();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kNetworkError, std::string("malformed completion: ") + e.what());
  }
}

namespace {

std::string read_fixture(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFixtureMissing, "cannot read fixture " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string post_once(std::string_view prompt, const LlmConfig& cfg) {
  auto scheme_end = cfg.endpoint.find("://");
  auto path_start = cfg.endpoint.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  std::string base = cfg.endpoint.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "/" : cfg.endpoint.substr(path_start);

  httplib::Client client(base);
  client.set_connection_timeout(cfg.timeout_secs);
  client.set_read_timeout(cfg.timeout_secs);
  httplib::Headers headers{{"Authorization", "Bearer " + env(cfg.api_key_env.c_str())}};
  auto res = client.Post(path, headers, chat_request_body(prompt, cfg), "application/json");
  if (!res) {
    throw Error(ErrorCode::kNetworkError,
                "request to " + base + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status == 401 || res->status == 403) {
    throw Error(ErrorCode::kAuthError, "endpoint rejected the API key (HTTP " +
                                           std::to_string(res->status) + ")");
  }
  if (res->status == 429) {
    double retry = -1.0;
    if (res->has_header("Retry-After")) {
      try {
        retry = std::stod(res->get_header_value("Retry-After"));
      } catch (const std::exception&) {
      }
    }
    throw RateLimitedError("rate limited by endpoint", retry);
  }
  if (res->status < 200 || res->status >= 300) {
    throw Error(ErrorCode::kNetworkError, "HTTP " + std::to_string(res->status));
  }
  return chat_response_text(res->body);
}

}  // namespace

std::string fetch_candidates(std::string_view prompt, const LlmConfig& cfg) {
  if (cfg.backend == LlmBackend::kFixture) {
    if (cfg.fixture.empty() || !std::filesystem::exists(cfg.fixture)) {
      throw Error(ErrorCode::kFixtureMissing, "fixture not found: " + cfg.fixture.string());
    }
    return read_fixture(cfg.fixture);
  }
  cfg.check();
  std::string text;
  for (int attempt = 0; attempt < kAttempts && text.empty(); ++attempt) {
    text = post_once(prompt, cfg);
    if (text.empty()) spdlog::warn("empty completion (attempt {})", attempt + 1);
  }
  return text;
}

}  // namespace stagg

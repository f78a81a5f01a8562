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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "stagg/candidates.hpp"
#include "stagg/llm_client.hpp"
#include "stagg/search.hpp"
#include "stagg/source_model.hpp"

namespace stagg {

enum class Method { kTopDown, kBottomUp };
enum class GrammarMode { kRefined, kFull };
enum class ProbabilityMode { kLearned, kUniform };
enum class LiftStatus { kSolved, kExhausted, kTimeout, kError };

std::string_view to_string(Method m);
std::string_view to_string(GrammarMode m);
std::string_view to_string(ProbabilityMode m);
std::string_view to_string(LiftStatus s);
// Throws InvalidConfig.
Method parse_method(std::string_view text);

struct LiftConfig {
  Method method = Method::kTopDown;
  GrammarMode grammar = GrammarMode::kRefined;
  ProbabilityMode probabilities = ProbabilityMode::kLearned;
  std::set<Penalty> dropped;
  std::size_t examples = 8;
  std::size_t trials = 64;
  std::uint64_t seed = 1;
  double timeout_secs = 3600.0;
  int max_depth = 6;
  bool default_weights = true;
  // Warn when subscripted writes in the source disagree with the declared
  // output rank.
  bool check_output_rank = false;
  // With the fixture backend and no fixture path, the benchmark's own
  // fixture is used.
  LlmConfig llm;

  // FNV-1a over the settings that affect results, as 16 hex digits.
  std::string fingerprint() const;
};

struct LiftReport {
  std::string name;
  Method method = Method::kTopDown;
  LiftStatus status = LiftStatus::kError;
  std::string expr;           // solved program
  std::string template_text;  // accepted template
  std::string message;        // error text
  double seconds = 0.0;
  std::size_t templates_enumerated = 0;
  std::size_t templates_validated = 0;
  std::size_t substitutions_tried = 0;
  std::string fingerprint;
  DimensionList dims;
};

// Runs the whole pipeline for one benchmark. Errors are reported through
// the status, never thrown.
LiftReport lift(const Benchmark& bench, const LiftConfig& config);

// Benchmarks are the subdirectories of `dir` holding a bench.json, taken in
// name order. Reports come back sorted by name, then by method order.
std::vector<LiftReport> run_suite(const std::filesystem::path& dir,
                                  const std::vector<Method>& methods,
                                  const LiftConfig& config, std::size_t jobs = 1);

// `timing` false writes every seconds field as 0 so output is byte-stable.
std::string to_csv(const std::vector<LiftReport>& reports, bool timing = true);

struct SuiteSummary {
  Method method = Method::kTopDown;
  std::size_t total = 0;
  std::size_t solved = 0;
  double percent = 0.0;
  double mean_seconds = 0.0;   // over solved
  double mean_attempts = 0.0;  // templates validated, over solved
};

std::vector<SuiteSummary> summarize(const std::vector<LiftReport>& reports);
std::string format_summary(const std::vector<SuiteSummary>& summary, bool timing = true);

// Solve times in increasing order with their running total, one row per
// solved benchmark: "method,solved,seconds,cumulative".
std::string cactus_csv(const std::vector<LiftReport>& reports);

}  // namespace stagg

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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stagg/rational.hpp"
#include "stagg/taco.hpp"
#include "stagg/tensor.hpp"

namespace stagg {

enum class ArgKind { kScalar, kTensor };

struct Argument {
  std::string name;
  ArgKind kind = ArgKind::kTensor;
  int rank = 0;  // 0 for scalars
};

struct OracleCase {
  Bindings inputs;
  TensorValue output;
};

// Either a ground-truth expression over the argument names, or literal
// input/output pairs.
struct Oracle {
  std::optional<TacoExpr> expr;
  std::vector<OracleCase> cases;

  bool embedded() const { return !expr.has_value(); }
};

struct Benchmark {
  std::string name;
  std::filesystem::path dir;
  std::string c_source;
  std::vector<Argument> args;
  std::string output_arg;
  std::vector<Rational> constants;
  Oracle oracle;
  // Raw model response used by the fixture backend.
  std::optional<std::filesystem::path> llm_fixture;

  const Argument* find_arg(std::string_view name) const;
};

// Reads `bench.json` and `source.c` from `dir`. Constants absent from the
// descriptor are extracted from the source. Throws MissingField,
// MalformedDescriptor or OracleMissing.
Benchmark load_benchmark(const std::filesystem::path& dir);

// Same, from descriptor text already in memory.
Benchmark parse_benchmark(std::string_view descriptor, std::string c_source,
                          const std::filesystem::path& dir = {});

// Numeric literals of executable statements, deduplicated in order of first
// appearance. Loop headers, subscripts, comments and preprocessor lines are
// skipped.
std::vector<Rational> extract_constants(std::string_view c_source);

// Declared rank of the output argument (0 for scalars).
int lhs_rank(const Benchmark& bench);

// Counts subscripts in textual writes to the output argument, e.g. 2 for
// `out[i][j] = ...`. nullopt when the source writes through pointers only or
// the writes disagree.
std::optional<int> textual_output_rank(const Benchmark& bench);

// lhs_rank, logging a warning when the textual count disagrees.
int lhs_rank_checked(const Benchmark& bench);

// Throws OracleMiss (embedded cases, unseen input) or evaluator errors.
TensorValue run_oracle(const Benchmark& bench, const Bindings& inputs);

}  // namespace stagg

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

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stagg/rational.hpp"
#include "stagg/source_model.hpp"
#include "stagg/taco.hpp"
#include "stagg/tensor.hpp"

namespace stagg {

struct Example {
  Bindings inputs;  // every argument, the output's initial contents included
  TensorValue output;
};

struct ExampleSet {
  std::vector<Example> cases;
};

struct ExampleOptions {
  // Extents are drawn without repetition, so one case never gives two
  // indices the same extent. Grown by one when an expression has more
  // indices than the pool has values.
  std::vector<std::size_t> extents{3, 4, 5};
  int min_value = -8;
  int max_value = 8;
};

// Throws OracleFailure when the oracle cannot produce outputs. Embedded
// oracles yield their stored cases (at most n).
ExampleSet generate_examples(const Benchmark& bench, std::size_t n, std::uint64_t seed,
                             const ExampleOptions& options = {});

struct Substitution {
  // Template symbol to argument name, RHS symbols in order of first
  // appearance. The LHS symbol always maps to the output argument.
  std::vector<std::pair<std::string, std::string>> tensors;
  // Value of each Const occurrence, in pre-order.
  std::vector<Rational> constants;

  std::string to_string() const;  // "<b->Mat1, c->Mat2>"
  bool operator==(const Substitution&) const = default;
};

// Lexicographic odometer over argument positions (declared order); the first
// symbol varies slowest, Const occurrences vary fastest. Scalars bind only
// to rank-0 symbols and tensors only to indexed ones.
class SubstitutionStream {
 public:
  SubstitutionStream(const TacoExpr& tmpl, const std::vector<Argument>& args,
                     std::vector<Rational> constants);
  std::optional<Substitution> next();

 private:
  std::vector<std::string> symbols_;
  std::vector<std::vector<std::string>> choices_;  // per symbol
  std::vector<Rational> constants_;
  std::size_t const_slots_ = 0;
  std::vector<std::size_t> digits_;
  bool done_ = false;
};

std::vector<Substitution> enumerate_substitutions(const TacoExpr& tmpl,
                                                  const std::vector<Argument>& args,
                                                  const std::vector<Rational>& constants);

// Concrete program for a template: symbols renamed, Const occurrences
// replaced by values.
TacoExpr instantiate(const TacoExpr& tmpl, const Substitution& s,
                     const std::string& output_arg);

// Exact comparison on every case; evaluator errors count as a mismatch.
bool matches_examples(const TacoExpr& program, const ExampleSet& examples);

using VerifyFn = std::function<bool(const TacoExpr& program, const Substitution& s)>;

struct Validated {
  Substitution substitution;
  TacoExpr program;
};

struct ValidationStats {
  std::size_t substitutions_tried = 0;
};

// First substitution in stream order that reproduces every example and that
// `verify` accepts (when given). An empty example set validates nothing.
std::optional<Validated> validate(
    const TacoExpr& tmpl, const ExampleSet& examples, const Benchmark& bench,
    const VerifyFn& verify = {}, ValidationStats* stats = nullptr,
    std::optional<std::chrono::steady_clock::time_point> deadline = std::nullopt);

struct VerifyOptions {
  std::size_t trials = 64;
  std::uint64_t seed = 0;
  std::vector<std::size_t> extents{6, 7, 8, 9};
};

// Compares the program with the oracle on fresh random inputs. Embedded
// oracles are checked against all their stored cases instead.
bool differential_verify(const TacoExpr& program, const Benchmark& bench,
                         const VerifyOptions& options = {});

}  // namespace stagg

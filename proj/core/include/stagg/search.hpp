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
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "stagg/candidates.hpp"
#include "stagg/grammar.hpp"
#include "stagg/taco.hpp"

namespace stagg {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Penalty { kA1, kA2, kA3, kA4, kA5, kB1, kB2 };

std::string_view to_string(Penalty p);

// "a1".."a5", "b1", "b2", or the group names "A" and "B". Throws
// InvalidConfig for anything else.
std::set<Penalty> parse_penalties(std::string_view id);

struct SearchNode {
  std::vector<RuleId> derivation;
  // Pending nonterminals; the leftmost one is at the back.
  std::vector<int> pending;
  double c = 0.0;
  double g = 0.0;
  double penalty = 0.0;
  std::uint64_t seq = 0;

  double f() const { return c + g + penalty; }
  bool complete() const { return pending.empty(); }
};

struct SearchContext {
  DimensionList dims;
  std::size_t op_count = 4;
  bool has_constant = false;
  int max_depth = 6;
  std::set<Penalty> dropped;

  std::optional<std::chrono::steady_clock::time_point> deadline;
  // Stop after this many templates were validated; 0 means no limit.
  std::size_t max_validations = 0;
  // Called for every popped node, before it is validated or expanded.
  std::function<void(const SearchNode&, const PartialTemplate&)> on_pop;

  static SearchContext for_grammar(const TemplateGrammar& g, DimensionList dims);
  bool active(Penalty p) const { return !dropped.count(p); }
  bool expired() const {
    return deadline && std::chrono::steady_clock::now() >= *deadline;
  }
};

// Syntactic facts about a (possibly partial) template.
struct FormFacts {
  // Tensor names in order of first appearance, LHS first.
  std::vector<std::string> letters;
  std::size_t constants = 0;
  // Accesses (LHS included) that use the index variable i.
  std::size_t accesses_with_i = 0;
  std::size_t op_occurrences = 0;
  std::set<BinaryOp> distinct_ops;
  // RHS operands that are fully known (chain forms count positions).
  std::size_t operands = 0;
  int depth = 0;
  bool too_many_indices = false;

  // Number of unique tensors plus constant occurrences, the length of the
  // template's own dimension list.
  std::size_t length() const { return letters.size() + constants; }
  bool alphabetical() const;
};

FormFacts analyze(const PartialTemplate& form);

// True when an ADD, SUB or DIV node has two identical accesses as operands.
bool repeats_operand(const TacoExpr& expr);

// `complete` is the finished template, if the form has no holes left.
double penalty_A(const FormFacts& facts, const std::optional<TacoExpr>& complete,
                 const SearchContext& ctx);
double penalty_B(const FormFacts& facts, const SearchContext& ctx);

double heuristic_td(const SearchNode& node, const CompletionTable& h);

// Sum over operand slots not yet placed of the cheapest rule for a slot of
// that rank.
double heuristic_bu(const SearchNode& node, const FormFacts& facts,
                    const TemplateGrammar& grammar, const CompletionTable& h,
                    const DimensionList& dims);

enum class SearchStatus { kFound, kExhausted, kTimeout };

std::string_view to_string(SearchStatus s);

struct SearchStats {
  std::size_t templates_enumerated = 0;  // nodes popped
  std::size_t templates_validated = 0;   // complete templates checked
  std::size_t nodes_pushed = 0;
};

// Checks a complete template against the benchmark and returns the
// instantiated program when some substitution validates and verifies.
using TemplateCheck = std::function<std::optional<TacoExpr>(const TacoExpr&)>;

struct SearchResult {
  SearchStatus status = SearchStatus::kExhausted;
  std::optional<TacoExpr> template_expr;
  std::optional<TacoExpr> program;
  double cost = 0.0;  // c of the accepted template
  SearchStats stats;
};

// Grammar must be normalized.
SearchResult enumerate_td(const TemplateGrammar& grammar, const SearchContext& ctx,
                          const TemplateCheck& check);
SearchResult enumerate_bu(const TemplateGrammar& grammar, const SearchContext& ctx,
                          const TemplateCheck& check);

}  // namespace stagg

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
#include <string>
#include <string_view>
#include <vector>

#include "stagg/taco.hpp"

namespace stagg {

inline constexpr const char* kCanonicalIndices[] = {"i", "j", "k", "l"};

// A candidate with symbolic tensor names a, b, c, ... (by first appearance,
// LHS first), canonical index names and every literal replaced by Const.
struct Template {
  TacoExpr expr;
  std::size_t provenance = 0;  // position of the source candidate
};

struct TemplateSet {
  std::vector<Template> templates;
  // Size of the union of index variables over all templates.
  std::size_t unique_index_count = 0;

  static TemplateSet from(std::vector<Template> templates);
  bool empty() const { return templates.empty(); }
  std::size_t size() const { return templates.size(); }
};

// Ranks of the unique operands of a template, LHS first. Scalars and each
// Const occurrence contribute 0.
struct DimensionList {
  std::vector<int> ranks;

  std::size_t size() const { return ranks.size(); }
  int operator[](std::size_t i) const { return ranks[i]; }
  bool operator==(const DimensionList&) const = default;
  std::string to_string() const;  // "[1,2,1]"
};

// One candidate per line of raw model output: list markers and code fences
// are stripped, `:=` becomes `=`, unparseable lines are dropped. Throws
// EmptyCandidateSet when nothing parses.
std::vector<std::string> normalize_response(std::string_view raw);

// Throws TooManyIndices for more than four distinct index variables.
Template templatize(const TacoExpr& expr, std::size_t provenance = 0);

// Parses and templatizes normalized candidates. Candidates needing more
// than four index variables are discarded. Duplicates are kept.
TemplateSet build_template_set(const std::vector<std::string>& candidates);

DimensionList dimension_list(const Template& t);

// Keeps the longest per-candidate dimension lists, returns the most frequent
// one (earliest wins ties) with its first entry replaced by `lhs_rank`.
DimensionList predict_dimensions(const TemplateSet& templates, int lhs_rank);

}  // namespace stagg

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
#include <map>
#include <string>

#include "stagg/taco.hpp"
#include "stagg/tensor.hpp"

namespace stagg {

// Extent bound to each index variable of an expression.
using IndexRanges = std::map<std::string, std::size_t>;

// Binds every index variable to an extent using the accesses of `expr`
// whose tensors are bound. The LHS tensor is optional in `bindings`; when
// present its extents participate like any other access.
// Throws UnboundTensor, RankMismatch or InconsistentExtent.
IndexRanges infer_index_ranges(const TacoExpr& expr, const Bindings& bindings);

// Evaluates `expr` with einsum semantics and exact arithmetic and returns the
// LHS tensor. An index that does not appear on the LHS is summed over the
// smallest subexpression that contains all of its occurrences, so
// `a(i) = b(i) + c(i,j)` means b(i) + sum_j c(i,j).
//
// Throws UnboundTensor, RankMismatch, InconsistentExtent or DivisionByZero.
TensorValue evaluate(const TacoExpr& expr, const Bindings& bindings);

}  // namespace stagg

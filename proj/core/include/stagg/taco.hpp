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
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "stagg/rational.hpp"

namespace stagg {

inline constexpr std::size_t kMaxRank = 4;

enum class BinaryOp { kAdd, kSub, kMul, kDiv };

inline constexpr BinaryOp kAllBinaryOps[] = {BinaryOp::kAdd, BinaryOp::kSub,
                                              BinaryOp::kMul, BinaryOp::kDiv};

char op_symbol(BinaryOp op);
std::string_view op_name(BinaryOp op);  // ADD, SUB, MUL, DIV

struct TensorAccess {
  std::string name;
  // Empty for scalars. Index names are free-form identifiers until a
  // candidate is templatized onto the canonical set {i, j, k, l}.
  std::vector<std::string> indices;

  std::size_t rank() const { return indices.size(); }
  bool operator==(const TensorAccess&) const = default;
};

std::string render_access(const TensorAccess& access);

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Constant {
  std::optional<Rational> value;  // nullopt is the template symbol Const
  bool is_symbolic() const { return !value.has_value(); }
};

struct Negation {
  NodePtr operand;
};

struct Binary {
  BinaryOp op;
  NodePtr lhs;
  NodePtr rhs;
};

struct Parenthesized {
  NodePtr inner;
};

struct Node {
  std::variant<TensorAccess, Constant, Negation, Binary, Parenthesized> value;

  template <typename T>
  const T* as() const {
    return std::get_if<T>(&value);
  }
};

NodePtr make_access(std::string name, std::vector<std::string> indices = {});
NodePtr make_constant(Rational value);
NodePtr make_symbolic_constant();
NodePtr make_negation(NodePtr operand);
NodePtr make_binary(BinaryOp op, NodePtr lhs, NodePtr rhs);
NodePtr make_parenthesized(NodePtr inner);

// An assignment `lhs = rhs` in TACO index notation.
struct TacoExpr {
  TensorAccess lhs;
  NodePtr rhs;
};

bool structurally_equal(const Node& a, const Node& b);
bool operator==(const TacoExpr& a, const TacoExpr& b);

// Accepts `:=` as a synonym for `=`. Throws SyntaxError.
TacoExpr parse_expression(std::string_view text);

// Canonical spacing: "a(i) = b(i,j) * c(j)". Explicit Parenthesized nodes
// are kept; parentheses required by precedence are inserted where the tree
// has none, so the output always reparses to the same tree modulo grouping
// nodes.
std::string render(const TacoExpr& expr);
std::string render(const Node& node);

// Leaves have depth 1; index lists do not count; grouping is transparent.
int expr_depth(const Node& node);
int expr_depth(const TacoExpr& expr);

NodePtr strip_parens(const NodePtr& node);

// Pre-order visit of every node in the right-hand side.
void visit(const Node& node, const std::function<void(const Node&)>& fn);

// Accesses in left-to-right order, LHS first.
std::vector<TensorAccess> accesses(const TacoExpr& expr);

}  // namespace stagg

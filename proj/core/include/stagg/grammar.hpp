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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stagg/candidates.hpp"
#include "stagg/taco.hpp"

namespace stagg {

enum class GrammarKind {
  kTopDown,   // refined, binary EXPR expansion
  kBottomUp,  // refined, right-linear TAIL chain
  kFull,      // unrefined TACO grammar, tree shaped
  kFullChain  // unrefined TACO grammar, right-linear chain
};

bool is_chain(GrammarKind kind);
std::string_view to_string(GrammarKind kind);

struct Symbol {
  bool terminal = false;
  int id = 0;
  bool operator==(const Symbol&) const = default;
};

// What a rule contributes to the template being built. Every production is
// tagged so a derivation can be replayed into an expression tree.
enum class RuleAction {
  kProgram,        // PROGRAM ::= TENSOR1 "=" EXPR
  kLeaf,           // TENSOR ::= "b(i,j)" | "b" | "Const"
  kPass,           // EXPR ::= TENSOR | CONSTANT
  kBinary,         // EXPR ::= EXPR OP EXPR
  kNegate,         // EXPR ::= "-" EXPR
  kOperator,       // OP ::= "+"
  kChainStart,     // EXPR ::= TENSOR2 TAIL1
  kChainEnd,       // TAILk ::= EOL
  kChainExtend,    // TAILk ::= OP TENSORk+2 TAILk+1
  kBareTensor,     // TENSOR ::= IDENTIFIER
  kIndexedTensor,  // TENSOR ::= IDENTIFIER "(" INDEX-EXPR ")"
  kIdentifier,     // IDENTIFIER ::= "b"
  kIndexLast,      // INDEX-EXPR ::= INDEX-VAR
  kIndexCons,      // INDEX-EXPR ::= INDEX-VAR "," INDEX-EXPR
  kIndexVar,       // INDEX-VAR ::= "i"
};

struct ProductionRule {
  int lhs = 0;
  std::vector<Symbol> rhs;
  RuleAction action = RuleAction::kLeaf;

  // kLeaf: either a tensor access or the Const symbol.
  std::optional<TensorAccess> access;
  bool constant = false;
  // kOperator.
  BinaryOp op = BinaryOp::kAdd;
  // kIdentifier, kIndexVar.
  std::string name;

  double weight = 1.0;
  double probability = 0.0;  // meaningful once the grammar is normalized
};

using RuleId = int;

class TemplateGrammar {
 public:
  TemplateGrammar() = default;
  explicit TemplateGrammar(GrammarKind kind) : kind_(kind) {}

  GrammarKind kind() const { return kind_; }

  int add_nonterminal(std::string name);
  int add_terminal(std::string text);
  RuleId add_rule(ProductionRule rule);
  void set_start(int nonterminal) { start_ = nonterminal; }

  int start() const { return start_; }
  // -1 when absent.
  int find_nonterminal(std::string_view name) const;
  const std::string& nonterminal_name(int id) const { return nonterminals_[id]; }
  const std::string& terminal_text(int id) const { return terminals_[id]; }
  std::size_t nonterminal_count() const { return nonterminals_.size(); }

  const std::vector<ProductionRule>& rules() const { return rules_; }
  std::vector<ProductionRule>& mutable_rules() { return rules_; }
  const ProductionRule& rule(RuleId id) const { return rules_[id]; }
  const std::vector<RuleId>& rules_for(int nonterminal) const {
    return by_lhs_[nonterminal];
  }

  // Number of OP alternatives.
  std::size_t operator_count() const;
  bool has_constant() const;

  // Positional operand nonterminals TENSOR2..TENSOR|L| of a bottom-up grammar
  // with the rank predicted for each; empty for other kinds.
  struct OperandSlot {
    int nonterminal;
    int rank;
  };
  const std::vector<OperandSlot>& operand_slots() const { return slots_; }
  void add_operand_slot(OperandSlot slot) { slots_.push_back(slot); }

  // Operand nonterminal of an unrefined chain grammar; -1 otherwise.
  int chain_operand() const { return chain_operand_; }
  void set_chain_operand(int nt) { chain_operand_ = nt; }

  // Templates that learn_weights could not derive.
  std::size_t skipped_templates = 0;
  bool normalized = false;

  // One rule per line: `NT ::= rhs  [w=..., p=...]`.
  std::string dump() const;
  std::string render_rule(RuleId id) const;

 private:
  GrammarKind kind_ = GrammarKind::kTopDown;
  std::vector<std::string> nonterminals_;
  std::vector<std::string> terminals_;
  std::vector<ProductionRule> rules_;
  std::vector<std::vector<RuleId>> by_lhs_;
  std::vector<OperandSlot> slots_;
  int start_ = 0;
  int chain_operand_ = -1;
};

// Leftmost derivation: rule ids in the order they are applied.
struct Derivation {
  std::vector<RuleId> rules;
};

// Throws InvalidDimensionList when |L| < 2 or a rank exceeds 4.
TemplateGrammar generate_td_grammar(const DimensionList& dims,
                                    const TemplateSet& templates);
TemplateGrammar generate_bu_grammar(const DimensionList& dims,
                                    const TemplateSet& templates);

// The unrefined grammar over tensor ids a..f and indices i..l.
TemplateGrammar generate_full_grammar(bool chain);

// Throws NotInLanguage.
Derivation derive_leftmost(const TemplateGrammar& grammar, const Template& t);

struct WeightOptions {
  // Rules never used by a derivation get weight 1 instead of 0.
  bool default_weight = true;
};

TemplateGrammar learn_weights(TemplateGrammar grammar,
                              const TemplateSet& templates,
                              WeightOptions options = {});
TemplateGrammar uniform_weights(TemplateGrammar grammar);

// Throws ZeroWeightClass when every rule of some nonterminal weighs 0.
TemplateGrammar normalize(TemplateGrammar grammar);

// h(X): the highest probability of deriving any terminal string from X.
class CompletionTable {
 public:
  explicit CompletionTable(std::vector<double> values)
      : values_(std::move(values)) {}
  double operator[](int nonterminal) const { return values_[nonterminal]; }
  double at(const TemplateGrammar& g, std::string_view name) const;
  std::size_t iterations = 0;

 private:
  std::vector<double> values_;
};

// Monotone fixed-point iteration from h = 0. Throws NonConvergence after
// 10,000 sweeps.
CompletionTable completion_table(const TemplateGrammar& grammar);

// --- Replaying derivation prefixes -----------------------------------------

// Structure of a (possibly partial) template. Holes stand for nonterminals
// that are still pending.
struct FormNode {
  enum class Kind { kHole, kAccess, kConstant, kNegate, kBinary, kChain };
  Kind kind = Kind::kHole;
  int hole = -1;                    // kHole: nonterminal id
  TensorAccess access;              // kAccess; empty name while unknown
  bool access_complete = true;      // kAccess: name and indices fixed
  std::optional<BinaryOp> op;       // kBinary: nullopt while OP pending
  std::vector<FormNode> children;   // kNegate: 1, kBinary: 2, kChain: operands
  std::vector<std::optional<BinaryOp>> chain_ops;  // kChain: between operands
  int chain_tail = -1;              // kChain: pending TAIL nonterminal or -1
};

struct PartialTemplate {
  FormNode lhs;
  FormNode rhs;
  bool complete = false;  // no nonterminal left
};

PartialTemplate replay(const TemplateGrammar& grammar,
                       std::span<const RuleId> derivation);

// Expression for a form with no holes other than a pending chain tail,
// which is dropped. nullopt otherwise.
std::optional<TacoExpr> form_to_expr(const PartialTemplate& form);

}  // namespace stagg

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

#include "stagg/grammar.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "stagg/error.hpp"

namespace stagg {

bool is_chain(GrammarKind kind) {
  return kind == GrammarKind::kBottomUp || kind == GrammarKind::kFullChain;
}

std::string_view to_string(GrammarKind kind) {
  switch (kind) {
    case GrammarKind::kTopDown: return "td";
    case GrammarKind::kBottomUp: return "bu";
    case GrammarKind::kFull: return "full";
    case GrammarKind::kFullChain: return "full-chain";
  }
  return "?";
}

// --- TemplateGrammar --------------------------------------------------------

int TemplateGrammar::add_nonterminal(std::string name) {
  nonterminals_.push_back(std::move(name));
  by_lhs_.emplace_back();
  return static_cast<int>(nonterminals_.size()) - 1;
}

int TemplateGrammar::add_terminal(std::string text) {
  auto it = std::find(terminals_.begin(), terminals_.end(), text);
  if (it != terminals_.end()) return static_cast<int>(it - terminals_.begin());
  terminals_.push_back(std::move(text));
  return static_cast<int>(terminals_.size()) - 1;
}

RuleId TemplateGrammar::add_rule(ProductionRule rule) {
  RuleId id = static_cast<RuleId>(rules_.size());
  by_lhs_[rule.lhs].push_back(id);
  rules_.push_back(std::move(rule));
  return id;
}

int TemplateGrammar::find_nonterminal(std::string_view name) const {
  auto it = std::find(nonterminals_.begin(), nonterminals_.end(), name);
  return it == nonterminals_.end() ? -1
                                   : static_cast<int>(it - nonterminals_.begin());
}

std::size_t TemplateGrammar::operator_count() const {
  return std::count_if(rules_.begin(), rules_.end(), [](const ProductionRule& r) {
    return r.action == RuleAction::kOperator;
  });
}

bool TemplateGrammar::has_constant() const {
  return std::any_of(rules_.begin(), rules_.end(),
                     [](const ProductionRule& r) { return r.constant; });
}

std::string TemplateGrammar::render_rule(RuleId id) const {
  const ProductionRule& r = rules_[id];
  std::string out = nonterminals_[r.lhs] + " ::=";
  for (const Symbol& s : r.rhs) {
    out += ' ';
    if (!s.terminal) {
      out += nonterminals_[s.id];
    } else if (terminals_[s.id].empty()) {
      out += "EOL";
    } else {
      out += '"' + terminals_[s.id] + '"';
    }
  }
  return out;
}

std::string TemplateGrammar::dump() const {
  std::ostringstream os;
  for (RuleId id = 0; id < static_cast<RuleId>(rules_.size()); ++id) {
    os << render_rule(id) << "  [w=" << rules_[id].weight
       << ", p=" << rules_[id].probability << "]\n";
  }
  return os.str();
}

double CompletionTable::at(const TemplateGrammar& g, std::string_view name) const {
  int nt = g.find_nonterminal(name);
  if (nt < 0) throw std::out_of_range("no nonterminal " + std::string(name));
  return values_[nt];
}

// --- Generation -------------------------------------------------------------

namespace {

void check_dims(const DimensionList& dims) {
  if (dims.size() < 2) {
    throw Error(ErrorCode::kInvalidDimensionList,
                "dimension list " + dims.to_string() + " has fewer than 2 entries");
  }
  for (int r : dims.ranks) {
    if (r < 0 || r > static_cast<int>(kMaxRank)) {
      throw Error(ErrorCode::kInvalidDimensionList,
                  "rank " + std::to_string(r) + " outside 0..4 in " +
                      dims.to_string());
    }
  }
}

std::vector<int> repetition_pattern(const std::vector<std::string>& indices) {
  std::vector<int> pattern;
  std::vector<std::string> seen;
  for (const auto& idx : indices) {
    auto it = std::find(seen.begin(), seen.end(), idx);
    if (it == seen.end()) {
      pattern.push_back(static_cast<int>(seen.size()));
      seen.push_back(idx);
    } else {
      pattern.push_back(static_cast<int>(it - seen.begin()));
    }
  }
  return pattern;
}

bool has_repeat(const std::vector<std::string>& indices) {
  std::set<std::string> s(indices.begin(), indices.end());
  return s.size() != indices.size();
}

// Every way of filling `rank` positions from the first `pool` canonical
// indices, in lexicographic order.
std::vector<std::vector<std::string>> arrangements(int pool, int rank) {
  std::vector<std::vector<std::string>> out;
  std::vector<int> digits(rank, 0);
  while (true) {
    std::vector<std::string> a;
    for (int d : digits) a.push_back(kCanonicalIndices[d]);
    out.push_back(std::move(a));
    int pos = rank - 1;
    while (pos >= 0 && digits[pos] == pool - 1) digits[pos--] = 0;
    if (pos < 0) break;
    ++digits[pos];
  }
  return out;
}

TensorAccess canonical_access(char letter, int rank) {
  TensorAccess a{std::string(1, letter), {}};
  for (int d = 0; d < rank; ++d) a.indices.push_back(kCanonicalIndices[d]);
  return a;
}

// Facts about a template set that shape the refined grammars.
struct TemplateFacts {
  std::set<std::vector<int>> repeated_patterns;
  bool uses_constant = false;
  bool uses_negation = false;
  std::vector<TensorAccess> rhs_accesses;  // first-seen order, unique
};

TemplateFacts collect_facts(const TemplateSet& templates) {
  TemplateFacts facts;
  for (const auto& t : templates.templates) {
    for (const auto& a : accesses(t.expr)) {
      if (has_repeat(a.indices)) facts.repeated_patterns.insert(repetition_pattern(a.indices));
    }
    visit(*t.expr.rhs, [&](const Node& n) {
      if (auto* a = n.as<TensorAccess>()) {
        if (std::find(facts.rhs_accesses.begin(), facts.rhs_accesses.end(), *a) ==
            facts.rhs_accesses.end()) {
          facts.rhs_accesses.push_back(*a);
        }
      } else if (n.as<Constant>()) {
        facts.uses_constant = true;
      } else if (n.as<Negation>()) {
        facts.uses_negation = true;
      }
    });
  }
  return facts;
}

// Number of canonical indices tensor rules may draw from.
int index_pool(const DimensionList& dims, const TemplateSet& templates) {
  int widest = *std::max_element(dims.ranks.begin(), dims.ranks.end());
  int pool = std::max(static_cast<int>(templates.unique_index_count), widest);
  return std::min(pool, static_cast<int>(kMaxRank));
}

// Accesses a refined grammar offers for operand slot `slot` (0-based position
// in the dimension list, slot >= 1). Earlier rank-0 slots may have been
// constants, which take no tensor letter, so the slot's letter can shift back
// by one per such slot.
std::vector<TensorAccess> slot_accesses(const DimensionList& dims, std::size_t slot,
                                        int pool, const TemplateFacts& facts) {
  int rank = dims[slot];
  std::size_t zeros_before = 0;
  for (std::size_t p = 1; p < slot; ++p) zeros_before += dims[p] == 0;
  std::vector<TensorAccess> out;
  for (std::size_t letter = slot - zeros_before; letter <= slot; ++letter) {
    char name = static_cast<char>('a' + letter);
    if (rank == 0) {
      out.push_back(TensorAccess{std::string(1, name), {}});
      continue;
    }
    for (auto& idx : arrangements(pool, rank)) {
      if (has_repeat(idx) && !facts.repeated_patterns.count(repetition_pattern(idx))) {
        continue;
      }
      out.push_back(TensorAccess{std::string(1, name), std::move(idx)});
    }
  }
  return out;
}

Symbol nt(int id) { return Symbol{false, id}; }
Symbol term(int id) { return Symbol{true, id}; }

class RuleAdder {
 public:
  explicit RuleAdder(TemplateGrammar& g) : g_(g) {}

  void leaf(int lhs, const TensorAccess& access) {
    auto& seen = leaves_[lhs];
    if (std::find(seen.begin(), seen.end(), access) != seen.end()) return;
    seen.push_back(access);
    ProductionRule r;
    r.lhs = lhs;
    r.rhs = {term(g_.add_terminal(render_access(access)))};
    r.action = RuleAction::kLeaf;
    r.access = access;
    g_.add_rule(std::move(r));
  }

  void constant(int lhs) {
    if (!const_done_.insert(lhs).second) return;
    ProductionRule r;
    r.lhs = lhs;
    r.rhs = {term(g_.add_terminal("Const"))};
    r.action = RuleAction::kLeaf;
    r.constant = true;
    g_.add_rule(std::move(r));
  }

  void rule(int lhs, std::vector<Symbol> rhs, RuleAction action) {
    ProductionRule r;
    r.lhs = lhs;
    r.rhs = std::move(rhs);
    r.action = action;
    g_.add_rule(std::move(r));
  }

  void operators(int lhs) {
    for (BinaryOp op : kAllBinaryOps) {
      ProductionRule r;
      r.lhs = lhs;
      r.rhs = {term(g_.add_terminal(std::string(1, op_symbol(op))))};
      r.action = RuleAction::kOperator;
      r.op = op;
      g_.add_rule(std::move(r));
    }
  }

 private:
  TemplateGrammar& g_;
  std::map<int, std::vector<TensorAccess>> leaves_;
  std::set<int> const_done_;
};

struct Chain {
  std::vector<NodePtr> operands;
  std::vector<BinaryOp> ops;
};

// Operands and operators of an expression that reads the same without any
// parentheses, i.e. a flat chain under the usual precedence rules.
std::optional<Chain> flatten_chain(const TacoExpr& expr) {
  NodePtr stripped = strip_parens(expr.rhs);
  Chain chain;
  bool flat = true;
  std::function<void(const NodePtr&)> walk = [&](const NodePtr& n) {
    if (auto* b = n->as<Binary>()) {
      walk(b->lhs);
      chain.ops.push_back(b->op);
      walk(b->rhs);
    } else if (n->as<Negation>()) {
      flat = false;
    } else {
      chain.operands.push_back(n);
    }
  };
  walk(stripped);
  if (!flat) return std::nullopt;
  std::string text = "x = ";
  for (std::size_t i = 0; i < chain.operands.size(); ++i) {
    if (i) {
      text += ' ';
      text += op_symbol(chain.ops[i - 1]);
      text += ' ';
    }
    text += render(*chain.operands[i]);
  }
  if (!structurally_equal(*parse_expression(text).rhs, *stripped)) return std::nullopt;
  return chain;
}

}  // namespace

TemplateGrammar generate_td_grammar(const DimensionList& dims,
                                    const TemplateSet& templates) {
  check_dims(dims);
  TemplateFacts facts = collect_facts(templates);
  int pool = index_pool(dims, templates);

  TemplateGrammar g(GrammarKind::kTopDown);
  RuleAdder add(g);
  int program = g.add_nonterminal("PROGRAM");
  int tensor1 = g.add_nonterminal("TENSOR1");
  int expr = g.add_nonterminal("EXPR");
  int op = g.add_nonterminal("OP");
  int tensor = g.add_nonterminal("TENSOR");
  g.set_start(program);

  bool rank0_slot = std::find(dims.ranks.begin() + 1, dims.ranks.end(), 0) !=
                    dims.ranks.end();
  bool with_constant = rank0_slot || facts.uses_constant;
  int constant = with_constant ? g.add_nonterminal("CONSTANT") : -1;

  add.rule(program, {nt(tensor1), term(g.add_terminal("=")), nt(expr)},
           RuleAction::kProgram);
  add.leaf(tensor1, canonical_access('a', dims[0]));
  add.rule(expr, {nt(tensor)}, RuleAction::kPass);
  if (with_constant) add.rule(expr, {nt(constant)}, RuleAction::kPass);
  add.rule(expr, {nt(expr), nt(op), nt(expr)}, RuleAction::kBinary);
  if (facts.uses_negation) {
    add.rule(expr, {term(g.add_terminal("-")), nt(expr)}, RuleAction::kNegate);
  }
  add.operators(op);
  for (std::size_t slot = 1; slot < dims.size(); ++slot) {
    for (const auto& a : slot_accesses(dims, slot, pool, facts)) add.leaf(tensor, a);
  }
  for (const auto& a : facts.rhs_accesses) add.leaf(tensor, a);
  if (with_constant) add.constant(constant);
  return g;
}

TemplateGrammar generate_bu_grammar(const DimensionList& dims,
                                    const TemplateSet& templates) {
  check_dims(dims);
  TemplateFacts facts = collect_facts(templates);
  int pool = index_pool(dims, templates);
  const std::size_t n = dims.size();

  TemplateGrammar g(GrammarKind::kBottomUp);
  RuleAdder add(g);
  int program = g.add_nonterminal("PROGRAM");
  int tensor1 = g.add_nonterminal("TENSOR1");
  int expr = g.add_nonterminal("EXPR");
  std::vector<int> tails;  // tails[k] is TAIL(k+1)
  for (std::size_t k = 1; k < n; ++k) tails.push_back(g.add_nonterminal("TAIL" + std::to_string(k)));
  int op = g.add_nonterminal("OP");
  std::vector<int> operands;  // operands[s] is TENSOR(s+2)
  for (std::size_t s = 1; s < n; ++s) {
    operands.push_back(g.add_nonterminal("TENSOR" + std::to_string(s + 1)));
    g.add_operand_slot({operands.back(), dims[s]});
  }
  g.set_start(program);
  int eol = g.add_terminal("");

  add.rule(program, {nt(tensor1), term(g.add_terminal("=")), nt(expr)},
           RuleAction::kProgram);
  add.leaf(tensor1, canonical_access('a', dims[0]));
  add.rule(expr, {nt(operands[0]), nt(tails[0])}, RuleAction::kChainStart);
  for (std::size_t k = 1; k < n; ++k) {
    int tail = tails[k - 1];
    add.rule(tail, {term(eol)}, RuleAction::kChainEnd);
    if (n > k + 1) {
      add.rule(tail, {nt(op), nt(operands[k]), nt(tails[k])}, RuleAction::kChainExtend);
    }
  }
  add.operators(op);
  for (std::size_t slot = 1; slot < n; ++slot) {
    int target = operands[slot - 1];
    for (const auto& a : slot_accesses(dims, slot, pool, facts)) add.leaf(target, a);
    if (dims[slot] == 0) add.constant(target);
  }
  for (const auto& t : templates.templates) {
    auto chain = flatten_chain(t.expr);
    if (!chain) continue;
    for (std::size_t k = 0; k < chain->operands.size() && k < operands.size(); ++k) {
      const Node& leaf = *chain->operands[k];
      if (auto* a = leaf.as<TensorAccess>()) {
        add.leaf(operands[k], *a);
      } else if (leaf.as<Constant>()) {
        add.constant(operands[k]);
      }
    }
  }
  return g;
}

TemplateGrammar generate_full_grammar(bool chain) {
  TemplateGrammar g(chain ? GrammarKind::kFullChain : GrammarKind::kFull);
  RuleAdder add(g);
  int program = g.add_nonterminal("PROGRAM");
  int expr = g.add_nonterminal("EXPR");
  int term_nt = chain ? g.add_nonterminal("TERM") : -1;
  int tail = chain ? g.add_nonterminal("TAIL") : -1;
  int op = g.add_nonterminal("OP");
  int tensor = g.add_nonterminal("TENSOR");
  int index_expr = g.add_nonterminal("INDEX-EXPR");
  int index_var = g.add_nonterminal("INDEX-VAR");
  int identifier = g.add_nonterminal("IDENTIFIER");
  int constant = g.add_nonterminal("CONSTANT");
  g.set_start(program);

  add.rule(program, {nt(tensor), term(g.add_terminal("=")), nt(expr)},
           RuleAction::kProgram);
  if (chain) {
    g.set_chain_operand(term_nt);
    add.rule(expr, {nt(term_nt), nt(tail)}, RuleAction::kChainStart);
    add.rule(tail, {term(g.add_terminal(""))}, RuleAction::kChainEnd);
    add.rule(tail, {nt(op), nt(term_nt), nt(tail)}, RuleAction::kChainExtend);
    add.rule(term_nt, {nt(tensor)}, RuleAction::kPass);
    add.rule(term_nt, {nt(constant)}, RuleAction::kPass);
  } else {
    add.rule(expr, {nt(tensor)}, RuleAction::kPass);
    add.rule(expr, {nt(constant)}, RuleAction::kPass);
    add.rule(expr, {term(g.add_terminal("-")), nt(expr)}, RuleAction::kNegate);
    add.rule(expr, {nt(expr), nt(op), nt(expr)}, RuleAction::kBinary);
  }
  add.operators(op);
  add.rule(tensor, {nt(identifier)}, RuleAction::kBareTensor);
  add.rule(tensor,
           {nt(identifier), term(g.add_terminal("(")), nt(index_expr),
            term(g.add_terminal(")"))},
           RuleAction::kIndexedTensor);
  add.rule(index_expr, {nt(index_var)}, RuleAction::kIndexLast);
  add.rule(index_expr, {nt(index_var), term(g.add_terminal(",")), nt(index_expr)},
           RuleAction::kIndexCons);
  for (const char* idx : kCanonicalIndices) {
    ProductionRule r;
    r.lhs = index_var;
    r.rhs = {term(g.add_terminal(idx))};
    r.action = RuleAction::kIndexVar;
    r.name = idx;
    g.add_rule(std::move(r));
  }
  for (char c = 'a'; c <= 'f'; ++c) {
    ProductionRule r;
    r.lhs = identifier;
    r.rhs = {term(g.add_terminal(std::string(1, c)))};
    r.action = RuleAction::kIdentifier;
    r.name = std::string(1, c);
    g.add_rule(std::move(r));
  }
  add.constant(constant);
  return g;
}

// --- Derivation -------------------------------------------------------------

namespace {

class Deriver {
 public:
  explicit Deriver(const TemplateGrammar& g) : g_(g) {}

  std::vector<RuleId> run(const Template& t) {
    const int start = g_.start();
    for (RuleId r : g_.rules_for(start)) {
      const ProductionRule& rule = g_.rule(r);
      if (rule.action != RuleAction::kProgram) continue;
      out_.push_back(r);
      Node lhs{t.expr.lhs};
      if (!operand(rule.rhs[0].id, lhs)) break;
      bool ok = false;
      if (is_chain(g_.kind())) {
        if (auto chain = flatten_chain(t.expr)) ok = chain_expr(rule.rhs[2].id, *chain);
      } else {
        ok = expr(rule.rhs[2].id, *strip_parens(t.expr.rhs));
      }
      if (ok) return out_;
      break;
    }
    throw Error(ErrorCode::kNotInLanguage,
                "'" + render(t.expr) + "' is not derivable in the " +
                    std::string(to_string(g_.kind())) + " grammar");
  }

 private:
  template <typename Fn>
  bool attempt(RuleId r, Fn&& body) {
    std::size_t mark = out_.size();
    out_.push_back(r);
    if (body()) return true;
    out_.resize(mark);
    return false;
  }

  bool operand(int nt, const Node& leaf) {
    const auto* access = leaf.as<TensorAccess>();
    const auto* constant = leaf.as<Constant>();
    if (constant && !constant->is_symbolic()) return false;
    for (RuleId r : g_.rules_for(nt)) {
      const ProductionRule& rule = g_.rule(r);
      bool ok = attempt(r, [&] {
        switch (rule.action) {
          case RuleAction::kLeaf:
            return (constant && rule.constant) ||
                   (access && rule.access && *rule.access == *access);
          case RuleAction::kPass:
            return operand(rule.rhs[0].id, leaf);
          case RuleAction::kBareTensor:
            return access && access->rank() == 0 && identifier(rule.rhs[0].id, access->name);
          case RuleAction::kIndexedTensor:
            return access && access->rank() > 0 &&
                   identifier(rule.rhs[0].id, access->name) &&
                   indices(rule.rhs[2].id, access->indices, 0);
          default:
            return false;
        }
      });
      if (ok) return true;
    }
    return false;
  }

  bool expr(int nt, const Node& n) {
    if (n.as<TensorAccess>() || n.as<Constant>()) return operand(nt, n);
    for (RuleId r : g_.rules_for(nt)) {
      const ProductionRule& rule = g_.rule(r);
      if (auto* neg = n.as<Negation>(); neg && rule.action == RuleAction::kNegate) {
        if (attempt(r, [&] { return expr(rule.rhs[1].id, *neg->operand); })) return true;
      }
      if (auto* b = n.as<Binary>(); b && rule.action == RuleAction::kBinary) {
        if (attempt(r, [&] {
              return expr(rule.rhs[0].id, *b->lhs) && op(rule.rhs[1].id, b->op) &&
                     expr(rule.rhs[2].id, *b->rhs);
            })) {
          return true;
        }
      }
    }
    return false;
  }

  bool chain_expr(int nt, const Chain& chain) {
    for (RuleId r : g_.rules_for(nt)) {
      const ProductionRule& rule = g_.rule(r);
      if (rule.action != RuleAction::kChainStart) continue;
      if (attempt(r, [&] {
            return operand(rule.rhs[0].id, *chain.operands[0]) &&
                   tail(rule.rhs[1].id, chain, 1);
          })) {
        return true;
      }
    }
    return false;
  }

  bool tail(int nt, const Chain& chain, std::size_t next) {
    for (RuleId r : g_.rules_for(nt)) {
      const ProductionRule& rule = g_.rule(r);
      if (next == chain.operands.size() && rule.action == RuleAction::kChainEnd) {
        out_.push_back(r);
        return true;
      }
      if (next < chain.operands.size() && rule.action == RuleAction::kChainExtend) {
        if (attempt(r, [&] {
              return op(rule.rhs[0].id, chain.ops[next - 1]) &&
                     operand(rule.rhs[1].id, *chain.operands[next]) &&
                     tail(rule.rhs[2].id, chain, next + 1);
            })) {
          return true;
        }
      }
    }
    return false;
  }

  bool op(int nt, BinaryOp value) {
    for (RuleId r : g_.rules_for(nt)) {
      const ProductionRule& rule = g_.rule(r);
      if (rule.action == RuleAction::kOperator && rule.op == value) {
        out_.push_back(r);
        return true;
      }
    }
    return false;
  }

  bool identifier(int nt, const std::string& name) {
    for (RuleId r : g_.rules_for(nt)) {
      const ProductionRule& rule = g_.rule(r);
      if (rule.action == RuleAction::kIdentifier && rule.name == name) {
        out_.push_back(r);
        return true;
      }
    }
    return false;
  }

  bool indices(int nt, const std::vector<std::string>& idx, std::size_t pos) {
    bool last = pos + 1 == idx.size();
    for (RuleId r : g_.rules_for(nt)) {
      const ProductionRule& rule = g_.rule(r);
      if (last && rule.action == RuleAction::kIndexLast) {
        if (attempt(r, [&] { return index_var(rule.rhs[0].id, idx[pos]); })) return true;
      }
      if (!last && rule.action == RuleAction::kIndexCons) {
        if (attempt(r, [&] {
              return index_var(rule.rhs[0].id, idx[pos]) &&
                     indices(rule.rhs[2].id, idx, pos + 1);
            })) {
          return true;
        }
      }
    }
    return false;
  }

  bool index_var(int nt, const std::string& name) {
    for (RuleId r : g_.rules_for(nt)) {
      const ProductionRule& rule = g_.rule(r);
      if (rule.action == RuleAction::kIndexVar && rule.name == name) {
        out_.push_back(r);
        return true;
      }
    }
    return false;
  }

  const TemplateGrammar& g_;
  std::vector<RuleId> out_;
};

}  // namespace

Derivation derive_leftmost(const TemplateGrammar& grammar, const Template& t) {
  return Derivation{Deriver(grammar).run(t)};
}

// --- Weights and probabilities ----------------------------------------------

TemplateGrammar learn_weights(TemplateGrammar grammar, const TemplateSet& templates,
                              WeightOptions options) {
  std::vector<double> counts(grammar.rules().size(), 0.0);
  grammar.skipped_templates = 0;
  for (const auto& t : templates.templates) {
    try {
      for (RuleId r : derive_leftmost(grammar, t).rules) counts[r] += 1.0;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNotInLanguage) throw;
      ++grammar.skipped_templates;
    }
  }
  auto& rules = grammar.mutable_rules();
  for (std::size_t i = 0; i < rules.size(); ++i) {
    rules[i].weight = counts[i] > 0 ? counts[i] : (options.default_weight ? 1.0 : 0.0);
    rules[i].probability = 0.0;
  }
  grammar.normalized = false;
  return grammar;
}

TemplateGrammar uniform_weights(TemplateGrammar grammar) {
  for (auto& r : grammar.mutable_rules()) {
    r.weight = 1.0;
    r.probability = 0.0;
  }
  grammar.normalized = false;
  return grammar;
}

TemplateGrammar normalize(TemplateGrammar grammar) {
  for (int nt = 0; nt < static_cast<int>(grammar.nonterminal_count()); ++nt) {
    const auto& ids = grammar.rules_for(nt);
    if (ids.empty()) continue;
    double total = 0.0;
    for (RuleId r : ids) total += grammar.rule(r).weight;
    if (!(total > 0.0)) {
      throw Error(ErrorCode::kZeroWeightClass,
                  "rules of " + grammar.nonterminal_name(nt) + " weigh 0 in total");
    }
    for (RuleId r : ids) {
      auto& rule = grammar.mutable_rules()[r];
      rule.probability = rule.weight / total;
    }
  }
  grammar.normalized = true;
  return grammar;
}

CompletionTable completion_table(const TemplateGrammar& grammar) {
  constexpr int kMaxSweeps = 10000;
  constexpr double kTolerance = 1e-12;
  std::vector<double> h(grammar.nonterminal_count(), 0.0);
  for (int sweep = 1; sweep <= kMaxSweeps; ++sweep) {
    double change = 0.0;
    for (int nt = 0; nt < static_cast<int>(h.size()); ++nt) {
      double best = 0.0;
      for (RuleId r : grammar.rules_for(nt)) {
        const ProductionRule& rule = grammar.rule(r);
        double p = rule.probability;
        for (const Symbol& s : rule.rhs) {
          if (!s.terminal) p *= h[s.id];
        }
        best = std::max(best, p);
      }
      change = std::max(change, std::abs(best - h[nt]));
      h[nt] = best;
    }
    if (change < kTolerance) {
      CompletionTable table(std::move(h));
      table.iterations = static_cast<std::size_t>(sweep);
      return table;
    }
  }
  throw Error(ErrorCode::kNonConvergence, "completion table did not converge");
}

// --- Replay -----------------------------------------------------------------

namespace {

class Replayer {
 public:
  Replayer(const TemplateGrammar& g, std::span<const RuleId> rules)
      : g_(g), rules_(rules) {}

  PartialTemplate run() {
    PartialTemplate out;
    if (!next_or_null(g_.start())) {
      out.lhs = hole(g_.start());
      out.rhs = hole(g_.start());
      out.complete = false;
      return out;
    }
    const ProductionRule& program = *current_;
    out.lhs = node(program.rhs[0].id);
    out.rhs = node(program.rhs[2].id);
    out.complete = !open_;
    return out;
  }

 private:
  // Advances to the next rule, which must expand `nt`. Returns false and
  // leaves current_ null when the derivation prefix is exhausted.
  bool next_or_null(int nt) {
    if (pos_ >= rules_.size()) {
      current_ = nullptr;
      return false;
    }
    current_ = &g_.rule(rules_[pos_++]);
    if (current_->lhs != nt) {
      throw std::logic_error("derivation is not leftmost for " + g_.nonterminal_name(nt));
    }
    return true;
  }

  FormNode hole(int nt) {
    open_ = true;
    FormNode n;
    n.kind = FormNode::Kind::kHole;
    n.hole = nt;
    return n;
  }

  FormNode node(int nt) {
    if (!next_or_null(nt)) return hole(nt);
    const ProductionRule& r = *current_;
    FormNode n;
    switch (r.action) {
      case RuleAction::kLeaf:
        if (r.constant) {
          n.kind = FormNode::Kind::kConstant;
        } else {
          n.kind = FormNode::Kind::kAccess;
          n.access = *r.access;
        }
        return n;
      case RuleAction::kPass:
        return node(r.rhs[0].id);
      case RuleAction::kBinary:
        n.kind = FormNode::Kind::kBinary;
        n.children.push_back(node(r.rhs[0].id));
        n.op = op(r.rhs[1].id);
        n.children.push_back(node(r.rhs[2].id));
        return n;
      case RuleAction::kNegate:
        n.kind = FormNode::Kind::kNegate;
        n.children.push_back(node(r.rhs[1].id));
        return n;
      case RuleAction::kChainStart:
        n.kind = FormNode::Kind::kChain;
        n.children.push_back(node(r.rhs[0].id));
        tail(r.rhs[1].id, n);
        return n;
      case RuleAction::kBareTensor: {
        n.kind = FormNode::Kind::kAccess;
        auto name = identifier(r.rhs[0].id);
        n.access.name = name.value_or("");
        n.access_complete = name.has_value();
        return n;
      }
      case RuleAction::kIndexedTensor: {
        n.kind = FormNode::Kind::kAccess;
        auto name = identifier(r.rhs[0].id);
        n.access.name = name.value_or("");
        bool done = indices(r.rhs[2].id, n.access.indices);
        n.access_complete = name.has_value() && done;
        return n;
      }
      default:
        throw std::logic_error("rule cannot produce an operand: " +
                               g_.nonterminal_name(nt));
    }
  }

  void tail(int nt, FormNode& chain) {
    if (!next_or_null(nt)) {
      open_ = true;
      chain.chain_tail = nt;
      return;
    }
    const ProductionRule& r = *current_;
    if (r.action == RuleAction::kChainEnd) return;
    chain.chain_ops.push_back(op(r.rhs[0].id));
    chain.children.push_back(node(r.rhs[1].id));
    tail(r.rhs[2].id, chain);
  }

  std::optional<BinaryOp> op(int nt) {
    if (!next_or_null(nt)) {
      open_ = true;
      return std::nullopt;
    }
    return current_->op;
  }

  std::optional<std::string> identifier(int nt) {
    if (!next_or_null(nt)) {
      open_ = true;
      return std::nullopt;
    }
    return current_->name;
  }

  // Appends index names; false while the list is still open.
  bool indices(int nt, std::vector<std::string>& out) {
    if (!next_or_null(nt)) {
      open_ = true;
      return false;
    }
    const ProductionRule& r = *current_;
    auto var = identifier(r.rhs[0].id);
    if (!var) return false;
    out.push_back(*var);
    if (r.action == RuleAction::kIndexLast) return true;
    return indices(r.rhs[2].id, out);
  }

  const TemplateGrammar& g_;
  std::span<const RuleId> rules_;
  std::size_t pos_ = 0;
  const ProductionRule* current_ = nullptr;
  bool open_ = false;
};

NodePtr form_node_to_ast(const FormNode& n) {
  switch (n.kind) {
    case FormNode::Kind::kAccess:
      if (!n.access_complete) return nullptr;
      return make_access(n.access.name, n.access.indices);
    case FormNode::Kind::kConstant:
      return make_symbolic_constant();
    case FormNode::Kind::kNegate: {
      NodePtr inner = form_node_to_ast(n.children[0]);
      return inner ? make_negation(inner) : nullptr;
    }
    case FormNode::Kind::kBinary: {
      if (!n.op) return nullptr;
      NodePtr l = form_node_to_ast(n.children[0]);
      NodePtr r = form_node_to_ast(n.children[1]);
      return (l && r) ? make_binary(*n.op, l, r) : nullptr;
    }
    case FormNode::Kind::kChain: {
      // A flat token sequence, grouped by ordinary precedence.
      std::string text = "x = ";
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        if (i) {
          if (!n.chain_ops[i - 1]) return nullptr;
          text += ' ';
          text += op_symbol(*n.chain_ops[i - 1]);
          text += ' ';
        }
        NodePtr leaf = form_node_to_ast(n.children[i]);
        if (!leaf) return nullptr;
        text += render(*leaf);
      }
      return parse_expression(text).rhs;
    }
    case FormNode::Kind::kHole:
      return nullptr;
  }
  return nullptr;
}

}  // namespace

PartialTemplate replay(const TemplateGrammar& grammar,
                       std::span<const RuleId> derivation) {
  return Replayer(grammar, derivation).run();
}

std::optional<TacoExpr> form_to_expr(const PartialTemplate& form) {
  if (form.lhs.kind != FormNode::Kind::kAccess || !form.lhs.access_complete) {
    return std::nullopt;
  }
  NodePtr rhs = form_node_to_ast(form.rhs);
  if (!rhs) return std::nullopt;
  // Round-trip through text so grouping parentheses appear as nodes.
  TacoExpr expr{form.lhs.access, rhs};
  return parse_expression(render(expr));
}

}  // namespace stagg

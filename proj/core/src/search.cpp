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

#include "stagg/search.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "stagg/error.hpp"

namespace stagg {

std::string_view to_string(Penalty p) {
  switch (p) {
    case Penalty::kA1: return "a1";
    case Penalty::kA2: return "a2";
    case Penalty::kA3: return "a3";
    case Penalty::kA4: return "a4";
    case Penalty::kA5: return "a5";
    case Penalty::kB1: return "b1";
    case Penalty::kB2: return "b2";
  }
  return "?";
}

std::set<Penalty> parse_penalties(std::string_view id) {
  if (id == "A") {
    return {Penalty::kA1, Penalty::kA2, Penalty::kA3, Penalty::kA4, Penalty::kA5};
  }
  if (id == "B") return {Penalty::kB1, Penalty::kB2};
  for (Penalty p : {Penalty::kA1, Penalty::kA2, Penalty::kA3, Penalty::kA4,
                    Penalty::kA5, Penalty::kB1, Penalty::kB2}) {
    if (to_string(p) == id) return {p};
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown penalty '" + std::string(id) + "'");
}

std::string_view to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::kFound: return "solved";
    case SearchStatus::kExhausted: return "exhausted";
    case SearchStatus::kTimeout: return "timeout";
  }
  return "?";
}

SearchContext SearchContext::for_grammar(const TemplateGrammar& g, DimensionList dims) {
  SearchContext ctx;
  ctx.dims = std::move(dims);
  ctx.op_count = g.operator_count();
  ctx.has_constant = g.has_constant();
  return ctx;
}

bool FormFacts::alphabetical() const {
  for (std::size_t k = 0; k < letters.size(); ++k) {
    if (letters[k] != std::string(1, static_cast<char>('a' + k))) return false;
  }
  return true;
}

namespace {

class Analyzer {
 public:
  FormFacts facts;

  void lhs(const FormNode& n) {
    if (n.kind == FormNode::Kind::kAccess) access(n);
  }

  int node(const FormNode& n) {
    switch (n.kind) {
      case FormNode::Kind::kHole:
        return 1;
      case FormNode::Kind::kAccess:
        access(n);
        if (n.access_complete) ++facts.operands;
        return 1;
      case FormNode::Kind::kConstant:
        ++facts.constants;
        ++facts.operands;
        return 1;
      case FormNode::Kind::kNegate:
        return 1 + node(n.children[0]);
      case FormNode::Kind::kBinary: {
        if (n.op) {
          ++facts.op_occurrences;
          facts.distinct_ops.insert(*n.op);
        }
        int l = node(n.children[0]);
        int r = node(n.children[1]);
        return 1 + std::max(l, r);
      }
      case FormNode::Kind::kChain:
        return chain(n);
    }
    return 1;
  }

 private:
  void access(const FormNode& n) {
    const TensorAccess& a = n.access;
    if (!a.name.empty() &&
        std::find(facts.letters.begin(), facts.letters.end(), a.name) == facts.letters.end()) {
      facts.letters.push_back(a.name);
    }
    if (std::find(a.indices.begin(), a.indices.end(), "i") != a.indices.end()) {
      ++facts.accesses_with_i;
    }
    if (a.indices.size() > kMaxRank) facts.too_many_indices = true;
  }

  // Depth of the operator-precedence tree over the known prefix of the chain,
  // with unknown operands standing in as leaves.
  int chain(const FormNode& n) {
    std::string text = "x = z";
    node(n.children[0]);
    for (std::size_t k = 1; k < n.children.size(); ++k) {
      const auto& op = n.chain_ops[k - 1];
      node(n.children[k]);
      if (!op) break;
      ++facts.op_occurrences;
      facts.distinct_ops.insert(*op);
      text += ' ';
      text += op_symbol(*op);
      text += " z";
    }
    return expr_depth(parse_expression(text));
  }
};

}  // namespace

FormFacts analyze(const PartialTemplate& form) {
  Analyzer a;
  a.lhs(form.lhs);
  a.facts.depth = a.node(form.rhs);
  return a.facts;
}

bool repeats_operand(const TacoExpr& expr) {
  bool found = false;
  visit(*strip_parens(expr.rhs), [&](const Node& n) {
    const auto* b = n.as<Binary>();
    if (!b || b->op == BinaryOp::kMul) return;
    const auto* l = b->lhs->as<TensorAccess>();
    const auto* r = b->rhs->as<TensorAccess>();
    if (l && r && *l == *r) found = true;
  });
  return found;
}

namespace {

bool too_few_operators(const FormFacts& facts, std::size_t op_count) {
  std::size_t half = (op_count + 1) / 2;
  return facts.op_occurrences >= 2 && facts.distinct_ops.size() < half;
}

}  // namespace

double penalty_A(const FormFacts& facts, const std::optional<TacoExpr>& complete,
                 const SearchContext& ctx) {
  double total = 0.0;
  const std::size_t length = facts.length();
  if (ctx.active(Penalty::kA1) && ctx.has_constant && length > 3 &&
      (facts.accesses_with_i < 2 || facts.constants == 0)) {
    total += 10.0;
  }
  if (ctx.active(Penalty::kA2) &&
      (complete ? length != ctx.dims.size() : length > ctx.dims.size())) {
    total += 100.0;
  }
  if (ctx.active(Penalty::kA3) && !facts.alphabetical()) return kInfinity;
  if (complete) {
    if (ctx.active(Penalty::kA4) && repeats_operand(*complete)) return kInfinity;
    if (ctx.active(Penalty::kA5) && too_few_operators(facts, ctx.op_count)) {
      return kInfinity;
    }
  }
  return total;
}

double penalty_B(const FormFacts& facts, const SearchContext& ctx) {
  double total = 0.0;
  if (ctx.active(Penalty::kB1) && !facts.alphabetical()) total += 100.0;
  if (ctx.active(Penalty::kB2) && ctx.dims.size() >= 1 &&
      facts.operands + 1 >= ctx.dims.size() && too_few_operators(facts, ctx.op_count)) {
    return kInfinity;
  }
  return total;
}

namespace {

double bits(double p) { return p > 0.0 ? -std::log2(p) : kInfinity; }

}  // namespace

double heuristic_td(const SearchNode& node, const CompletionTable& h) {
  double g = 0.0;
  for (int nt : node.pending) g += bits(h[nt]);
  return g;
}

double heuristic_bu(const SearchNode& node, const FormFacts& facts,
                    const TemplateGrammar& grammar, const CompletionTable& h,
                    const DimensionList& dims) {
  if (node.complete()) return 0.0;
  const std::size_t slots = dims.size() - 1;
  if (facts.operands >= slots) return 0.0;
  if (grammar.operand_slots().empty()) {
    int operand = grammar.chain_operand();
    if (operand < 0) return heuristic_td(node, h);
    return static_cast<double>(slots - facts.operands) * bits(h[operand]);
  }
  const auto& all = grammar.operand_slots();
  double g = 0.0;
  for (std::size_t k = facts.operands; k < all.size(); ++k) {
    double best = 0.0;
    for (const auto& s : all) {
      if (s.rank == all[k].rank) best = std::max(best, h[s.nonterminal]);
    }
    g += bits(best);
  }
  return g;
}

namespace {

struct LaterFirst {
  bool operator()(const SearchNode& a, const SearchNode& b) const {
    if (a.f() != b.f()) return a.f() > b.f();
    return a.seq > b.seq;
  }
};

class Search {
 public:
  Search(const TemplateGrammar& g, const SearchContext& ctx, const TemplateCheck& check,
         bool bottom_up)
      : g_(g), ctx_(ctx), check_(check), bottom_up_(bottom_up), h_(completion_table(g)) {}

  SearchResult run() {
    SearchNode root;
    root.pending = {g_.start()};
    root.g = bits(h_[g_.start()]);
    push(std::move(root));
    while (!queue_.empty()) {
      if (ctx_.expired()) return finish(SearchStatus::kTimeout);
      SearchNode node = queue_.top();
      queue_.pop();
      ++result_.stats.templates_enumerated;
      PartialTemplate form = replay(g_, node.derivation);
      if (ctx_.on_pop) ctx_.on_pop(node, form);

      bool ready = bottom_up_ ? chain_ready(node, form) : node.complete();
      if (ready) {
        if (validate(node, form)) return finish(SearchStatus::kFound);
        if (ctx_.expired()) return finish(SearchStatus::kTimeout);
        if (ctx_.max_validations &&
            result_.stats.templates_validated >= ctx_.max_validations) {
          break;
        }
        continue;
      }
      if (!node.complete()) expand(node);
    }
    return finish(SearchStatus::kExhausted);
  }

 private:
  // All RHS operand slots are filled and only the chain tail is pending.
  bool chain_ready(const SearchNode& node, const PartialTemplate& form) const {
    return node.pending.size() == 1 && form.rhs.kind == FormNode::Kind::kChain &&
           form.rhs.chain_tail == node.pending.back() &&
           form.rhs.children.size() + 1 == ctx_.dims.size() &&
           form.rhs.chain_ops.size() + 1 == form.rhs.children.size();
  }

  bool validate(const SearchNode& node, const PartialTemplate& form) {
    auto tmpl = form_to_expr(form);
    if (!tmpl) return false;
    ++result_.stats.templates_validated;
    auto program = check_(*tmpl);
    if (!program) return false;
    result_.template_expr = std::move(tmpl);
    result_.program = std::move(program);
    result_.cost = node.c;
    return true;
  }

  void expand(const SearchNode& node) {
    const int x = node.pending.back();
    for (RuleId r : g_.rules_for(x)) {
      const ProductionRule& rule = g_.rule(r);
      if (!(rule.probability > 0.0)) continue;
      SearchNode child;
      child.derivation = node.derivation;
      child.derivation.push_back(r);
      child.pending.assign(node.pending.begin(), node.pending.end() - 1);
      for (auto it = rule.rhs.rbegin(); it != rule.rhs.rend(); ++it) {
        if (!it->terminal) child.pending.push_back(it->id);
      }
      child.c = node.c + bits(rule.probability);
      score(std::move(child));
    }
  }

  void score(SearchNode child) {
    PartialTemplate form = replay(g_, child.derivation);
    FormFacts facts = analyze(form);
    if (facts.too_many_indices || facts.depth > ctx_.max_depth) return;
    if (bottom_up_) {
      // A chain closed early never becomes a template of the right length.
      if (child.complete()) return;
      if (facts.operands + 1 > ctx_.dims.size()) return;
      child.penalty = penalty_B(facts, ctx_);
      child.g = heuristic_bu(child, facts, g_, h_, ctx_.dims);
    } else {
      std::optional<TacoExpr> complete;
      if (child.complete()) {
        complete = form_to_expr(form);
        if (!complete) return;
      }
      child.penalty = penalty_A(facts, complete, ctx_);
      child.g = heuristic_td(child, h_);
    }
    if (!std::isfinite(child.f())) return;
    push(std::move(child));
  }

  void push(SearchNode node) {
    node.seq = next_seq_++;
    ++result_.stats.nodes_pushed;
    queue_.push(std::move(node));
  }

  SearchResult finish(SearchStatus status) {
    result_.status = status;
    return std::move(result_);
  }

  const TemplateGrammar& g_;
  const SearchContext& ctx_;
  const TemplateCheck& check_;
  bool bottom_up_;
  CompletionTable h_;
  std::priority_queue<SearchNode, std::vector<SearchNode>, LaterFirst> queue_;
  std::uint64_t next_seq_ = 0;
  SearchResult result_;
};

void require_normalized(const TemplateGrammar& g) {
  if (!g.normalized) {
    throw Error(ErrorCode::kInvalidConfig, "search needs a normalized grammar");
  }
}

}  // namespace

SearchResult enumerate_td(const TemplateGrammar& grammar, const SearchContext& ctx,
                          const TemplateCheck& check) {
  require_normalized(grammar);
  return Search(grammar, ctx, check, false).run();
}

SearchResult enumerate_bu(const TemplateGrammar& grammar, const SearchContext& ctx,
                          const TemplateCheck& check) {
  require_normalized(grammar);
  if (!is_chain(grammar.kind())) {
    throw Error(ErrorCode::kInvalidConfig, "bottom-up search needs a chain grammar");
  }
  return Search(grammar, ctx, check, true).run();
}

}  // namespace stagg

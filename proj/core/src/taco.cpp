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

#include "stagg/taco.hpp"

#include <cctype>
#include <sstream>
#include <utility>

#include "stagg/error.hpp"

namespace stagg {

char op_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::kAdd: return '+';
    case BinaryOp::kSub: return '-';
    case BinaryOp::kMul: return '*';
    case BinaryOp::kDiv: return '/';
  }
  return '?';
}

std::string_view op_name(BinaryOp op) {
  switch (op) {
    case BinaryOp::kAdd: return "ADD";
    case BinaryOp::kSub: return "SUB";
    case BinaryOp::kMul: return "MUL";
    case BinaryOp::kDiv: return "DIV";
  }
  return "?";
}

std::string render_access(const TensorAccess& access) {
  std::string out = access.name;
  if (!access.indices.empty()) {
    out += '(';
    for (std::size_t i = 0; i < access.indices.size(); ++i) {
      if (i) out += ',';
      out += access.indices[i];
    }
    out += ')';
  }
  return out;
}

NodePtr make_access(std::string name, std::vector<std::string> indices) {
  return std::make_shared<const Node>(
      Node{TensorAccess{std::move(name), std::move(indices)}});
}

NodePtr make_constant(Rational value) {
  return std::make_shared<const Node>(Node{Constant{std::move(value)}});
}

NodePtr make_symbolic_constant() {
  return std::make_shared<const Node>(Node{Constant{std::nullopt}});
}

NodePtr make_negation(NodePtr operand) {
  return std::make_shared<const Node>(Node{Negation{std::move(operand)}});
}

NodePtr make_binary(BinaryOp op, NodePtr lhs, NodePtr rhs) {
  return std::make_shared<const Node>(
      Node{Binary{op, std::move(lhs), std::move(rhs)}});
}

NodePtr make_parenthesized(NodePtr inner) {
  return std::make_shared<const Node>(Node{Parenthesized{std::move(inner)}});
}

bool structurally_equal(const Node& a, const Node& b) {
  if (a.value.index() != b.value.index()) return false;
  if (auto* x = a.as<TensorAccess>()) return *x == *b.as<TensorAccess>();
  if (auto* x = a.as<Constant>()) {
    const auto* y = b.as<Constant>();
    if (x->is_symbolic() || y->is_symbolic()) {
      return x->is_symbolic() == y->is_symbolic();
    }
    return *x->value == *y->value;
  }
  if (auto* x = a.as<Negation>()) {
    return structurally_equal(*x->operand, *b.as<Negation>()->operand);
  }
  if (auto* x = a.as<Binary>()) {
    const auto* y = b.as<Binary>();
    return x->op == y->op && structurally_equal(*x->lhs, *y->lhs) &&
           structurally_equal(*x->rhs, *y->rhs);
  }
  return structurally_equal(*a.as<Parenthesized>()->inner,
                            *b.as<Parenthesized>()->inner);
}

bool operator==(const TacoExpr& a, const TacoExpr& b) {
  return a.lhs == b.lhs && structurally_equal(*a.rhs, *b.rhs);
}

namespace {

enum class Tok { kIdent, kInt, kLParen, kRParen, kComma, kAssign, kOp, kEnd };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c))) {
      while (i < s.size() && std::isalnum(static_cast<unsigned char>(s[i]))) ++i;
      out.push_back({Tok::kIdent, std::string(s.substr(start, i - start)), start});
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      if (i < s.size() && std::isalpha(static_cast<unsigned char>(s[i]))) {
        throw SyntaxError(i, "identifier may not start with a digit");
      }
      out.push_back({Tok::kInt, std::string(s.substr(start, i - start)), start});
    } else if (c == ':' && i + 1 < s.size() && s[i + 1] == '=') {
      out.push_back({Tok::kAssign, ":=", start});
      i += 2;
    } else {
      switch (c) {
        case '(': out.push_back({Tok::kLParen, "(", start}); break;
        case ')': out.push_back({Tok::kRParen, ")", start}); break;
        case ',': out.push_back({Tok::kComma, ",", start}); break;
        case '=': out.push_back({Tok::kAssign, "=", start}); break;
        case '+':
        case '-':
        case '*':
        case '/': out.push_back({Tok::kOp, std::string(1, c), start}); break;
        default:
          throw SyntaxError(start, std::string("unexpected character '") + c + "'");
      }
      ++i;
    }
  }
  out.push_back({Tok::kEnd, "", s.size()});
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(lex(text)) {}

  TacoExpr program() {
    TacoExpr expr;
    if (peek().kind != Tok::kIdent) fail("expected output tensor");
    expr.lhs = access();
    if (peek().kind != Tok::kAssign) fail("expected '=' or ':='");
    ++pos_;
    expr.rhs = additive();
    if (peek().kind != Tok::kEnd) fail("unexpected trailing input");
    return expr;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }

  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = peek();
    throw SyntaxError(t.pos, what + (t.kind == Tok::kEnd ? " (end of input)"
                                                          : ", found '" + t.text + "'"));
  }

  bool peek_op(char c) const {
    return peek().kind == Tok::kOp && peek().text[0] == c;
  }

  TensorAccess access() {
    TensorAccess a;
    a.name = tokens_[pos_++].text;
    if (peek().kind != Tok::kLParen) return a;
    ++pos_;
    while (true) {
      if (peek().kind != Tok::kIdent) fail("expected index variable");
      a.indices.push_back(tokens_[pos_++].text);
      if (peek().kind == Tok::kComma) {
        ++pos_;
        continue;
      }
      if (peek().kind == Tok::kRParen) {
        ++pos_;
        break;
      }
      fail("expected ',' or ')'");
    }
    if (a.indices.size() > kMaxRank) {
      throw SyntaxError(tokens_[pos_ - 1].pos,
                        "tensor '" + a.name + "' has more than 4 indices");
    }
    return a;
  }

  NodePtr additive() {
    NodePtr lhs = multiplicative();
    while (peek_op('+') || peek_op('-')) {
      BinaryOp op = peek().text[0] == '+' ? BinaryOp::kAdd : BinaryOp::kSub;
      ++pos_;
      lhs = make_binary(op, lhs, multiplicative());
    }
    return lhs;
  }

  NodePtr multiplicative() {
    NodePtr lhs = unary();
    while (peek_op('*') || peek_op('/')) {
      BinaryOp op = peek().text[0] == '*' ? BinaryOp::kMul : BinaryOp::kDiv;
      ++pos_;
      lhs = make_binary(op, lhs, unary());
    }
    return lhs;
  }

  NodePtr unary() {
    if (peek_op('-')) {
      ++pos_;
      return make_negation(unary());
    }
    return primary();
  }

  NodePtr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::kInt:
        ++pos_;
        return make_constant(Rational(mpz_class(t.text)));
      case Tok::kIdent:
        if (t.text == "Const" && tokens_[pos_ + 1].kind != Tok::kLParen) {
          ++pos_;
          return make_symbolic_constant();
        }
        {
          TensorAccess a = access();
          if (peek().kind == Tok::kLParen) fail("unexpected '('");
          return std::make_shared<const Node>(Node{std::move(a)});
        }
      case Tok::kLParen: {
        ++pos_;
        NodePtr inner = additive();
        if (peek().kind != Tok::kRParen) fail("expected ')'");
        ++pos_;
        return make_parenthesized(inner);
      }
      default:
        fail("expected operand");
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

int precedence(BinaryOp op) {
  return (op == BinaryOp::kAdd || op == BinaryOp::kSub) ? 1 : 2;
}

constexpr int kUnaryPrecedence = 3;

void render_into(const Node& node, int parent_prec, bool right_child,
                 std::string& out) {
  if (auto* a = node.as<TensorAccess>()) {
    out += render_access(*a);
  } else if (auto* c = node.as<Constant>()) {
    if (c->is_symbolic()) {
      out += "Const";
    } else {
      const Rational& v = *c->value;
      bool plain = v >= 0 && v.get_den() == 1;
      if (!plain) out += '(';
      out += format_rational(v);
      if (!plain) out += ')';
    }
  } else if (auto* n = node.as<Negation>()) {
    out += '-';
    render_into(*n->operand, kUnaryPrecedence, false, out);
  } else if (auto* b = node.as<Binary>()) {
    int prec = precedence(b->op);
    bool parens = prec < parent_prec || (prec == parent_prec && right_child);
    if (parens) out += '(';
    render_into(*b->lhs, prec, false, out);
    out += ' ';
    out += op_symbol(b->op);
    out += ' ';
    render_into(*b->rhs, prec, true, out);
    if (parens) out += ')';
  } else {
    out += '(';
    render_into(*node.as<Parenthesized>()->inner, 0, false, out);
    out += ')';
  }
}

}  // namespace

TacoExpr parse_expression(std::string_view text) {
  return Parser(text).program();
}

std::string render(const Node& node) {
  std::string out;
  render_into(node, 0, false, out);
  return out;
}

std::string render(const TacoExpr& expr) {
  return render_access(expr.lhs) + " = " + render(*expr.rhs);
}

int expr_depth(const Node& node) {
  if (auto* n = node.as<Negation>()) return 1 + expr_depth(*n->operand);
  if (auto* b = node.as<Binary>()) {
    return 1 + std::max(expr_depth(*b->lhs), expr_depth(*b->rhs));
  }
  if (auto* p = node.as<Parenthesized>()) return expr_depth(*p->inner);
  return 1;
}

int expr_depth(const TacoExpr& expr) { return expr_depth(*expr.rhs); }

NodePtr strip_parens(const NodePtr& node) {
  if (auto* p = node->as<Parenthesized>()) return strip_parens(p->inner);
  if (auto* n = node->as<Negation>()) return make_negation(strip_parens(n->operand));
  if (auto* b = node->as<Binary>()) {
    return make_binary(b->op, strip_parens(b->lhs), strip_parens(b->rhs));
  }
  return node;
}

void visit(const Node& node, const std::function<void(const Node&)>& fn) {
  fn(node);
  if (auto* n = node.as<Negation>()) {
    visit(*n->operand, fn);
  } else if (auto* b = node.as<Binary>()) {
    visit(*b->lhs, fn);
    visit(*b->rhs, fn);
  } else if (auto* p = node.as<Parenthesized>()) {
    visit(*p->inner, fn);
  }
}

std::vector<TensorAccess> accesses(const TacoExpr& expr) {
  std::vector<TensorAccess> out{expr.lhs};
  visit(*expr.rhs, [&](const Node& n) {
    if (auto* a = n.as<TensorAccess>()) out.push_back(*a);
  });
  return out;
}

}  // namespace stagg

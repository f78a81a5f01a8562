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

#include "stagg/validation.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "stagg/error.hpp"
#include "stagg/evaluate.hpp"

namespace stagg {

namespace {

constexpr int kMaxRegenerations = 100;

std::vector<std::string> index_variables(const TacoExpr& expr) {
  std::vector<std::string> out;
  for (const auto& a : accesses(expr)) {
    for (const auto& idx : a.indices) {
      if (std::find(out.begin(), out.end(), idx) == out.end()) out.push_back(idx);
    }
  }
  return out;
}

TensorValue random_tensor(std::vector<std::size_t> extents, std::mt19937_64& rng,
                          const ExampleOptions& options) {
  TensorValue t(std::move(extents));
  std::uniform_int_distribution<int> value(options.min_value, options.max_value);
  for (auto& x : t.data()) x = value(rng);
  return t;
}

Example random_case(const Benchmark& bench, const std::vector<std::string>& indices,
                    std::mt19937_64& rng, const ExampleOptions& options) {
  std::vector<std::size_t> pool = options.extents;
  while (pool.size() < indices.size()) pool.push_back(pool.back() + 1);
  std::shuffle(pool.begin(), pool.end(), rng);
  std::map<std::string, std::size_t> extent_of;
  for (std::size_t k = 0; k < indices.size(); ++k) extent_of[indices[k]] = pool[k];

  std::map<std::string, std::vector<std::size_t>> shapes;
  for (const auto& a : accesses(*bench.oracle.expr)) {
    if (shapes.count(a.name)) continue;
    std::vector<std::size_t> ext;
    for (const auto& idx : a.indices) ext.push_back(extent_of.at(idx));
    shapes[a.name] = std::move(ext);
  }
  std::uniform_int_distribution<std::size_t> pick(0, options.extents.size() - 1);
  Example ex;
  for (const auto& arg : bench.args) {
    std::vector<std::size_t> ext;
    if (auto it = shapes.find(arg.name); it != shapes.end()) {
      ext = it->second;
    } else {
      for (int d = 0; d < arg.rank; ++d) ext.push_back(options.extents[pick(rng)]);
    }
    ex.inputs.emplace(arg.name, random_tensor(std::move(ext), rng, options));
  }
  return ex;
}

}  // namespace

ExampleSet generate_examples(const Benchmark& bench, std::size_t n, std::uint64_t seed,
                             const ExampleOptions& options) {
  ExampleSet set;
  if (bench.oracle.embedded()) {
    for (const auto& c : bench.oracle.cases) {
      if (set.cases.size() == n) break;
      set.cases.push_back(Example{c.inputs, c.output});
    }
    return set;
  }
  if (options.extents.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "empty extent pool");
  }
  std::mt19937_64 rng(seed);
  const auto indices = index_variables(*bench.oracle.expr);
  for (std::size_t k = 0; k < n; ++k) {
    for (int attempt = 0;; ++attempt) {
      Example ex = random_case(bench, indices, rng, options);
      try {
        ex.output = run_oracle(bench, ex.inputs);
        set.cases.push_back(std::move(ex));
        break;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kDivisionByZero || attempt + 1 >= kMaxRegenerations) {
          throw Error(ErrorCode::kOracleFailure, bench.name + ": " + e.what());
        }
      }
    }
  }
  return set;
}

std::string Substitution::to_string() const {
  std::string out = "<";
  bool first = true;
  for (const auto& [sym, arg] : tensors) {
    if (!first) out += ", ";
    first = false;
    out += sym + "->" + arg;
  }
  for (const auto& c : constants) {
    if (!first) out += ", ";
    first = false;
    out += "Const->" + format_rational(c);
  }
  return out + ">";
}

SubstitutionStream::SubstitutionStream(const TacoExpr& tmpl,
                                       const std::vector<Argument>& args,
                                       std::vector<Rational> constants)
    : constants_(std::move(constants)) {
  std::vector<std::size_t> ranks;
  visit(*tmpl.rhs, [&](const Node& n) {
    if (auto* a = n.as<TensorAccess>()) {
      if (a->name == tmpl.lhs.name) return;
      if (std::find(symbols_.begin(), symbols_.end(), a->name) == symbols_.end()) {
        symbols_.push_back(a->name);
        ranks.push_back(a->rank());
      }
    } else if (n.as<Constant>()) {
      ++const_slots_;
    }
  });
  for (std::size_t s = 0; s < symbols_.size(); ++s) {
    std::vector<std::string> fits;
    for (const auto& arg : args) {
      bool scalar = arg.kind == ArgKind::kScalar || arg.rank == 0;
      if (scalar == (ranks[s] == 0)) fits.push_back(arg.name);
    }
    if (fits.empty()) done_ = true;
    choices_.push_back(std::move(fits));
  }
  if (const_slots_ > 0 && constants_.empty()) done_ = true;
  digits_.assign(symbols_.size() + const_slots_, 0);
}

std::optional<Substitution> SubstitutionStream::next() {
  if (done_) return std::nullopt;
  Substitution s;
  for (std::size_t k = 0; k < symbols_.size(); ++k) {
    s.tensors.emplace_back(symbols_[k], choices_[k][digits_[k]]);
  }
  for (std::size_t k = 0; k < const_slots_; ++k) {
    s.constants.push_back(constants_[digits_[symbols_.size() + k]]);
  }
  // Advance the odometer, last position fastest.
  std::size_t pos = digits_.size();
  while (pos > 0) {
    --pos;
    std::size_t limit =
        pos < symbols_.size() ? choices_[pos].size() : constants_.size();
    if (++digits_[pos] < limit) return s;
    digits_[pos] = 0;
  }
  done_ = true;
  return s;
}

std::vector<Substitution> enumerate_substitutions(const TacoExpr& tmpl,
                                                  const std::vector<Argument>& args,
                                                  const std::vector<Rational>& constants) {
  std::vector<Substitution> out;
  SubstitutionStream stream(tmpl, args, constants);
  while (auto s = stream.next()) out.push_back(std::move(*s));
  return out;
}

namespace {

class Instantiator {
 public:
  Instantiator(const TacoExpr& tmpl, const Substitution& s, const std::string& output)
      : lhs_(tmpl.lhs.name), output_(output), s_(s) {}

  NodePtr operator()(const NodePtr& n) {
    if (auto* a = n->as<TensorAccess>()) return make_access(name(a->name), a->indices);
    if (n->as<Constant>()) {
      if (next_const_ >= s_.constants.size()) {
        throw Error(ErrorCode::kUnboundTensor, "Const occurrence without a value");
      }
      return make_constant(s_.constants[next_const_++]);
    }
    if (auto* g = n->as<Negation>()) return make_negation((*this)(g->operand));
    if (auto* b = n->as<Binary>()) {
      NodePtr l = (*this)(b->lhs);
      return make_binary(b->op, l, (*this)(b->rhs));
    }
    return make_parenthesized((*this)(n->as<Parenthesized>()->inner));
  }

  std::string name(const std::string& symbol) const {
    if (symbol == lhs_) return output_;
    for (const auto& [sym, arg] : s_.tensors) {
      if (sym == symbol) return arg;
    }
    throw Error(ErrorCode::kUnboundTensor, "no binding for '" + symbol + "'");
  }

 private:
  std::string lhs_;
  std::string output_;
  const Substitution& s_;
  std::size_t next_const_ = 0;
};

}  // namespace

TacoExpr instantiate(const TacoExpr& tmpl, const Substitution& s,
                     const std::string& output_arg) {
  Instantiator inst(tmpl, s, output_arg);
  TacoExpr out;
  out.lhs = TensorAccess{output_arg, tmpl.lhs.indices};
  out.rhs = inst(tmpl.rhs);
  return out;
}

bool matches_examples(const TacoExpr& program, const ExampleSet& examples) {
  for (const auto& ex : examples.cases) {
    try {
      if (!(evaluate(program, ex.inputs) == ex.output)) return false;
    } catch (const Error&) {
      return false;
    }
  }
  return true;
}

std::optional<Validated> validate(
    const TacoExpr& tmpl, const ExampleSet& examples, const Benchmark& bench,
    const VerifyFn& verify, ValidationStats* stats,
    std::optional<std::chrono::steady_clock::time_point> deadline) {
  if (examples.cases.empty()) return std::nullopt;
  SubstitutionStream stream(tmpl, bench.args, bench.constants);
  while (auto s = stream.next()) {
    if (deadline && std::chrono::steady_clock::now() >= *deadline) return std::nullopt;
    if (stats) ++stats->substitutions_tried;
    TacoExpr program = instantiate(tmpl, *s, bench.output_arg);
    if (!matches_examples(program, examples)) continue;
    if (verify && !verify(program, *s)) continue;
    return Validated{std::move(*s), std::move(program)};
  }
  return std::nullopt;
}

bool differential_verify(const TacoExpr& program, const Benchmark& bench,
                         const VerifyOptions& options) {
  ExampleSet trials;
  if (bench.oracle.embedded()) {
    trials = generate_examples(bench, bench.oracle.cases.size(), options.seed);
  } else {
    ExampleOptions ex;
    ex.extents = options.extents;
    trials = generate_examples(bench, options.trials, options.seed, ex);
  }
  if (trials.cases.empty()) return true;
  return matches_examples(program, trials);
}

}  // namespace stagg

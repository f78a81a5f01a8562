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

#include "stagg/evaluate.hpp"

#include <algorithm>
#include <set>
#include <utility>
#include <vector>

#include "stagg/error.hpp"

namespace stagg {

namespace {

void bind_access(const TensorAccess& access, const TensorValue& value,
                 IndexRanges& ranges) {
  if (access.rank() != value.rank()) {
    throw Error(ErrorCode::kRankMismatch,
                "'" + access.name + "' is accessed with " +
                    std::to_string(access.rank()) + " indices but has rank " +
                    std::to_string(value.rank()));
  }
  for (std::size_t d = 0; d < access.rank(); ++d) {
    auto [it, inserted] = ranges.emplace(access.indices[d], value.extents()[d]);
    if (!inserted && it->second != value.extents()[d]) {
      throw Error(ErrorCode::kInconsistentExtent,
                  "index '" + access.indices[d] + "' bound to extents " +
                      std::to_string(it->second) + " and " +
                      std::to_string(value.extents()[d]));
    }
  }
}

const TensorValue& lookup(const Bindings& bindings, const std::string& name) {
  auto it = bindings.find(name);
  if (it == bindings.end()) {
    throw Error(ErrorCode::kUnboundTensor, "tensor '" + name + "' is not bound");
  }
  return it->second;
}

// Flattened expression tree with index variables resolved to slots.
struct Step {
  enum class Kind { kAccess, kConstant, kNegate, kBinary } kind;
  const TensorValue* tensor = nullptr;
  std::vector<int> slots;
  std::vector<std::size_t> strides;
  Rational constant;
  BinaryOp op = BinaryOp::kAdd;
  int lhs = -1;
  int rhs = -1;
  std::vector<int> reduce;  // slots summed at this step
};

class Program {
 public:
  Program(const TacoExpr& expr, const Bindings& bindings) {
    ranges_ = infer_index_ranges(expr, bindings);
    for (const auto& [name, extent] : ranges_) {
      slot_of_.emplace(name, static_cast<int>(extents_.size()));
      extents_.push_back(extent);
    }
    root_ = compile(*expr.rhs, bindings);

    // Attach every reduction index to the lowest step covering all uses.
    std::set<std::string> lhs_indices(expr.lhs.indices.begin(),
                                      expr.lhs.indices.end());
    for (const auto& [name, slot] : slot_of_) {
      if (lhs_indices.count(name)) continue;
      int owner = lowest_cover(root_, slot);
      steps_[owner].reduce.push_back(slot);
    }
    for (const auto& idx : expr.lhs.indices) output_slots_.push_back(slot_of_.at(idx));
  }

  TensorValue run(const TensorAccess& lhs) {
    std::vector<std::size_t> out_extents;
    for (int s : output_slots_) out_extents.push_back(extents_[s]);
    TensorValue out(out_extents);

    // Distinct LHS slots in order; repeated LHS indices write a diagonal.
    std::vector<int> free_slots;
    for (int s : output_slots_) {
      if (std::find(free_slots.begin(), free_slots.end(), s) == free_slots.end()) {
        free_slots.push_back(s);
      }
    }
    env_.assign(extents_.size(), 0);
    std::vector<std::size_t> index(lhs.rank());
    iterate(free_slots, 0, [&] {
      for (std::size_t d = 0; d < output_slots_.size(); ++d) {
        index[d] = env_[output_slots_[d]];
      }
      out.at(index) = eval(root_);
    });
    return out;
  }

 private:
  int compile(const Node& node, const Bindings& bindings) {
    Step step;
    if (auto* a = node.as<TensorAccess>()) {
      step.kind = Step::Kind::kAccess;
      step.tensor = &lookup(bindings, a->name);
      std::size_t stride = 1;
      step.strides.resize(a->rank());
      for (std::size_t d = a->rank(); d-- > 0;) {
        step.strides[d] = stride;
        stride *= step.tensor->extents()[d];
      }
      for (const auto& idx : a->indices) step.slots.push_back(slot_of_.at(idx));
    } else if (auto* c = node.as<Constant>()) {
      if (c->is_symbolic()) {
        throw Error(ErrorCode::kUnboundTensor,
                    "symbolic Const must be substituted before evaluation");
      }
      step.kind = Step::Kind::kConstant;
      step.constant = *c->value;
    } else if (auto* n = node.as<Negation>()) {
      step.kind = Step::Kind::kNegate;
      step.lhs = compile(*n->operand, bindings);
    } else if (auto* b = node.as<Binary>()) {
      step.kind = Step::Kind::kBinary;
      step.op = b->op;
      step.lhs = compile(*b->lhs, bindings);
      step.rhs = compile(*b->rhs, bindings);
    } else {
      return compile(*node.as<Parenthesized>()->inner, bindings);
    }
    steps_.push_back(std::move(step));
    return static_cast<int>(steps_.size()) - 1;
  }

  bool uses(int id, int slot) const {
    const Step& s = steps_[id];
    switch (s.kind) {
      case Step::Kind::kAccess:
        return std::find(s.slots.begin(), s.slots.end(), slot) != s.slots.end();
      case Step::Kind::kConstant: return false;
      case Step::Kind::kNegate: return uses(s.lhs, slot);
      case Step::Kind::kBinary: return uses(s.lhs, slot) || uses(s.rhs, slot);
    }
    return false;
  }

  int lowest_cover(int id, int slot) const {
    const Step& s = steps_[id];
    if (s.kind == Step::Kind::kNegate && uses(s.lhs, slot)) {
      return lowest_cover(s.lhs, slot);
    }
    if (s.kind == Step::Kind::kBinary) {
      bool left = uses(s.lhs, slot);
      bool right = uses(s.rhs, slot);
      if (left && !right) return lowest_cover(s.lhs, slot);
      if (right && !left) return lowest_cover(s.rhs, slot);
    }
    return id;
  }

  template <typename Fn>
  void iterate(const std::vector<int>& slots, std::size_t pos, Fn&& fn) {
    if (pos == slots.size()) {
      fn();
      return;
    }
    int s = slots[pos];
    for (std::size_t v = 0; v < extents_[s]; ++v) {
      env_[s] = v;
      iterate(slots, pos + 1, fn);
    }
  }

  Rational eval(int id) {
    const Step& s = steps_[id];
    if (s.reduce.empty()) return eval_local(id);
    Rational sum = 0;
    iterate(s.reduce, 0, [&] { sum += eval_local(id); });
    return sum;
  }

  Rational eval_local(int id) {
    const Step& s = steps_[id];
    switch (s.kind) {
      case Step::Kind::kAccess: {
        std::size_t off = 0;
        for (std::size_t d = 0; d < s.slots.size(); ++d) {
          off += env_[s.slots[d]] * s.strides[d];
        }
        return s.tensor->data()[off];
      }
      case Step::Kind::kConstant: return s.constant;
      case Step::Kind::kNegate: return -eval(s.lhs);
      case Step::Kind::kBinary: {
        Rational l = eval(s.lhs);
        Rational r = eval(s.rhs);
        switch (s.op) {
          case BinaryOp::kAdd: return l + r;
          case BinaryOp::kSub: return l - r;
          case BinaryOp::kMul: return l * r;
          case BinaryOp::kDiv:
            if (r == 0) throw Error(ErrorCode::kDivisionByZero, "division by zero");
            return l / r;
        }
      }
    }
    return 0;
  }

  IndexRanges ranges_;
  std::map<std::string, int> slot_of_;
  std::vector<std::size_t> extents_;
  std::vector<Step> steps_;
  std::vector<int> output_slots_;
  std::vector<std::size_t> env_;
  int root_ = -1;
};

}  // namespace

IndexRanges infer_index_ranges(const TacoExpr& expr, const Bindings& bindings) {
  IndexRanges ranges;
  visit(*expr.rhs, [&](const Node& n) {
    if (auto* a = n.as<TensorAccess>()) {
      bind_access(*a, lookup(bindings, a->name), ranges);
    }
  });
  if (auto it = bindings.find(expr.lhs.name); it != bindings.end()) {
    bind_access(expr.lhs, it->second, ranges);
  }
  for (const auto& idx : expr.lhs.indices) {
    if (!ranges.count(idx)) {
      throw Error(ErrorCode::kInconsistentExtent,
                  "output index '" + idx + "' has no extent");
    }
  }
  return ranges;
}

TensorValue evaluate(const TacoExpr& expr, const Bindings& bindings) {
  Program program(expr, bindings);
  return program.run(expr.lhs);
}

}  // namespace stagg

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

#include "stagg/candidates.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "stagg/error.hpp"

namespace stagg {

namespace {

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::string_view strip_list_marker(std::string_view s) {
  for (std::string_view bullet : {"- ", "* ", "\xE2\x80\xA2 "}) {
    if (s.substr(0, bullet.size()) == bullet) return trim(s.substr(bullet.size()));
  }
  // "1." "1)" "(1)"
  std::size_t i = 0;
  bool open = false;
  if (i < s.size() && s[i] == '(') {
    open = true;
    ++i;
  }
  std::size_t digits = i;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i > digits && i < s.size() &&
      ((open && s[i] == ')') || (!open && (s[i] == '.' || s[i] == ')')))) {
    return trim(s.substr(i + 1));
  }
  return s;
}

std::string clean_line(std::string_view line) {
  std::string_view s = strip_list_marker(trim(line));
  while (s.size() >= 2 && s.front() == '`' && s.back() == '`') {
    s = trim(s.substr(1, s.size() - 2));
  }
  while (!s.empty() && s.back() == ';') s = trim(s.substr(0, s.size() - 1));
  std::string out(s);
  for (std::size_t pos; (pos = out.find(":=")) != std::string::npos;) {
    out.replace(pos, 2, "=");
  }
  return out;
}

std::string tensor_symbol(std::size_t ordinal) {
  if (ordinal >= 26) {
    throw Error(ErrorCode::kTooManyIndices, "more than 26 distinct tensors");
  }
  return std::string(1, static_cast<char>('a' + ordinal));
}

class Templatizer {
 public:
  TacoExpr run(const TacoExpr& expr) {
    TacoExpr out;
    out.lhs = access(expr.lhs);
    out.rhs = node(*expr.rhs);
    return out;
  }

 private:
  TensorAccess access(const TensorAccess& a) {
    TensorAccess out;
    auto [it, inserted] = names_.emplace(a.name, "");
    if (inserted) it->second = tensor_symbol(names_.size() - 1);
    out.name = it->second;
    for (const auto& idx : a.indices) {
      auto [jt, fresh] = indices_.emplace(idx, "");
      if (fresh) {
        if (indices_.size() > kMaxRank) {
          throw Error(ErrorCode::kTooManyIndices,
                      "more than 4 distinct index variables");
        }
        jt->second = kCanonicalIndices[indices_.size() - 1];
      }
      out.indices.push_back(jt->second);
    }
    return out;
  }

  NodePtr node(const Node& n) {
    if (auto* a = n.as<TensorAccess>()) {
      return std::make_shared<const Node>(Node{access(*a)});
    }
    if (n.as<Constant>()) return make_symbolic_constant();
    if (auto* neg = n.as<Negation>()) return make_negation(node(*neg->operand));
    if (auto* b = n.as<Binary>()) {
      NodePtr lhs = node(*b->lhs);
      return make_binary(b->op, lhs, node(*b->rhs));
    }
    return make_parenthesized(node(*n.as<Parenthesized>()->inner));
  }

  std::map<std::string, std::string> names_;
  std::map<std::string, std::string> indices_;
};

}  // namespace

TemplateSet TemplateSet::from(std::vector<Template> templates) {
  TemplateSet set;
  std::set<std::string> indices;
  for (const auto& t : templates) {
    for (const auto& a : accesses(t.expr)) {
      indices.insert(a.indices.begin(), a.indices.end());
    }
  }
  set.templates = std::move(templates);
  set.unique_index_count = indices.size();
  return set;
}

std::string DimensionList::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < ranks.size(); ++i) os << (i ? "," : "") << ranks[i];
  os << ']';
  return os.str();
}

std::vector<std::string> normalize_response(std::string_view raw) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= raw.size()) {
    auto end = raw.find('\n', start);
    if (end == std::string_view::npos) end = raw.size();
    std::string line = clean_line(raw.substr(start, end - start));
    start = end + 1;
    if (line.empty() || line.rfind("```", 0) == 0) continue;
    try {
      parse_expression(line);
      out.push_back(std::move(line));
    } catch (const SyntaxError&) {
    }
  }
  if (out.empty()) {
    throw Error(ErrorCode::kEmptyCandidateSet, "no candidate expression parses");
  }
  return out;
}

Template templatize(const TacoExpr& expr, std::size_t provenance) {
  return Template{Templatizer().run(expr), provenance};
}

TemplateSet build_template_set(const std::vector<std::string>& candidates) {
  std::vector<Template> templates;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    try {
      templates.push_back(templatize(parse_expression(candidates[i]), i));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kTooManyIndices &&
          e.code() != ErrorCode::kSyntaxError) {
        throw;
      }
    }
  }
  return TemplateSet::from(std::move(templates));
}

DimensionList dimension_list(const Template& t) {
  DimensionList list;
  std::set<std::string> seen;
  seen.insert(t.expr.lhs.name);
  list.ranks.push_back(static_cast<int>(t.expr.lhs.rank()));
  visit(*t.expr.rhs, [&](const Node& n) {
    if (auto* a = n.as<TensorAccess>()) {
      if (seen.insert(a->name).second) {
        list.ranks.push_back(static_cast<int>(a->rank()));
      }
    } else if (n.as<Constant>()) {
      list.ranks.push_back(0);
    }
  });
  return list;
}

DimensionList predict_dimensions(const TemplateSet& templates, int lhs_rank) {
  if (templates.empty()) {
    throw Error(ErrorCode::kEmptyCandidateSet, "no templates to vote over");
  }
  std::vector<DimensionList> lists;
  std::size_t longest = 0;
  for (const auto& t : templates.templates) {
    lists.push_back(dimension_list(t));
    longest = std::max(longest, lists.back().size());
  }
  std::vector<std::pair<DimensionList, int>> votes;  // first-seen order
  for (const auto& l : lists) {
    if (l.size() != longest) continue;
    auto it = std::find_if(votes.begin(), votes.end(),
                           [&](const auto& v) { return v.first == l; });
    if (it == votes.end()) {
      votes.emplace_back(l, 1);
    } else {
      ++it->second;
    }
  }
  auto best = votes.begin();
  for (auto it = votes.begin(); it != votes.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  DimensionList result = best->first;
  result.ranks[0] = lhs_rank;
  return result;
}

}  // namespace stagg

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

#include "stagg/source_model.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include <json.hpp>

#include "stagg/error.hpp"
#include "stagg/evaluate.hpp"

namespace stagg {

using nlohmann::json;

const Argument* Benchmark::find_arg(std::string_view name) const {
  for (const auto& a : args) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

namespace {

[[noreturn]] void malformed(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::kMalformedDescriptor, where + ": " + what);
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> known,
                    const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      malformed(where, "unknown field '" + it.key() + "'");
    }
  }
}

const json& required(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw Error(ErrorCode::kMissingField, where + ": missing field '" + key + "'");
  }
  return *it;
}

std::string string_field(const json& obj, const char* key, const std::string& where) {
  const json& v = required(obj, key, where);
  if (!v.is_string()) malformed(where, std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

Rational number(const json& v, const std::string& where) {
  if (v.is_number_integer()) return Rational(std::to_string(v.get<long long>()));
  if (v.is_number_float()) return parse_rational(v.dump());
  if (v.is_string()) return parse_rational(v.get<std::string>());
  malformed(where, "expected a number, found " + v.dump());
}

void collect_shape(const json& v, std::size_t depth, std::vector<std::size_t>& extents,
                   std::vector<Rational>& data, const std::string& where) {
  if (!v.is_array()) {
    if (depth != extents.size()) malformed(where, "ragged tensor literal");
    data.push_back(number(v, where));
    return;
  }
  if (depth == extents.size()) {
    if (!data.empty() || v.empty()) malformed(where, "ragged or empty tensor literal");
    extents.push_back(v.size());
  } else if (extents[depth] != v.size()) {
    malformed(where, "ragged tensor literal");
  }
  for (const auto& item : v) collect_shape(item, depth + 1, extents, data, where);
}

TensorValue tensor_literal(const json& v, const std::string& where) {
  std::vector<std::size_t> extents;
  std::vector<Rational> data;
  collect_shape(v, 0, extents, data, where);
  return TensorValue(std::move(extents), std::move(data));
}

Argument parse_arg(const json& j, std::size_t pos) {
  std::string where = "args[" + std::to_string(pos) + "]";
  if (!j.is_object()) malformed(where, "expected an object");
  reject_unknown(j, {"name", "kind", "rank"}, where);
  Argument a;
  a.name = string_field(j, "name", where);
  std::string kind = string_field(j, "kind", where);
  if (kind == "scalar") {
    a.kind = ArgKind::kScalar;
  } else if (kind == "tensor") {
    a.kind = ArgKind::kTensor;
  } else {
    malformed(where, "kind must be 'scalar' or 'tensor'");
  }
  if (auto it = j.find("rank"); it != j.end()) {
    if (!it->is_number_integer()) malformed(where, "rank must be an integer");
    a.rank = it->get<int>();
  } else if (a.kind == ArgKind::kTensor) {
    throw Error(ErrorCode::kMissingField, where + ": missing field 'rank'");
  }
  if (a.kind == ArgKind::kScalar && a.rank != 0) malformed(where, "scalars have rank 0");
  if (a.kind == ArgKind::kTensor && (a.rank < 1 || a.rank > 4)) {
    malformed(where, "tensor rank must be 1..4");
  }
  return a;
}

Oracle parse_oracle(const json& j, const Benchmark& b) {
  const std::string where = "oracle";
  if (!j.is_object()) malformed(where, "expected an object");
  reject_unknown(j, {"expr", "cases"}, where);
  bool has_expr = j.contains("expr");
  bool has_cases = j.contains("cases");
  if (!has_expr && !has_cases) {
    throw Error(ErrorCode::kOracleMissing, "oracle has neither 'expr' nor 'cases'");
  }
  Oracle o;
  if (has_expr) {
    if (has_cases) {
      spdlog::warn("{}: oracle has both 'expr' and 'cases'; using 'expr'", b.name);
    }
    std::string text = string_field(j, "expr", where);
    try {
      o.expr = parse_expression(text);
    } catch (const SyntaxError& e) {
      malformed(where, e.what());
    }
    if (o.expr->lhs.name != b.output_arg) {
      malformed(where, "expression must assign " + b.output_arg);
    }
    for (const auto& a : accesses(*o.expr)) {
      const Argument* arg = b.find_arg(a.name);
      if (!arg) malformed(where, "'" + a.name + "' is not an argument");
      if (static_cast<int>(a.rank()) != arg->rank) {
        malformed(where, "'" + a.name + "' used with rank " + std::to_string(a.rank()));
      }
    }
    return o;
  }
  const json& cases = j["cases"];
  if (!cases.is_array() || cases.empty()) malformed(where, "'cases' must be a non-empty list");
  for (std::size_t k = 0; k < cases.size(); ++k) {
    std::string cw = "oracle.cases[" + std::to_string(k) + "]";
    const json& c = cases[k];
    if (!c.is_object()) malformed(cw, "expected an object");
    reject_unknown(c, {"inputs", "output"}, cw);
    const json& inputs = required(c, "inputs", cw);
    if (!inputs.is_object()) malformed(cw, "'inputs' must be an object");
    OracleCase oc;
    for (auto it = inputs.begin(); it != inputs.end(); ++it) {
      const Argument* arg = b.find_arg(it.key());
      if (!arg) malformed(cw, "'" + it.key() + "' is not an argument");
      TensorValue v = tensor_literal(it.value(), cw);
      if (static_cast<int>(v.rank()) != arg->rank) malformed(cw, "rank of '" + it.key() + "'");
      oc.inputs.emplace(it.key(), std::move(v));
    }
    oc.output = tensor_literal(required(c, "output", cw), cw);
    o.cases.push_back(std::move(oc));
  }
  return o;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingField, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Benchmark parse_benchmark(std::string_view descriptor, std::string c_source,
                          const std::filesystem::path& dir) {
  json j;
  try {
    j = json::parse(descriptor);
  } catch (const json::parse_error& e) {
    malformed("bench.json", e.what());
  }
  if (!j.is_object()) malformed("bench.json", "expected an object");
  reject_unknown(j, {"name", "args", "output_arg", "constants", "oracle", "llm_fixture"},
                 "bench.json");

  Benchmark b;
  b.dir = dir;
  b.c_source = std::move(c_source);
  b.name = string_field(j, "name", "bench.json");
  const json& args = required(j, "args", "bench.json");
  if (!args.is_array() || args.empty()) malformed("bench.json", "'args' must be a non-empty list");
  std::set<std::string> seen;
  for (std::size_t k = 0; k < args.size(); ++k) {
    b.args.push_back(parse_arg(args[k], k));
    if (!seen.insert(b.args.back().name).second) {
      malformed("bench.json", "duplicate argument '" + b.args.back().name + "'");
    }
  }
  b.output_arg = string_field(j, "output_arg", "bench.json");
  if (!b.find_arg(b.output_arg)) {
    malformed("bench.json", "output_arg '" + b.output_arg + "' is not an argument");
  }
  if (auto it = j.find("constants"); it != j.end()) {
    if (!it->is_array()) malformed("bench.json", "'constants' must be a list");
    for (const auto& c : *it) b.constants.push_back(number(c, "constants"));
  } else {
    b.constants = extract_constants(b.c_source);
  }
  if (auto it = j.find("llm_fixture"); it != j.end()) {
    if (!it->is_string()) malformed("bench.json", "'llm_fixture' must be a string");
    b.llm_fixture = dir / it->get<std::string>();
  }
  auto oracle = j.find("oracle");
  if (oracle == j.end()) {
    throw Error(ErrorCode::kOracleMissing, b.name + ": no oracle");
  }
  b.oracle = parse_oracle(*oracle, b);
  return b;
}

Benchmark load_benchmark(const std::filesystem::path& dir) {
  auto descriptor = dir / "bench.json";
  if (!std::filesystem::exists(descriptor)) {
    throw Error(ErrorCode::kMissingField, "no bench.json in " + dir.string());
  }
  std::string source;
  if (std::filesystem::exists(dir / "source.c")) source = read_file(dir / "source.c");
  Benchmark b = parse_benchmark(read_file(descriptor), std::move(source), dir);
  if (!b.llm_fixture && std::filesystem::exists(dir / "fixture.txt")) {
    b.llm_fixture = dir / "fixture.txt";
  }
  return b;
}

namespace {

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// Source with comments, string literals, preprocessor lines, loop headers
// and subscripts blanked out.
std::string executable_text(std::string_view src) {
  std::string out;
  out.reserve(src.size());
  bool line_start = true;
  for (std::size_t i = 0; i < src.size();) {
    char c = src[i];
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
      auto end = src.find("*/", i + 2);
      i = end == std::string_view::npos ? src.size() : end + 2;
      out += ' ';
      continue;
    }
    if (c == '"' || c == '\'') {
      char quote = c;
      for (++i; i < src.size() && src[i] != quote; ++i) {
        if (src[i] == '\\') ++i;
      }
      ++i;
      out += ' ';
      continue;
    }
    if (line_start && c == '#') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (c == '\n') {
      line_start = true;
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      line_start = false;
    }
    out += c;
    ++i;
  }

  // Blank `for (...)` headers and `[...]` subscripts, honoring nesting.
  std::string text = std::move(out);
  auto blank_group = [&](std::size_t open, char l, char r) {
    int depth = 0;
    for (std::size_t k = open; k < text.size(); ++k) {
      if (text[k] == l) ++depth;
      if (text[k] == r && --depth == 0) {
        std::fill(text.begin() + open, text.begin() + k + 1, ' ');
        return;
      }
    }
    std::fill(text.begin() + open, text.end(), ' ');
  };
  for (std::size_t k = 0; k + 3 <= text.size(); ++k) {
    if (text.compare(k, 3, "for") == 0 && (k == 0 || !ident_char(text[k - 1])) &&
        (k + 3 == text.size() || !ident_char(text[k + 3]))) {
      std::size_t p = k + 3;
      while (p < text.size() && std::isspace(static_cast<unsigned char>(text[p]))) ++p;
      if (p < text.size() && text[p] == '(') blank_group(p, '(', ')');
    }
  }
  for (std::size_t k = 0; k < text.size(); ++k) {
    if (text[k] == '[') blank_group(k, '[', ']');
  }
  return text;
}

}  // namespace

std::vector<Rational> extract_constants(std::string_view c_source) {
  static const std::regex literal(
      R"((0[xX][0-9a-fA-F]+|(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][+-]?[0-9]+)?)[uUlLfF]*)");
  std::string text = executable_text(c_source);
  std::vector<Rational> out;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), literal);
       it != std::sregex_iterator(); ++it) {
    std::size_t pos = static_cast<std::size_t>(it->position());
    if (pos > 0 && (ident_char(text[pos - 1]) || text[pos - 1] == '.')) continue;
    std::size_t end = pos + it->length();
    if (end < text.size() && (ident_char(text[end]) || text[end] == '.')) continue;
    std::string body = (*it)[1].str();
    Rational value;
    if (body.size() > 2 && (body[1] == 'x' || body[1] == 'X')) {
      value = Rational(mpz_class(body.substr(2), 16));
    } else if (body.find_first_of("eE") != std::string::npos) {
      auto e = body.find_first_of("eE");
      Rational mantissa = parse_rational(body.substr(0, e));
      long exp = std::stol(body.substr(e + 1));
      mpz_class scale;
      mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exp)));
      value = exp >= 0 ? Rational(mantissa * scale) : Rational(mantissa / scale);
    } else {
      if (body.back() == '.') body.pop_back();
      value = parse_rational(body);
    }
    value.canonicalize();
    if (std::find(out.begin(), out.end(), value) == out.end()) out.push_back(value);
  }
  return out;
}

int lhs_rank(const Benchmark& bench) {
  const Argument* out = bench.find_arg(bench.output_arg);
  if (!out || out->kind == ArgKind::kScalar) return 0;
  return out->rank;
}

std::optional<int> textual_output_rank(const Benchmark& bench) {
  std::regex write("\\b" + bench.output_arg +
                   R"(\s*((?:\[[^\]]*\]\s*)+)(?:=[^=]|\+=|-=|\*=|/=))");
  std::optional<int> rank;
  for (auto it = std::sregex_iterator(bench.c_source.begin(), bench.c_source.end(), write);
       it != std::sregex_iterator(); ++it) {
    std::string subs = (*it)[1].str();
    int n = static_cast<int>(std::count(subs.begin(), subs.end(), '['));
    if (rank && *rank != n) return std::nullopt;
    rank = n;
  }
  return rank;
}

int lhs_rank_checked(const Benchmark& bench) {
  int declared = lhs_rank(bench);
  if (auto seen = textual_output_rank(bench); seen && *seen != declared) {
    spdlog::warn("{}: {} is declared with rank {} but written with {} subscripts",
                 bench.name, bench.output_arg, declared, *seen);
  }
  return declared;
}

TensorValue run_oracle(const Benchmark& bench, const Bindings& inputs) {
  if (bench.oracle.expr) return evaluate(*bench.oracle.expr, inputs);
  for (const auto& c : bench.oracle.cases) {
    bool match = std::all_of(c.inputs.begin(), c.inputs.end(), [&](const auto& kv) {
      auto it = inputs.find(kv.first);
      return it != inputs.end() && it->second == kv.second;
    });
    if (match) return c.output;
  }
  throw Error(ErrorCode::kOracleMiss, bench.name + ": input not among the embedded cases");
}

}  // namespace stagg

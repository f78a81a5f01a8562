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

#include <gtest/gtest.h>

#include "stagg/error.hpp"
#include "stagg/source_model.hpp"
#include "stagg/validation.hpp"
#include "support/naive_eval.hpp"

namespace {

using stagg::ErrorCode;
using stagg::Rational;

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const stagg::Error& e) {
    return e.code();
  }
  return ErrorCode::kInvalidConfig;
}

const char* kArgs = R"j("args": [{"name": "x", "kind": "tensor", "rank": 1},
                                 {"name": "y", "kind": "tensor", "rank": 1}])j";

std::string descriptor(const std::string& rest) {
  return std::string("{\"name\": \"t\", ") + kArgs + rest + "}";
}

TEST(LoadBenchmark, PointerMatvec) {
  auto b = stagg::load_benchmark(STAGG_DATA_DIR "/benchmarks/pointer_matvec");
  ASSERT_EQ(b.args.size(), 4u);
  EXPECT_EQ(b.args[0].name, "N");
  EXPECT_EQ(b.args[0].kind, stagg::ArgKind::kScalar);
  EXPECT_EQ(b.args[1].rank, 2);
  EXPECT_EQ(b.args[3].name, "Result");
  EXPECT_EQ(b.output_arg, "Result");
  EXPECT_FALSE(b.oracle.embedded());
  ASSERT_TRUE(b.llm_fixture.has_value());
  EXPECT_EQ(b.constants, std::vector<Rational>{0});
}

TEST(ParseBenchmark, MissingOutputArg) {
  EXPECT_EQ(code_of([] {
              stagg::parse_benchmark(descriptor(R"j(, "oracle": {"expr": "y(i) = x(i)"})j"), "");
            }),
            ErrorCode::kMissingField);
}

TEST(ParseBenchmark, TensorNeedsRank) {
  EXPECT_EQ(code_of([] {
              stagg::parse_benchmark(R"j({"name": "t", "args": [{"name": "x", "kind": "tensor"}],
                  "output_arg": "x", "oracle": {"expr": "x(i) = x(i)"}})j",
                                     "");
            }),
            ErrorCode::kMissingField);
}

TEST(ParseBenchmark, UnknownFieldsRejected) {
  EXPECT_EQ(code_of([] {
              stagg::parse_benchmark(
                  descriptor(R"j(, "output_arg": "y", "oracle": {"expr": "y(i) = x(i)"}, "extra": 1)j"), "");
            }),
            ErrorCode::kMalformedDescriptor);
  EXPECT_EQ(code_of([] {
              stagg::parse_benchmark(
                  descriptor(R"j(, "output_arg": "y", "oracle": {"expr": "y(i) = x(i)", "hint": 2})j"), "");
            }),
            ErrorCode::kMalformedDescriptor);
}

TEST(ParseBenchmark, OracleMissing) {
  EXPECT_EQ(code_of([] { stagg::parse_benchmark(descriptor(R"j(, "output_arg": "y")j"), ""); }),
            ErrorCode::kOracleMissing);
}

TEST(ParseBenchmark, ExpressionWinsOverCases) {
  auto b = stagg::parse_benchmark(descriptor(R"j(, "output_arg": "y",
      "oracle": {"expr": "y(i) = x(i)", "cases": [{"inputs": {"x": [1]}, "output": [5]}]})j"),
                                  "");
  EXPECT_FALSE(b.oracle.embedded());
}

TEST(ParseBenchmark, ConstantsDeclaredOrExtracted) {
  auto declared = stagg::parse_benchmark(
      descriptor(R"j(, "output_arg": "y", "constants": [4, "1/2"], "oracle": {"expr": "y(i) = x(i)"})j"),
      "y[i] = 2 * x[i];");
  EXPECT_EQ(declared.constants, (std::vector<Rational>{4, Rational(1, 2)}));
  auto extracted = stagg::parse_benchmark(
      descriptor(R"j(, "output_arg": "y", "oracle": {"expr": "y(i) = x(i)"})j"), "y[i] = 2 * x[i];");
  EXPECT_EQ(extracted.constants, std::vector<Rational>{2});
}

TEST(ExtractConstants, Examples) {
  EXPECT_EQ(stagg::extract_constants("y[i] = 2*x[i] + 3;"), (std::vector<Rational>{2, 3}));
  EXPECT_TRUE(stagg::extract_constants("y[i] = x[i];").empty());
  EXPECT_EQ(stagg::extract_constants("for (i = 0; i < 10; i++) s += 0.5 * v[i + 1];"),
            std::vector<Rational>{Rational(1, 2)});
  EXPECT_EQ(stagg::extract_constants("// 7\n#define K 9\n/* 8 */ a = 3; b = 3; c = x2;"),
            std::vector<Rational>{3});
  EXPECT_EQ(stagg::extract_constants("a = 0x10 + 1e2;"), (std::vector<Rational>{16, 100}));
}

TEST(LhsRank, DeclaredAndTextual) {
  auto mv = stagg::load_benchmark(STAGG_DATA_DIR "/benchmarks/pointer_matvec");
  EXPECT_EQ(stagg::lhs_rank(mv), 1);
  auto dot = stagg::load_benchmark(STAGG_DATA_DIR "/benchmarks/dot");
  EXPECT_EQ(stagg::lhs_rank(dot), 0);

  auto b = stagg::parse_benchmark(
      R"j({"name": "t", "args": [{"name": "m", "kind": "tensor", "rank": 2},
          {"name": "out", "kind": "tensor", "rank": 2}], "output_arg": "out",
          "oracle": {"expr": "out(i,j) = m(j,i)"}})j",
      "for (i = 0; i < n; i++) for (j = 0; j < n; j++) out[i][j] = m[j][i];");
  EXPECT_EQ(stagg::textual_output_rank(b), std::optional<int>(2));
  EXPECT_EQ(stagg::lhs_rank_checked(b), 2);
}

TEST(RunOracle, ExpressionAndEmbedded) {
  auto mv = stagg::load_benchmark(STAGG_DATA_DIR "/benchmarks/pointer_matvec");
  stagg::Bindings in{{"N", stagg::TensorValue::scalar(2)},
                     {"Mat1", stagg::TensorValue({2, 2}, {1, 2, 3, 4})},
                     {"Mat2", stagg::TensorValue({2}, {5, 6})},
                     {"Result", stagg::TensorValue({2}, {0, 0})}};
  EXPECT_EQ(stagg::run_oracle(mv, in), stagg::TensorValue({2}, {17, 39}));

  auto emb = stagg::parse_benchmark(descriptor(R"j(, "output_arg": "y",
      "oracle": {"cases": [{"inputs": {"x": [1, 2], "y": [0, 0]}, "output": [2, 4]}]})j"),
                                    "");
  stagg::Bindings seen{{"x", stagg::TensorValue({2}, {1, 2})}, {"y", stagg::TensorValue({2}, {0, 0})}};
  EXPECT_EQ(stagg::run_oracle(emb, seen), stagg::TensorValue({2}, {2, 4}));
  stagg::Bindings novel{{"x", stagg::TensorValue({2}, {1, 3})}, {"y", stagg::TensorValue({2}, {0, 0})}};
  EXPECT_EQ(code_of([&] { stagg::run_oracle(emb, novel); }), ErrorCode::kOracleMiss);
}

TEST(RunOracle, AgreesWithNaiveEvaluatorOnBundledSuite) {
  for (const char* name : {"pointer_matvec", "matmul", "row_sum", "transpose_matvec", "chain3", "dot",
                           "axpy", "sum_reduce", "balanced"}) {
    auto b = stagg::load_benchmark(std::string(STAGG_DATA_DIR "/benchmarks/") + name);
    auto ex = stagg::generate_examples(b, 4, 3);
    for (const auto& c : ex.cases) {
      EXPECT_EQ(c.output, stagg_test::naive_evaluate(*b.oracle.expr, c.inputs)) << name;
    }
  }
}

}  // namespace

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

#include <random>

#include <gtest/gtest.h>

#include "stagg/error.hpp"
#include "stagg/taco.hpp"
#include "support/generators.hpp"

namespace {

using stagg::parse_expression;
using stagg::render;

TEST(Parse, MatvecShape) {
  auto e = parse_expression("a(i) = b(i,j) * c(j)");
  EXPECT_EQ(e.lhs.name, "a");
  ASSERT_EQ(e.lhs.indices.size(), 1u);
  const auto* b = e.rhs->as<stagg::Binary>();
  ASSERT_NE(b, nullptr);
  EXPECT_EQ(b->op, stagg::BinaryOp::kMul);
  EXPECT_EQ(b->lhs->as<stagg::TensorAccess>()->name, "b");
  EXPECT_EQ(b->rhs->as<stagg::TensorAccess>()->indices, std::vector<std::string>{"j"});
}

TEST(Parse, ColonEqualsIsEquals) {
  auto a = parse_expression("Result(i) := Mat1(f,i) * Mat2(i)");
  auto b = parse_expression("Result(i) = Mat1(f,i) * Mat2(i)");
  EXPECT_TRUE(a == b);
}

TEST(Parse, RejectsFunctionCalls) {
  EXPECT_THROW(parse_expression("Result(f) = sum(f, mat1(f,i) * mat2(i))"), stagg::SyntaxError);
}

TEST(Parse, RejectsGarbage) {
  for (const char* text : {"", "a(i) =", "= b(i)", "a(i) = b(i", "a(i) = b(i) +", "a(i) b(i)",
                           "a(i,j,k,l,m) = b(i)", "a(i) = b(i) ; c"}) {
    EXPECT_THROW(parse_expression(text), stagg::SyntaxError) << text;
  }
}

TEST(Parse, SyntaxErrorCarriesPosition) {
  try {
    parse_expression("a(i) = b(i) $ c(i)");
    FAIL();
  } catch (const stagg::SyntaxError& e) {
    EXPECT_EQ(e.position(), 12u);
  }
}

TEST(Parse, PrecedenceAndAssociativity) {
  auto e = parse_expression("a = b - c - d * e");
  const auto* top = e.rhs->as<stagg::Binary>();
  ASSERT_NE(top, nullptr);
  EXPECT_EQ(top->op, stagg::BinaryOp::kSub);
  EXPECT_NE(top->lhs->as<stagg::Binary>(), nullptr);
  EXPECT_EQ(top->rhs->as<stagg::Binary>()->op, stagg::BinaryOp::kMul);
}

TEST(Parse, ConstantsAndConst) {
  auto e = parse_expression("a(i) = Const * b(i) + 25");
  const auto* add = e.rhs->as<stagg::Binary>();
  const auto* mul = add->lhs->as<stagg::Binary>();
  EXPECT_TRUE(mul->lhs->as<stagg::Constant>()->is_symbolic());
  EXPECT_EQ(*add->rhs->as<stagg::Constant>()->value, 25);
  EXPECT_THROW(parse_expression("a = 2.5"), stagg::SyntaxError);
}

TEST(Render, Canonical) {
  EXPECT_EQ(render(parse_expression("a(i)=b(i , j)*c(j)")), "a(i) = b(i,j) * c(j)");
  EXPECT_EQ(render(parse_expression("a(i) = - b(i)")), "a(i) = -b(i)");
  EXPECT_EQ(render(parse_expression("a(i) = (b(i)+c(i))*d(i)")), "a(i) = (b(i) + c(i)) * d(i)");
}

TEST(Render, InsertsNeededParens) {
  auto sum = stagg::make_binary(stagg::BinaryOp::kAdd, stagg::make_access("b", {"i"}),
                                stagg::make_access("c", {"i"}));
  stagg::TacoExpr e{{"a", {"i"}},
                    stagg::make_binary(stagg::BinaryOp::kMul, sum, stagg::make_access("d", {"i"}))};
  EXPECT_EQ(render(e), "a(i) = (b(i) + c(i)) * d(i)");
  auto rhs_sub = stagg::make_binary(stagg::BinaryOp::kSub, stagg::make_access("b"),
                                    stagg::make_binary(stagg::BinaryOp::kSub,
                                                       stagg::make_access("c"),
                                                       stagg::make_access("d")));
  EXPECT_EQ(render(stagg::TacoExpr{{"a", {}}, rhs_sub}), "a = b - (c - d)");
}

TEST(Render, RoundTripRandom) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 1000; ++t) {
    auto e = stagg_test::random_expr(rng);
    std::string text = render(e);
    auto back = parse_expression(text);
    EXPECT_EQ(render(back), text);
    EXPECT_TRUE(stagg::structurally_equal(*stagg::strip_parens(back.rhs),
                                          *stagg::strip_parens(e.rhs)))
        << text;
  }
}

TEST(Depth, Examples) {
  EXPECT_EQ(stagg::expr_depth(parse_expression("a(i) = b(i)")), 1);
  EXPECT_EQ(stagg::expr_depth(parse_expression("a(i) = b(i) + c(i,j)")), 2);
  EXPECT_EQ(stagg::expr_depth(parse_expression("a(i) = (b(i) + c(i)) * d(i)")), 3);
}

TEST(Accesses, LhsFirst) {
  auto acc = stagg::accesses(parse_expression("x(i) = y(i,j) * z(j) + y(i,j)"));
  ASSERT_EQ(acc.size(), 4u);
  EXPECT_EQ(acc[0].name, "x");
  EXPECT_EQ(acc[2].name, "z");
}

}  // namespace

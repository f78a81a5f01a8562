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

#include <filesystem>

#include <gtest/gtest.h>

#include "stagg/error.hpp"
#include "stagg/lift.hpp"

namespace {

using stagg::LiftStatus;
using stagg::Method;

const std::string kBench = STAGG_DATA_DIR "/benchmarks";

stagg::LiftReport run(const std::string& name, stagg::LiftConfig cfg = {}) {
  return stagg::lift(stagg::load_benchmark(kBench + "/" + name), cfg);
}

TEST(Lift, MatvecTopDownAndBottomUp) {
  auto td = run("pointer_matvec");
  EXPECT_EQ(td.status, LiftStatus::kSolved);
  EXPECT_EQ(td.expr, "Result(i) = Mat1(i,j) * Mat2(j)");
  EXPECT_EQ(td.dims.to_string(), "[1,2,1]");
  stagg::LiftConfig bu;
  bu.method = Method::kBottomUp;
  auto b = run("pointer_matvec", bu);
  EXPECT_EQ(b.status, LiftStatus::kSolved);
  EXPECT_EQ(b.expr, td.expr);
}

TEST(Lift, Timeout) {
  stagg::LiftConfig cfg;
  cfg.timeout_secs = 1e-9;
  EXPECT_EQ(run("pointer_matvec", cfg).status, LiftStatus::kTimeout);
}

TEST(Lift, MissingFixtureIsError) {
  stagg::LiftConfig cfg;
  cfg.llm.fixture = "/nonexistent.txt";
  auto r = run("pointer_matvec", cfg);
  EXPECT_EQ(r.status, LiftStatus::kError);
  EXPECT_FALSE(r.message.empty());
}

TEST(Lift, FullGrammarAblation) {
  stagg::LiftConfig cfg;
  cfg.grammar = stagg::GrammarMode::kFull;
  cfg.timeout_secs = 60;
  auto r = run("copy", cfg);
  EXPECT_EQ(r.status, LiftStatus::kSolved);
}

TEST(Config, Fingerprint) {
  stagg::LiftConfig a, b;
  EXPECT_EQ(a.fingerprint(), b.fingerprint());
  EXPECT_EQ(a.fingerprint().size(), 16u);
  b.dropped.insert(stagg::Penalty::kA3);
  EXPECT_NE(a.fingerprint(), b.fingerprint());
}

TEST(Suite, EmptyDirectory) {
  auto dir = std::filesystem::temp_directory_path() / "stagg_empty_suite";
  std::filesystem::create_directories(dir);
  auto reports = stagg::run_suite(dir, {Method::kTopDown}, {});
  EXPECT_TRUE(reports.empty());
  EXPECT_EQ(stagg::to_csv(reports),
            "name,method,status,expr,seconds,templates_enumerated,templates_validated,"
            "substitutions_tried\n");
}

TEST(Suite, ParallelMatchesSerial) {
  std::vector<Method> both{Method::kTopDown, Method::kBottomUp};
  auto serial = stagg::run_suite(kBench, both, {}, 1);
  auto parallel = stagg::run_suite(kBench, both, {}, 4);
  EXPECT_EQ(stagg::to_csv(serial, false), stagg::to_csv(parallel, false));
  ASSERT_GE(serial.size(), 2u);
  EXPECT_EQ(serial[0].method, Method::kTopDown);
  EXPECT_EQ(serial[1].method, Method::kBottomUp);
  EXPECT_EQ(serial[0].name, serial[1].name);
}

TEST(Csv, QuotingAndTiming) {
  stagg::LiftReport r;
  r.name = "m";
  r.status = LiftStatus::kSolved;
  r.expr = "y(i) = M(i,j) * \"x\"(j)";
  r.seconds = 1.23456;
  r.templates_enumerated = 5;
  r.templates_validated = 2;
  r.substitutions_tried = 9;
  EXPECT_EQ(stagg::to_csv({r}).substr(stagg::to_csv({}).size()),
            "m,td,solved,\"y(i) = M(i,j) * \"\"x\"\"(j)\",1.235,5,2,9\n");
  EXPECT_EQ(stagg::to_csv({r}, false).substr(stagg::to_csv({}).size()),
            "m,td,solved,\"y(i) = M(i,j) * \"\"x\"\"(j)\",0,5,2,9\n");
}

TEST(Summary, Percentages) {
  std::vector<stagg::LiftReport> rs(3);
  for (auto& r : rs) r.method = Method::kTopDown;
  rs[0].status = LiftStatus::kSolved;
  rs[0].seconds = 2.0;
  rs[0].templates_validated = 4;
  rs[1].status = LiftStatus::kSolved;
  rs[1].seconds = 1.0;
  rs[1].templates_validated = 1;
  rs[2].status = LiftStatus::kExhausted;
  auto s = stagg::summarize(rs);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(stagg::format_summary(s), "td: solved 2/3 (66.67%), mean time 1.500 s, mean attempts 2.50\n");
  EXPECT_EQ(stagg::cactus_csv(rs),
            "method,solved,seconds,cumulative\ntd,1,1.000,1.000\ntd,2,2.000,3.000\n");
}

TEST(Method, Parse) {
  EXPECT_EQ(stagg::parse_method("bu"), Method::kBottomUp);
  EXPECT_THROW(stagg::parse_method("sideways"), stagg::Error);
}

}  // namespace

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

// Command-line driver: lift one benchmark, run a suite, or inspect the
// prompt and grammar built for a benchmark.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "stagg/candidates.hpp"
#include "stagg/error.hpp"
#include "stagg/grammar.hpp"
#include "stagg/lift.hpp"
#include "stagg/llm_client.hpp"
#include "stagg/source_model.hpp"

namespace {

struct Options {
  std::string method = "td";
  std::vector<std::string> drop;
  bool equal_probabilities = false;
  std::string grammar = "refined";
  std::string probabilities = "learned";
  std::size_t examples = 8;
  std::size_t trials = 64;
  std::uint64_t seed = 1;
  double timeout_secs = 3600.0;
  int max_depth = 6;
  bool no_default_weights = false;
  std::string out;
  std::string cactus;
  std::size_t jobs = 1;
  bool no_timing = false;
  bool live = false;
  std::string fixture;
  bool verbose = false;
  bool check_output_rank = false;
};

void add_search_options(CLI::App* app, Options& o) {
  app->add_option("--drop-penalty", o.drop, "Disable a penalty: a1..a5, b1, b2, A or B");
  app->add_flag("--equal-probabilities", o.equal_probabilities,
                "Same as --probabilities uniform");
  app->add_option("--grammar", o.grammar, "refined or full")
      ->check(CLI::IsMember({"refined", "full"}));
  app->add_option("--probabilities", o.probabilities, "learned or uniform")
      ->check(CLI::IsMember({"learned", "uniform"}));
  app->add_option("--examples", o.examples, "Validation examples per template");
  app->add_option("--trials", o.trials, "Differential verification trials");
  app->add_option("--seed", o.seed, "Random seed");
  app->add_option("--timeout-secs", o.timeout_secs, "Wall-clock budget per benchmark");
  app->add_option("--max-depth", o.max_depth, "Expression depth limit");
  app->add_flag("--no-default-weights", o.no_default_weights,
                "Give rules never used by a candidate weight 0");
  app->add_flag("--live", o.live,
                "Query STAGG_LLM_ENDPOINT instead of the benchmark fixture");
  app->add_option("--fixture", o.fixture, "Response file overriding the benchmark's");
  app->add_flag("--check-output-rank", o.check_output_rank,
                "Warn when source subscripts disagree with the declared output rank");
}

stagg::LiftConfig make_config(const Options& o) {
  stagg::LiftConfig c;
  c.method = stagg::parse_method(o.method == "both" ? "td" : o.method);
  for (const auto& id : o.drop) {
    for (auto p : stagg::parse_penalties(id)) c.dropped.insert(p);
  }
  c.grammar = o.grammar == "full" ? stagg::GrammarMode::kFull : stagg::GrammarMode::kRefined;
  c.probabilities = (o.equal_probabilities || o.probabilities == "uniform")
                        ? stagg::ProbabilityMode::kUniform
                        : stagg::ProbabilityMode::kLearned;
  c.examples = o.examples;
  c.trials = o.trials;
  if (c.trials == 0) spdlog::warn("--trials 0 accepts every validated program");
  c.seed = o.seed;
  c.timeout_secs = o.timeout_secs;
  c.max_depth = o.max_depth;
  c.default_weights = !o.no_default_weights;
  c.check_output_rank = o.check_output_rank;
  if (o.live) {
    c.llm = stagg::LlmConfig::live_from_env();
    c.llm.check();
  } else {
    c.llm.fixture = o.fixture;
  }
  return c;
}

std::vector<stagg::Method> methods(const std::string& m) {
  if (m == "both") return {stagg::Method::kTopDown, stagg::Method::kBottomUp};
  return {stagg::parse_method(m)};
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw stagg::Error(stagg::ErrorCode::kInvalidConfig, "cannot write " + path);
  out << text;
}

bool any_error(const std::vector<stagg::LiftReport>& reports) {
  for (const auto& r : reports) {
    if (r.status == stagg::LiftStatus::kError) return true;
  }
  return false;
}

int run_lift(const std::string& dir, const Options& o) {
  auto config = make_config(o);
  stagg::Benchmark bench = stagg::load_benchmark(dir);
  std::vector<stagg::LiftReport> reports;
  for (auto m : methods(o.method)) {
    config.method = m;
    reports.push_back(stagg::lift(bench, config));
  }
  for (const auto& r : reports) {
    std::printf("%s [%s] %s", r.name.c_str(), std::string(stagg::to_string(r.method)).c_str(),
                std::string(stagg::to_string(r.status)).c_str());
    if (r.status == stagg::LiftStatus::kSolved) std::printf(": %s", r.expr.c_str());
    if (r.status == stagg::LiftStatus::kError) std::printf(": %s", r.message.c_str());
    std::printf("\n  dims %s, enumerated %zu, validated %zu, substitutions %zu",
                r.dims.to_string().c_str(), r.templates_enumerated, r.templates_validated,
                r.substitutions_tried);
    if (!o.no_timing) std::printf(", %.3f s", r.seconds);
    std::printf("\n");
  }
  if (!o.out.empty()) write_file(o.out, stagg::to_csv(reports, !o.no_timing));
  return any_error(reports) ? 1 : 0;
}

int run_suite(const std::string& dir, const Options& o) {
  auto reports = stagg::run_suite(dir, methods(o.method), make_config(o), o.jobs);
  std::string csv = stagg::to_csv(reports, !o.no_timing);
  if (o.out.empty()) {
    std::fputs(csv.c_str(), stdout);
  } else {
    write_file(o.out, csv);
  }
  if (!o.cactus.empty()) write_file(o.cactus, stagg::cactus_csv(reports));
  std::fputs(stagg::format_summary(stagg::summarize(reports), !o.no_timing).c_str(), stderr);
  return any_error(reports) ? 1 : 0;
}

int run_prompt(const std::string& dir) {
  std::fputs(stagg::build_prompt(stagg::load_benchmark(dir).c_source).c_str(), stdout);
  return 0;
}

int run_grammar(const std::string& dir, const Options& o) {
  auto config = make_config(o);
  stagg::Benchmark bench = stagg::load_benchmark(dir);
  stagg::LlmConfig llm = config.llm;
  if (llm.backend == stagg::LlmBackend::kFixture && llm.fixture.empty()) {
    llm.fixture = bench.llm_fixture.value_or("");
  }
  auto templates = stagg::build_template_set(
      stagg::normalize_response(stagg::fetch_candidates(stagg::build_prompt(bench.c_source), llm)));
  for (const auto& t : templates.templates) std::printf("# %s\n", stagg::render(t.expr).c_str());
  auto dims = stagg::predict_dimensions(
      templates, o.check_output_rank ? stagg::lhs_rank_checked(bench) : stagg::lhs_rank(bench));
  std::printf("# dimension list %s\n", dims.to_string().c_str());
  stagg::TemplateGrammar g;
  if (config.grammar == stagg::GrammarMode::kFull) {
    g = stagg::generate_full_grammar(config.method == stagg::Method::kBottomUp);
  } else if (config.method == stagg::Method::kTopDown) {
    g = stagg::generate_td_grammar(dims, templates);
  } else {
    g = stagg::generate_bu_grammar(dims, templates);
  }
  g = config.probabilities == stagg::ProbabilityMode::kUniform
          ? stagg::uniform_weights(std::move(g))
          : stagg::learn_weights(std::move(g), templates, {config.default_weights});
  std::fputs(stagg::normalize(std::move(g)).dump().c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lift C loop kernels to tensor index notation"};
  app.require_subcommand(1);
  Options o;
  std::string target;
  app.add_flag("-v,--verbose", o.verbose, "Debug logging");

  auto* lift = app.add_subcommand("lift", "Lift one benchmark directory");
  lift->add_option("benchmark", target, "Benchmark directory")->required();
  lift->add_option("--method", o.method, "td, bu or both")
      ->check(CLI::IsMember({"td", "bu", "both"}));
  lift->add_option("--out", o.out, "Write the report as CSV");
  lift->add_flag("--no-timing", o.no_timing, "Report 0 seconds for reproducible output");
  add_search_options(lift, o);

  auto* suite = app.add_subcommand("suite", "Lift every benchmark under a directory");
  suite->add_option("dir", target, "Directory of benchmark directories")->required();
  suite->add_option("--method", o.method, "td, bu or both")
      ->check(CLI::IsMember({"td", "bu", "both"}));
  suite->add_option("--out", o.out, "CSV output path (default stdout)");
  suite->add_option("--cactus", o.cactus, "Write sorted solve times as CSV");
  suite->add_option("--jobs", o.jobs, "Benchmarks lifted in parallel");
  suite->add_flag("--no-timing", o.no_timing, "Report 0 seconds for reproducible output");
  add_search_options(suite, o);

  auto* prompt = app.add_subcommand("prompt", "Print the model prompt for a benchmark");
  prompt->add_option("benchmark", target, "Benchmark directory")->required();

  auto* grammar = app.add_subcommand("grammar", "Print the learned grammar for a benchmark");
  grammar->add_option("benchmark", target, "Benchmark directory")->required();
  grammar->add_option("--method", o.method, "td or bu")->check(CLI::IsMember({"td", "bu"}));
  add_search_options(grammar, o);

  CLI11_PARSE(app, argc, argv);
  spdlog::set_default_logger(spdlog::stderr_color_mt("stagg"));
  spdlog::set_level(o.verbose ? spdlog::level::debug : spdlog::level::warn);

  try {
    if (*lift) return run_lift(target, o);
    if (*suite) return run_suite(target, o);
    if (*prompt) return run_prompt(target);
    return run_grammar(target, o);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "stagg: %s\n", e.what());
    return 2;
  }
}

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

#include "stagg/lift.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <map>
#include <thread>

#include <spdlog/spdlog.h>

#include "stagg/error.hpp"
#include "stagg/grammar.hpp"
#include "stagg/validation.hpp"

namespace stagg {

std::string_view to_string(Method m) {
  return m == Method::kTopDown ? "td" : "bu";
}

std::string_view to_string(GrammarMode m) {
  return m == GrammarMode::kRefined ? "refined" : "full";
}

std::string_view to_string(ProbabilityMode m) {
  return m == ProbabilityMode::kLearned ? "learned" : "uniform";
}

std::string_view to_string(LiftStatus s) {
  switch (s) {
    case LiftStatus::kSolved: return "solved";
    case LiftStatus::kExhausted: return "exhausted";
    case LiftStatus::kTimeout: return "timeout";
    case LiftStatus::kError: return "error";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  if (text == "td") return Method::kTopDown;
  if (text == "bu") return Method::kBottomUp;
  throw Error(ErrorCode::kInvalidConfig, "unknown method '" + std::string(text) + "'");
}

std::string LiftConfig::fingerprint() const {
  std::string text = "method=" + std::string(to_string(method)) +
                     ";grammar=" + std::string(to_string(grammar)) +
                     ";probabilities=" + std::string(to_string(probabilities)) + ";drop=";
  for (Penalty p : dropped) text += std::string(to_string(p)) + ",";
  text += ";examples=" + std::to_string(examples) + ";trials=" + std::to_string(trials) +
          ";seed=" + std::to_string(seed) + ";depth=" + std::to_string(max_depth) +
          ";defaults=" + (default_weights ? "1" : "0");
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

constexpr std::uint64_t kVerifySalt = 0x9e3779b97f4a7c15ULL;

TemplateGrammar build_grammar(const LiftConfig& config, const DimensionList& dims,
                              const TemplateSet& templates) {
  TemplateGrammar g;
  if (config.grammar == GrammarMode::kFull) {
    g = generate_full_grammar(config.method == Method::kBottomUp);
  } else if (config.method == Method::kTopDown) {
    g = generate_td_grammar(dims, templates);
  } else {
    g = generate_bu_grammar(dims, templates);
  }
  if (config.probabilities == ProbabilityMode::kUniform) {
    g = uniform_weights(std::move(g));
  } else {
    g = learn_weights(std::move(g), templates, WeightOptions{config.default_weights});
    if (g.skipped_templates) {
      spdlog::debug("{} templates outside the grammar", g.skipped_templates);
    }
  }
  return normalize(std::move(g));
}

}  // namespace

LiftReport lift(const Benchmark& bench, const LiftConfig& config) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const auto deadline =
      start + std::chrono::duration_cast<Clock::duration>(
                  std::chrono::duration<double>(config.timeout_secs));

  LiftReport report;
  report.name = bench.name;
  report.method = config.method;
  report.fingerprint = config.fingerprint();
  ValidationStats vstats;
  try {
    LlmConfig llm = config.llm;
    if (llm.backend == LlmBackend::kFixture && llm.fixture.empty()) {
      if (!bench.llm_fixture) {
        throw Error(ErrorCode::kFixtureMissing, bench.name + " has no fixture");
      }
      llm.fixture = *bench.llm_fixture;
    }
    std::string raw = fetch_candidates(build_prompt(bench.c_source), llm);
    TemplateSet templates = build_template_set(normalize_response(raw));
    if (templates.empty()) {
      throw Error(ErrorCode::kEmptyCandidateSet, "no usable candidate");
    }
    int rank = config.check_output_rank ? lhs_rank_checked(bench) : lhs_rank(bench);
    report.dims = predict_dimensions(templates, rank);
    TemplateGrammar grammar = build_grammar(config, report.dims, templates);
    ExampleSet examples = generate_examples(bench, config.examples, config.seed);

    SearchContext ctx = SearchContext::for_grammar(grammar, report.dims);
    ctx.dropped = config.dropped;
    ctx.max_depth = config.max_depth;
    ctx.deadline = deadline;

    VerifyOptions vopts;
    vopts.trials = config.trials;
    vopts.seed = config.seed ^ kVerifySalt;
    VerifyFn verify = [&](const TacoExpr& program, const Substitution&) {
      return differential_verify(program, bench, vopts);
    };
    TemplateCheck check = [&](const TacoExpr& tmpl) -> std::optional<TacoExpr> {
      auto found = validate(tmpl, examples, bench, verify, &vstats, deadline);
      if (!found) return std::nullopt;
      return found->program;
    };

    SearchResult result = config.method == Method::kTopDown
                              ? enumerate_td(grammar, ctx, check)
                              : enumerate_bu(grammar, ctx, check);
    report.templates_enumerated = result.stats.templates_enumerated;
    report.templates_validated = result.stats.templates_validated;
    switch (result.status) {
      case SearchStatus::kFound:
        report.status = LiftStatus::kSolved;
        report.expr = render(*result.program);
        report.template_text = render(*result.template_expr);
        break;
      case SearchStatus::kExhausted:
        report.status = LiftStatus::kExhausted;
        break;
      case SearchStatus::kTimeout:
        report.status = LiftStatus::kTimeout;
        break;
    }
  } catch (const std::exception& e) {
    report.status = LiftStatus::kError;
    report.message = e.what();
    spdlog::error("{}: {}", bench.name, e.what());
  }
  report.substitutions_tried = vstats.substitutions_tried;
  report.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return report;
}

std::vector<LiftReport> run_suite(const std::filesystem::path& dir,
                                  const std::vector<Method>& methods,
                                  const LiftConfig& config, std::size_t jobs) {
  std::vector<std::filesystem::path> dirs;
  if (std::filesystem::is_directory(dir)) {
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (entry.is_directory() && std::filesystem::exists(entry.path() / "bench.json")) {
        dirs.push_back(entry.path());
      }
    }
  }
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty()) spdlog::warn("no benchmarks under {}", dir.string());

  struct Job {
    std::filesystem::path path;
    Method method;
  };
  std::vector<Job> work;
  for (const auto& d : dirs) {
    for (Method m : methods) work.push_back({d, m});
  }
  std::vector<LiftReport> reports(work.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next++) < work.size();) {
      LiftConfig c = config;
      c.method = work[k].method;
      try {
        reports[k] = lift(load_benchmark(work[k].path), c);
      } catch (const std::exception& e) {
        LiftReport r;
        r.name = work[k].path.filename().string();
        r.method = c.method;
        r.status = LiftStatus::kError;
        r.message = e.what();
        r.fingerprint = c.fingerprint();
        spdlog::error("{}: {}", r.name, e.what());
        reports[k] = std::move(r);
      }
    }
  };
  std::size_t n = std::max<std::size_t>(1, std::min(jobs, work.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  std::stable_sort(reports.begin(), reports.end(),
                   [](const LiftReport& a, const LiftReport& b) { return a.name < b.name; });
  return reports;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string to_csv(const std::vector<LiftReport>& reports, bool timing) {
  std::string out =
      "name,method,status,expr,seconds,templates_enumerated,templates_validated,"
      "substitutions_tried\n";
  for (const auto& r : reports) {
    out += csv_field(r.name) + "," + std::string(to_string(r.method)) + "," +
           std::string(to_string(r.status)) + "," + csv_field(r.expr) + "," +
           (timing ? fixed(r.seconds, 3) : "0") + "," +
           std::to_string(r.templates_enumerated) + "," +
           std::to_string(r.templates_validated) + "," +
           std::to_string(r.substitutions_tried) + "\n";
  }
  return out;
}

std::vector<SuiteSummary> summarize(const std::vector<LiftReport>& reports) {
  std::vector<SuiteSummary> out;
  for (Method m : {Method::kTopDown, Method::kBottomUp}) {
    SuiteSummary s;
    s.method = m;
    double seconds = 0.0, attempts = 0.0;
    for (const auto& r : reports) {
      if (r.method != m) continue;
      ++s.total;
      if (r.status != LiftStatus::kSolved) continue;
      ++s.solved;
      seconds += r.seconds;
      attempts += static_cast<double>(r.templates_validated);
    }
    if (s.total == 0) continue;
    s.percent = 100.0 * static_cast<double>(s.solved) / static_cast<double>(s.total);
    if (s.solved) {
      s.mean_seconds = seconds / static_cast<double>(s.solved);
      s.mean_attempts = attempts / static_cast<double>(s.solved);
    }
    out.push_back(s);
  }
  return out;
}

std::string format_summary(const std::vector<SuiteSummary>& summary, bool timing) {
  std::string out;
  for (const auto& s : summary) {
    out += std::string(to_string(s.method)) + ": solved " + std::to_string(s.solved) + "/" +
           std::to_string(s.total) + " (" + fixed(s.percent, 2) + "%), mean time " +
           (timing ? fixed(s.mean_seconds, 3) : std::string("0")) + " s, mean attempts " +
           fixed(s.mean_attempts, 2) + "\n";
  }
  return out;
}

std::string cactus_csv(const std::vector<LiftReport>& reports) {
  std::string out = "method,solved,seconds,cumulative\n";
  for (Method m : {Method::kTopDown, Method::kBottomUp}) {
    std::vector<double> times;
    for (const auto& r : reports) {
      if (r.method == m && r.status == LiftStatus::kSolved) times.push_back(r.seconds);
    }
    std::sort(times.begin(), times.end());
    double total = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      total += times[k];
      out += std::string(to_string(m)) + "," + std::to_string(k + 1) + "," +
             fixed(times[k], 3) + "," + fixed(total, 3) + "\n";
    }
  }
  return out;
}

}  // namespace stagg

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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails. Everything runs offline on the bundled
// fixtures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "stagg/candidates.hpp"
#include "stagg/error.hpp"
#include "stagg/evaluate.hpp"
#include "stagg/grammar.hpp"
#include "stagg/lift.hpp"
#include "stagg/llm_client.hpp"
#include "stagg/search.hpp"
#include "stagg/validation.hpp"
#include "support/generators.hpp"
#include "support/naive_eval.hpp"

namespace {

using Clock = std::chrono::steady_clock;

const std::string kBench = STAGG_DATA_DIR "/benchmarks";

struct Outcome {
  bool pass = true;
  std::string detail;
  // Everything that must be identical between two runs.
  std::string transcript;
};

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f s", s);
  return buf;
}

std::string describe(const stagg::LiftReport& r) {
  std::ostringstream os;
  os << r.name << "/" << stagg::to_string(r.method) << " " << stagg::to_string(r.status) << " '"
     << r.expr << "' enumerated=" << r.templates_enumerated
     << " validated=" << r.templates_validated << " subs=" << r.substitutions_tried << "\n";
  return os.str();
}

stagg::LiftReport lift(const std::string& name, stagg::LiftConfig cfg = {}) {
  return stagg::lift(stagg::load_benchmark(kBench + "/" + name), cfg);
}

void fail(Outcome& o, const std::string& why) {
  o.pass = false;
  o.detail += (o.detail.empty() ? "" : "; ") + why;
}

Outcome motivating_example() {
  Outcome o;
  auto t0 = Clock::now();
  auto td = lift("pointer_matvec");
  double td_secs = since(t0);
  stagg::LiftConfig bu_cfg;
  bu_cfg.method = stagg::Method::kBottomUp;
  t0 = Clock::now();
  auto bu = lift("pointer_matvec", bu_cfg);
  double bu_secs = since(t0);
  o.transcript = describe(td) + describe(bu);
  if (td.expr != "Result(i) = Mat1(i,j) * Mat2(j)") fail(o, "td gave '" + td.expr + "'");
  if (bu.status != stagg::LiftStatus::kSolved) fail(o, "bu not solved");
  if (td_secs >= 10 || bu_secs >= 10) fail(o, "too slow");
  if (td.templates_enumerated >= 500 || bu.templates_enumerated >= 500) fail(o, "too many templates");
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("td ") +
              std::to_string(td.templates_enumerated) + " templates " + seconds(td_secs) +
              ", bu " + std::to_string(bu.templates_enumerated) + " templates " + seconds(bu_secs);
  return o;
}

double op_probability(const stagg::TemplateGrammar& g, stagg::BinaryOp op) {
  for (const auto& r : g.rules()) {
    if (r.action == stagg::RuleAction::kOperator && r.op == op) return r.probability;
  }
  return -1.0;
}

bool sums_to_one(const stagg::TemplateGrammar& g, double& worst) {
  bool ok = true;
  for (std::size_t nt = 0; nt < g.nonterminal_count(); ++nt) {
    const auto& ids = g.rules_for(static_cast<int>(nt));
    if (ids.empty()) continue;
    double sum = 0.0;
    for (auto r : ids) sum += g.rule(r).probability;
    worst = std::max(worst, std::fabs(sum - 1.0));
    ok &= std::fabs(sum - 1.0) <= 1e-9;
  }
  return ok;
}

Outcome normalization() {
  Outcome o;
  std::mt19937_64 rng(2);
  double worst = 0.0;
  int grammars = 0;
  for (int t = 0; t < 100; ++t) {
    auto ts = stagg::build_template_set(
        stagg_test::random_candidates(rng, stagg_test::uniform(rng, 1, 10)));
    auto dims = stagg::predict_dimensions(ts, stagg_test::uniform(rng, 0, 3));
    for (bool bottom_up : {false, true}) {
      auto g = bottom_up ? stagg::generate_bu_grammar(dims, ts) : stagg::generate_td_grammar(dims, ts);
      g = stagg::normalize(stagg::learn_weights(std::move(g), ts));
      ++grammars;
      if (!sums_to_one(g, worst)) fail(o, "sum off by " + std::to_string(worst));
      o.transcript += std::to_string(g.rules().size()) + " ";
    }
  }
  std::vector<std::string> c;
  for (int k = 0; k < 8; ++k) c.push_back("out(i) = x(i) * y(i)");
  for (int k = 0; k < 2; ++k) c.push_back("out(i) = x(i) + y(i)");
  auto ts = stagg::build_template_set(c);
  auto g = stagg::normalize(stagg::learn_weights(
      stagg::generate_td_grammar(stagg::predict_dimensions(ts, 1), ts), ts, {false}));
  double add = op_probability(g, stagg::BinaryOp::kAdd);
  double mul = op_probability(g, stagg::BinaryOp::kMul);
  double sub = op_probability(g, stagg::BinaryOp::kSub);
  double div = op_probability(g, stagg::BinaryOp::kDiv);
  if (std::fabs(add - 0.2) > 1e-12 || std::fabs(mul - 0.8) > 1e-12 || sub != 0.0 || div != 0.0) {
    fail(o, "OP probabilities " + std::to_string(add) + "/" + std::to_string(mul));
  }
  o.transcript += g.dump();
  char buf[128];
  std::snprintf(buf, sizeof buf, "%d grammars, worst |sum-1| %.1e, ADD %.2f MUL %.2f", grammars,
                worst, add, mul);
  o.detail += (o.detail.empty() ? "" : "; ") + std::string(buf);
  return o;
}

Outcome search_optimality() {
  Outcome o;
  auto t0 = Clock::now();
  std::mt19937_64 rng(3);
  int grammars = 0;
  std::size_t pops = 0;
  stagg_test::CaseShape shape;
  shape.max_operands = 2;
  shape.max_rank = 2;
  while (grammars < 20) {
    auto ts = stagg::build_template_set(
        stagg_test::random_candidates(rng, stagg_test::uniform(rng, 1, 3), shape));
    auto dims = stagg::predict_dimensions(ts, stagg::dimension_list(ts.templates[0])[0]);
    auto g = stagg::normalize(stagg::learn_weights(stagg::generate_td_grammar(dims, ts), ts));
    if (g.rules().size() > 30) continue;
    ++grammars;

    auto ctx = stagg::SearchContext::for_grammar(g, dims);
    ctx.dropped = stagg::parse_penalties("A");
    ctx.max_depth = 3;
    double last_f = 0.0;
    bool monotone = true;
    ctx.on_pop = [&](const stagg::SearchNode& n, const stagg::PartialTemplate&) {
      monotone &= n.f() + 1e-9 >= last_f;
      last_f = n.f();
      ++pops;
    };
    auto res = stagg::enumerate_td(g, ctx, [](const stagg::TacoExpr& t) { return t; });
    auto costs = stagg_test::BruteForce(g, 3).program_costs();
    double best = *std::min_element(costs.begin(), costs.end());
    std::string label = "grammar " + std::to_string(grammars);
    if (res.status != stagg::SearchStatus::kFound) {
      fail(o, label + " not found");
      continue;
    }
    if (std::fabs(res.cost - best) > 1e-9) {
      fail(o, label + " cost " + std::to_string(res.cost) + " vs " + std::to_string(best));
    }
    if (!monotone) fail(o, label + " popped f decreased");
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu rules, %zu derivations, min %.9f, found %s\n",
                  g.rules().size(), costs.size(), best, stagg::render(*res.template_expr).c_str());
    o.transcript += buf;
  }
  double secs = since(t0);
  if (secs >= 60) fail(o, "took " + seconds(secs));
  o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(grammars) + " grammars, " +
              std::to_string(pops) + " pops, " + seconds(secs);
  return o;
}

Outcome evaluator_oracle() {
  Outcome o;
  std::mt19937_64 rng(4);
  int compared = 0, div0 = 0;
  while (compared < 200) {
    auto rc = stagg_test::random_case(rng);
    stagg::TensorValue want;
    bool naive_div0 = false;
    try {
      want = stagg_test::naive_evaluate(rc.expr, rc.bindings);
    } catch (const std::domain_error&) {
      naive_div0 = true;
    }
    std::string text = stagg::render(rc.expr);
    try {
      auto got = stagg::evaluate(rc.expr, rc.bindings);
      if (naive_div0) {
        fail(o, "no division error for " + text);
      } else if (!(got == want)) {
        fail(o, "mismatch on " + text);
      }
      o.transcript += text + " -> " + got.to_string() + "\n";
    } catch (const stagg::Error& e) {
      if (!naive_div0 || e.code() != stagg::ErrorCode::kDivisionByZero) {
        fail(o, text + ": " + e.what());
      }
    }
    if (naive_div0) {
      ++div0;
    } else {
      ++compared;
    }
  }
  o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(compared) + " expressions equal, " +
              std::to_string(div0) + " division-by-zero cases agreed";
  return o;
}

Outcome substitution_semantics() {
  Outcome o;
  auto bench = stagg::load_benchmark(kBench + "/pointer_matvec");
  auto tmpl = stagg::parse_expression("a(i) = b(i,j) * c(j)");
  auto all = stagg::enumerate_substitutions(tmpl, bench.args, bench.constants);
  auto has = [&](const char* b, const char* c) {
    stagg::Substitution s{{{"b", b}, {"c", c}}, {}};
    return std::find(all.begin(), all.end(), s) != all.end();
  };
  if (!has("Mat1", "Mat1")) fail(o, "<b->Mat1, c->Mat1> missing");
  if (!has("Mat1", "Mat2")) fail(o, "<b->Mat1, c->Mat2> missing");
  if (has("Mat1", "N")) fail(o, "<b->Mat1, c->N> present");
  if (has("N", "Mat1")) fail(o, "<b->N, c->Mat1> present");
  if (has("Mat2", "N")) fail(o, "<b->Mat2, c->N> present");
  auto examples = stagg::generate_examples(bench, 8, 1);
  auto v = stagg::validate(tmpl, examples, bench);
  std::string got = v ? v->substitution.to_string() : "none";
  if (got != "<b->Mat1, c->Mat2>") fail(o, "validate returned " + got);
  for (const auto& s : all) o.transcript += s.to_string() + "\n";
  o.transcript += got;
  o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(all.size()) +
              " substitutions, validate -> " + got;
  return o;
}

Outcome bu_structural_limit() {
  Outcome o;
  stagg::LiftConfig cfg;
  cfg.timeout_secs = 120;
  auto t0 = Clock::now();
  auto td = lift("balanced", cfg);
  double td_secs = since(t0);
  cfg.method = stagg::Method::kBottomUp;
  t0 = Clock::now();
  auto bu = lift("balanced", cfg);
  double bu_secs = since(t0);
  o.transcript = describe(td) + describe(bu);
  if (td.status != stagg::LiftStatus::kSolved) fail(o, "td not solved");
  if (bu.status == stagg::LiftStatus::kSolved || bu.status == stagg::LiftStatus::kError) {
    fail(o, "bu status " + std::string(stagg::to_string(bu.status)));
  }
  if (td_secs >= 120 || bu_secs >= 120) fail(o, "over 120 s");
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("td '") + td.expr + "' " +
              seconds(td_secs) + ", bu " + std::string(stagg::to_string(bu.status)) + " " +
              seconds(bu_secs);
  return o;
}

// True when no candidate of the fixture validates under any substitution
// and the solved program's template derives in the refined grammar.
bool neighborhood_fixture(const stagg::Benchmark& bench, const std::string& solution,
                          std::string& why) {
  stagg::LlmConfig llm;
  llm.fixture = *bench.llm_fixture;
  auto raw = stagg::fetch_candidates("", llm);
  auto ts = stagg::build_template_set(stagg::normalize_response(raw));
  auto examples = stagg::generate_examples(bench, 8, 1);
  for (const auto& t : ts.templates) {
    if (stagg::validate(t.expr, examples, bench)) {
      why = "candidate '" + stagg::render(t.expr) + "' is correct";
      return false;
    }
  }
  auto g = stagg::generate_td_grammar(stagg::predict_dimensions(ts, stagg::lhs_rank(bench)), ts);
  try {
    stagg::derive_leftmost(g, stagg::templatize(stagg::parse_expression(solution)));
  } catch (const stagg::Error& e) {
    why = e.what();
    return false;
  }
  return true;
}

Outcome bundled_suite() {
  Outcome o;
  const std::vector<std::string> required{"copy",   "scale_const", "axpy",    "dot",
                                          "matvec", "matmul",      "row_sum", "transpose_matvec",
                                          "chain3", "sum_reduce"};
  auto t0 = Clock::now();
  auto reports = stagg::run_suite(kBench, {stagg::Method::kTopDown}, {});
  double secs = since(t0);
  std::size_t solved = 0;
  for (const auto& r : reports) {
    o.transcript += describe(r);
    if (r.status == stagg::LiftStatus::kSolved) {
      ++solved;
    } else {
      fail(o, r.name + " " + std::string(stagg::to_string(r.status)));
    }
  }
  for (const auto& name : required) {
    bool found = false;
    for (const auto& r : reports) found |= r.name == name;
    if (!found) fail(o, name + " missing");
  }
  if (reports.size() < 10) fail(o, "fewer than 10 benchmarks");
  if (secs >= 60) fail(o, "took " + seconds(secs));

  int only_wrong = 0;
  for (const auto& r : reports) {
    if (r.status != stagg::LiftStatus::kSolved) continue;
    auto bench = stagg::load_benchmark(kBench + "/" + r.name);
    std::string why;
    if (neighborhood_fixture(bench, r.expr, why)) {
      ++only_wrong;
      o.transcript += "only wrong candidates: " + r.name + "\n";
    }
  }
  if (only_wrong == 0) fail(o, "no fixture with only incorrect candidates");
  o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(solved) + "/" +
              std::to_string(reports.size()) + " solved in " + seconds(secs) + ", " +
              std::to_string(only_wrong) + " fixture(s) with only incorrect candidates";
  return o;
}

Outcome ablation() {
  Outcome o;
  auto base = lift("a3_order");
  stagg::LiftConfig cfg;
  cfg.dropped = {stagg::Penalty::kA3};
  auto dropped = lift("a3_order", cfg);
  o.transcript = describe(base) + describe(dropped);
  if (base.status != stagg::LiftStatus::kSolved || dropped.status != stagg::LiftStatus::kSolved) {
    fail(o, "not solved");
  }
  if (dropped.templates_enumerated <= base.templates_enumerated) fail(o, "no increase");
  if (dropped.expr != base.expr) fail(o, "answers differ");
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("enumerated ") +
              std::to_string(base.templates_enumerated) + " -> " +
              std::to_string(dropped.templates_enumerated) + " with a3 dropped, answer '" +
              base.expr + "'";
  return o;
}

void report(int n, const char* what, const Outcome& o, bool& all) {
  std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", n, what, o.detail.c_str());
  std::fflush(stdout);
  all &= o.pass;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"motivating example", motivating_example},
      {"pCFG normalization", normalization},
      {"A* matches brute force", search_optimality},
      {"evaluator vs naive oracle", evaluator_oracle},
      {"substitution semantics", substitution_semantics},
      {"bottom-up structural limit", bu_structural_limit},
      {"bundled suite", bundled_suite},
      {"penalty ablation", ablation},
  };
  bool all = true;
  std::vector<std::string> first;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      fail(o, std::string("exception: ") + e.what());
    }
    first.push_back(o.transcript);
    report(static_cast<int>(k + 1), criteria[k].first, o, all);
  }

  Outcome det;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    std::string again;
    try {
      again = criteria[k].second().transcript;
    } catch (const std::exception& e) {
      again = e.what();
    }
    if (again != first[k]) fail(det, "criterion " + std::to_string(k + 1) + " differs");
  }
  std::vector<stagg::Method> both{stagg::Method::kTopDown, stagg::Method::kBottomUp};
  std::string serial = stagg::to_csv(stagg::run_suite(kBench, both, {}, 1), false);
  std::string parallel = stagg::to_csv(stagg::run_suite(kBench, both, {}, 4), false);
  if (serial != parallel) fail(det, "suite CSV depends on worker count");
  std::size_t bytes = serial.size();
  for (const auto& t : first) bytes += t.size();
  if (det.pass) det.detail = "two runs identical over " + std::to_string(bytes) + " bytes";
  report(9, "determinism", det, all);
  return all ? 0 : 1;
}

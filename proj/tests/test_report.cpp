// Copyright 2026 The bellab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>

#include "bellab/error.hpp"
#include "bellab/pair_source.hpp"
#include "bellab/report.hpp"
#include "bellab/run_config.hpp"

using namespace bellab;

namespace {

RunConfig build(const std::string& text) { return build_run_config(parse_config_text(text)); }

AnalysisReport run(const std::string& text) {
  const auto c = build(text);
  return analyze_log(run_experiment(c.experiment), c.coincidence, c.analysis);
}

std::string value_of(const ReportEntries& e, const std::string& key) {
  for (const auto& [k, v] : e) {
    if (k == key) return v;
  }
  return "";
}

const char* kSinglet =
    "run.seed = 11\nrun.trials = 40000\nsource.kind = singlet\nangles.preset = chsh\n"
    "analysis.inequalities = chsh, bell, ch\n";

}  // namespace

TEST(Report, SingletSlotsEndToEnd) {
  const auto r = run(kSinglet);
  ASSERT_FALSE(r.results.empty());
  EXPECT_EQ(r.results[0].name, "chsh");
  EXPECT_NEAR(r.results[0].value, 2 * std::sqrt(2.0), 0.05);
  EXPECT_TRUE(r.results[0].violated);
  ASSERT_TRUE(r.test.has_value());
  EXPECT_GT(r.test->k, 10);
  EXPECT_NEAR(r.coincidence.gamma, 1.0, 1e-12);
}

TEST(Report, SkipsInapplicableInequalities) {
  // Bell's original needs a1 = b1; CH is evaluated at CHSH angles but stays valid.
  const auto r = run(kSinglet);
  bool bell_skipped = false;
  for (const auto& s : r.skipped) bell_skipped |= s.name == "bell";
  EXPECT_TRUE(bell_skipped);
}

TEST(Report, KvRoundTrip) {
  const auto r = run(kSinglet);
  const auto kv = format_report_kv(r);
  const auto entries = parse_report_kv(kv);
  EXPECT_EQ(entries.front().first, "report.format");
  EXPECT_EQ(value_of(entries, "table.policy"), "slots");
  EXPECT_FALSE(value_of(entries, "result.chsh.estimator").empty());
  EXPECT_NEAR(std::stod(value_of(entries, "result.chsh.value")), r.results[0].value, 1e-9);
  EXPECT_FALSE(value_of(entries, "stats.p_hoeffding").empty());
  EXPECT_THROW(parse_report_kv("foo=bar\n"), ParseError);
  EXPECT_FALSE(format_report_text(r).empty());
}

TEST(Report, AssumptionWarningOnConditionalViolation) {
  const auto r = run(
      "run.seed = 3\nrun.trials = 40000\nsource.kind = singlet\nangles.preset = ch\n"
      "channel.eta_a = 0.5\nchannel.eta_b = 0.5\nanalysis.inequalities = rate_chsh\n"
      "settings.removed = true\n");
  const auto kv = format_report_kv(r);
  if (!r.results.empty() && r.results[0].violated) {
    EXPECT_NE(kv.find("WARNING violation holds only under the assumption: fair sampling"), std::string::npos);
  } else {
    ADD_FAILURE() << kv;
  }
}

TEST(Report, MemoryAdversaryFlagged) {
  const auto r = run(
      "run.seed = 7\nrun.trials = 20000\nsource.kind = lhv\nsource.lhv = memory_pr\nangles.preset = chsh\n"
      "settings.kind = periodic\nsettings.pattern_a = 1,2\nsettings.pattern_b = 1,1,2,2\n");
  ASSERT_FALSE(r.results.empty());
  EXPECT_NEAR(r.results[0].value, 4.0, 1e-12);
  bool warned = false;
  for (const auto& n : r.results[0].notes) warned |= n.find("settings predictable") != std::string::npos;
  EXPECT_TRUE(warned);
}

TEST(Report, CoarseGraining) {
  std::string text = kSinglet;
  text += "analysis.subsamples = 8\n";
  const auto r = run(text);
  ASSERT_TRUE(r.coarse.has_value());
  EXPECT_EQ(r.coarse->dof, 7);
  EXPECT_NEAR(r.coarse->beta, 2 * std::sqrt(2.0), 0.1);
}

TEST(Report, MergeSideBySide) {
  const auto a = parse_report_kv(format_report_kv(run(kSinglet)));
  const auto b = parse_report_kv(format_report_kv(run(
      "run.seed = 2\nrun.trials = 20000\nsource.kind = lhv\nsource.lhv = sign_model\nangles.preset = chsh\n")));
  const auto merged = merge_reports({{"singlet", a}, {"sign", b}});
  EXPECT_NE(merged.find("singlet"), std::string::npos);
  EXPECT_NE(merged.find("sign"), std::string::npos);
  EXPECT_NE(merged.find("result.chsh.value"), std::string::npos);
  EXPECT_THROW(merge_reports({}), ConfigError);
}

TEST(Report, MergeRejectsMixedArities) {
  const auto a = parse_report_kv(format_report_kv(run(kSinglet)));
  const auto c = parse_report_kv(format_report_kv(run(
      "run.seed = 2\nrun.trials = 20000\nsource.kind = franson\nangles.preset = franson_chained6\n"
      "source.franson_delay = 100\nsettings.arity = 3\ncoincidence.policy = window\ncoincidence.tau = 20\n"
      "analysis.inequalities = chained\n")));
  EXPECT_THROW(merge_reports({{"x", a}, {"y", c}}), ConfigError);
}

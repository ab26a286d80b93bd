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

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bellab/coincidence.hpp"
#include "bellab/correlation_table.hpp"
#include "bellab/event_model.hpp"
#include "bellab/inequalities.hpp"
#include "bellab/run_config.hpp"
#include "bellab/statistics.hpp"

namespace bellab {

struct SkippedInequality {
  std::string name;
  std::string reason;
};

struct AnalysisReport {
  LogHeader header;
  PolicyKind policy = PolicyKind::kSlots;
  CoincidenceStats coincidence;
  CorrelationTable table;
  /// Table before accidental subtraction, when subtraction was requested.
  std::optional<CorrelationTable> raw_table;
  std::vector<InequalityResult> results;
  std::vector<SkippedInequality> skipped;
  std::optional<TestReport> test;
  std::string test_skip_reason;
  std::optional<CoarseGrained> coarse;
  std::vector<std::string> warnings;
};

/// Pairs the log's events under the configured policy and tabulates them.
MatchResult match_log(const EventLog& log, const CoincidenceConfig& cc, const SettingSchedule* schedule);

AnalysisReport analyze_log(const EventLog& log, const CoincidenceConfig& cc, const AnalysisConfig& an);

/// Line-oriented `key=value` form; every number is preceded by its estimator line.
std::string format_report_kv(const AnalysisReport& r);
std::string format_report_text(const AnalysisReport& r);

using ReportEntries = std::vector<std::pair<std::string, std::string>>;
ReportEntries parse_report_kv(const std::string& text);

/// Side-by-side comparison of several key=value reports. Throws ConfigError on mixed arities.
std::string merge_reports(const std::vector<std::pair<std::string, ReportEntries>>& reports);

}  // namespace bellab

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

#include <limits>
#include <map>
#include <string>
#include <vector>

#include "bellab/correlation_table.hpp"

namespace bellab {

enum class NodetectMode : std::uint8_t { kZero, kMinusOne, kExclude };
const char* nodetect_name(NodetectMode m);

struct Bound {
  std::string name;
  double value = 2.0;
  /// "none" when the bound needs no assumption beyond local realism.
  std::string assumption = "none";
  bool established = true;
};

struct InequalityResult {
  std::string name;
  std::string estimator;
  double value = kUnavailable;
  Bound bound;
  double lower_bound = -std::numeric_limits<double>::infinity();
  std::vector<Bound> alternates;
  bool violated = false;
  double margin = 0;  // value - bound
  std::vector<std::string> notes;
  std::map<std::string, double> quantities;
};

/// Sets violated and margin from value and the governing bound.
void settle(InequalityResult& r);

/// Correlation of cell (a, b) with NODETECT handled per mode.
double cell_correlation(const CorrelationTable& t, Setting a, Setting b, NodetectMode mode);

/// Minimum over measured cells and both directions of coincidences / singles; NaN if undefined.
double conditional_efficiency(const CorrelationTable& t);
/// Minimum over measured cells of coincidences / trials; NaN without trial counts.
double coincidence_probability(const CorrelationTable& t);

InequalityResult eval_chsh(const CorrelationTable& t, NodetectMode mode);

/// Needs a1 == b1; when the table carries analyzer angles this is checked.
InequalityResult eval_bell_original(const CorrelationTable& t, double defect_tolerance = 1e-12);

enum class ChVariant : std::uint8_t { kCounts, kProbabilities };
InequalityResult eval_ch(const CorrelationTable& t, ChVariant variant);

InequalityResult eval_rate_chsh(const CorrelationTable& t);

struct NoEnhancementResult {
  InequalityResult ch_form;           // coincidences only, removed-analyzer terms
  InequalityResult chsh_form;         // non-detections as 0, bound 2 P(inf, inf)
  InequalityResult conditional_form;  // ideal polarizers
};
NoEnhancementResult eval_no_enhancement(const CorrelationTable& t);

InequalityResult eval_chained(const CorrelationTable& t, int n_terms, NodetectMode mode = NodetectMode::kExclude);

InequalityResult eval_ch_coincidence(const CorrelationTable& t);

double bound_efficiency(double eta);
double bound_coincidence(double gamma);
/// Same formula as bound_efficiency but without the cap at 4, so trivial bounds show as such.
double bound_event_ready(double eta);
double franson_chained_bound(int n_terms);

}  // namespace bellab

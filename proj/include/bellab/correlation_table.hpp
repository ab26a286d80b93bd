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

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bellab/coincidence.hpp"
#include "bellab/event_model.hpp"

namespace bellab {

/// Row/column index of an outcome inside CellCounts::n.
inline constexpr int kIdxPlus = 0;
inline constexpr int kIdxMinus = 1;
inline constexpr int kIdxNone = 2;
int outcome_index(Outcome o);

struct CellCounts {
  std::array<std::array<double, 3>, 3> n{};  // [A outcome][B outcome]
  double trials = kUnavailable;

  double coincidences() const;
  /// N++ + N-- - N+- - N-+ over coincident trials.
  double product_sum() const;
  double singles_a() const;
  double singles_b() const;
  double singles_a_plus() const { return n[kIdxPlus][0] + n[kIdxPlus][1] + n[kIdxPlus][2]; }
  double singles_b_plus() const { return n[0][kIdxPlus] + n[1][kIdxPlus] + n[2][kIdxPlus]; }
  double total() const;
  /// Conditional correlation over coincidences; throws DomainError when there are none.
  double correlation() const;
  bool has_trials() const;
};

struct CorrelationTable {
  int arity = 2;
  std::vector<CellCounts> cells;  // (arity+1)^2, setting 0 = REMOVED
  PolicyKind policy = PolicyKind::kSlots;
  bool ch_compatible = false;
  bool trials_defined = false;
  bool accidentals_subtracted = false;
  std::vector<std::string> warnings;
  /// Free-form provenance copied from the log header (angles, settings descriptor, geometry, ...).
  std::map<std::string, std::string> meta;

  explicit CorrelationTable(int arity = 2);

  CellCounts& at(Setting a, Setting b);
  const CellCounts& at(Setting a, Setting b) const;
  bool has_cell(Setting a, Setting b) const;
};

CorrelationTable build_table(const MatchResult& m, int arity, const SettingSchedule* schedule = nullptr,
                             const TrialCounts* trials = nullptr);

/// Table from complete trial records (every trial listed, NODETECT where absent).
CorrelationTable table_from_trials(std::span<const TrialRecord> trials, int arity);

}  // namespace bellab

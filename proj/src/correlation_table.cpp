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

#include "bellab/correlation_table.hpp"

#include <cmath>

#include "bellab/error.hpp"

namespace bellab {

int outcome_index(Outcome o) {
  switch (o) {
    case Outcome::kPlus: return kIdxPlus;
    case Outcome::kMinus: return kIdxMinus;
    case Outcome::kNoDetect: return kIdxNone;
  }
  return kIdxNone;
}

double CellCounts::coincidences() const { return n[0][0] + n[0][1] + n[1][0] + n[1][1]; }

double CellCounts::product_sum() const { return n[0][0] + n[1][1] - n[0][1] - n[1][0]; }

double CellCounts::singles_a() const {
  double s = 0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 3; ++j) s += n[i][j];
  }
  return s;
}

double CellCounts::singles_b() const {
  double s = 0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 2; ++j) s += n[i][j];
  }
  return s;
}

double CellCounts::total() const {
  double s = 0;
  for (const auto& row : n) {
    for (double v : row) s += v;
  }
  return s;
}

double CellCounts::correlation() const {
  const double c = coincidences();
  if (c <= 0) throw DomainError("correlation of a cell without coincidences");
  return product_sum() / c;
}

bool CellCounts::has_trials() const { return !std::isnan(trials); }

CorrelationTable::CorrelationTable(int a) : arity(a), cells(static_cast<std::size_t>((a + 1) * (a + 1))) {
  if (a < 1) throw DomainError("table arity must be positive");
}

bool CorrelationTable::has_cell(Setting a, Setting b) const { return a >= 0 && a <= arity && b >= 0 && b <= arity; }

CellCounts& CorrelationTable::at(Setting a, Setting b) {
  if (!has_cell(a, b)) {
    throw DomainError("no cell (" + std::to_string(a) + "," + std::to_string(b) + ") at arity " +
                      std::to_string(arity));
  }
  return cells[static_cast<std::size_t>(a * (arity + 1) + b)];
}

const CellCounts& CorrelationTable::at(Setting a, Setting b) const {
  return const_cast<CorrelationTable*>(this)->at(a, b);
}

CorrelationTable build_table(const MatchResult& m, int arity, const SettingSchedule* schedule,
                             const TrialCounts* trials) {
  CorrelationTable t(arity);
  t.policy = m.policy;
  t.ch_compatible = m.ch_compatible;
  std::size_t lost = 0;
  std::size_t multiple = 0;
  for (const auto& p : m.pairs) {
    if (!t.has_cell(p.setting_a, p.setting_b)) {
      ++lost;
      continue;
    }
    if (p.multiple_a || p.multiple_b) ++multiple;
    t.at(p.setting_a, p.setting_b).n[outcome_index(p.outcome_a)][outcome_index(p.outcome_b)] += 1;
  }
  for (const auto& e : m.unmatched_a) {
    const auto ctx = setting_context(e, schedule);
    if (!ctx || !t.has_cell(e.setting, ctx->b)) {
      ++lost;
      continue;
    }
    t.at(e.setting, ctx->b).n[outcome_index(to_outcome(e.channel))][kIdxNone] += 1;
  }
  for (const auto& e : m.unmatched_b) {
    const auto ctx = setting_context(e, schedule);
    if (!ctx || !t.has_cell(ctx->a, e.setting)) {
      ++lost;
      continue;
    }
    t.at(ctx->a, e.setting).n[kIdxNone][outcome_index(to_outcome(e.channel))] += 1;
  }
  if (lost > 0) {
    t.warnings.push_back(std::to_string(lost) + " single events without remote setting context were not tabulated");
  }
  if (multiple > 0) {
    t.warnings.push_back(std::to_string(multiple) + " trials had multiple events on one side; earliest kept");
  }
  const TrialCounts* tc = m.trials ? &*m.trials : trials;
  if (tc && tc->arity == arity) {
    t.trials_defined = true;
    std::size_t overfull = 0;
    for (Setting a = 0; a <= arity; ++a) {
      for (Setting b = 0; b <= arity; ++b) {
        auto& c = t.at(a, b);
        c.trials = tc->at(a, b);
        const double rest = c.trials - c.total();
        if (rest < 0) ++overfull;
        c.n[kIdxNone][kIdxNone] = std::max(0.0, rest);
      }
    }
    const bool trial_policy = m.policy == PolicyKind::kSlots || m.policy == PolicyKind::kHeralded;
    if (overfull > 0 && trial_policy) t.warnings.push_back("more events than trials in " + std::to_string(overfull) + " cells");
  }
  return t;
}

CorrelationTable table_from_trials(std::span<const TrialRecord> trials, int arity) {
  CorrelationTable t(arity);
  t.policy = PolicyKind::kSlots;
  t.ch_compatible = true;
  t.trials_defined = true;
  for (auto& c : t.cells) c.trials = 0;
  for (const auto& r : trials) {
    auto& c = t.at(r.setting_a, r.setting_b);
    c.n[outcome_index(r.outcome_a)][outcome_index(r.outcome_b)] += 1;
    c.trials += 1;
  }
  return t;
}

}  // namespace bellab

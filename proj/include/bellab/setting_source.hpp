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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bellab/event_model.hpp"

namespace bellab {

enum class SettingKind : std::uint8_t { kIidUniform, kPeriodic, kFileReplay };

struct SettingPair {
  Setting a = 1;
  Setting b = 1;
  bool operator==(const SettingPair&) const = default;
};

/// How each side picks its analyzer setting per trial (or per time bin in
/// continuous mode).
struct SettingStrategy {
  SettingKind kind = SettingKind::kIidUniform;
  int arity = 2;
  /// IID only: REMOVED joins 1..arity as one more equally likely choice.
  bool include_removed = false;
  std::vector<Setting> pattern_a;  // PERIODIC
  std::vector<Setting> pattern_b;
  std::map<std::int64_t, Setting> replay_a;  // FILE_REPLAY, keyed by trial
  std::map<std::int64_t, Setting> replay_b;
  std::string replay_path_a;
  std::string replay_path_b;
  /// Offset mixed into the RNG key so several independent setting sources can share a seed.
  std::uint64_t stream = 0;
};

/// Throws ConfigError for an empty pattern, out-of-range settings or arity < 1.
void validate(const SettingStrategy& s);

/// Pure function of (strategy, seed, trial). Throws MissingDataError when a
/// replay file has no entry for `trial`.
SettingPair settings_for_trial(const SettingStrategy& s, std::int64_t trial, std::uint64_t seed);

/// One-line descriptor stored in log headers, e.g. `iid:arity=2`,
/// `periodic:arity=2;a=1,2;b=1,1,2,2` or `replay:arity=2;a=sa.csv;b=sb.csv`.
std::string describe(const SettingStrategy& s);
SettingStrategy parse_setting_descriptor(const std::string& text);

/// Reads the two-column `trial,setting` replay CSVs (an optional header line
/// `trial,setting` is skipped; `inf` means REMOVED).
SettingStrategy load_replay(const std::string& path_a, const std::string& path_b, int arity);
std::map<std::int64_t, Setting> read_replay_csv(const std::string& path);

/// True when a remote observer can predict every future setting.
bool is_predictable(const SettingStrategy& s);

/// Maps time to setting bins: bin k spans [origin + k*bin_length, origin + (k+1)*bin_length).
/// In slotted runs a bin is a trial.
struct SettingSchedule {
  SettingStrategy strategy;
  std::uint64_t seed = 0;
  Ticks origin = 0;
  Ticks bin_length = 1;
  std::int64_t n_bins = 0;

  std::int64_t bin_of(Ticks t) const;
  SettingPair settings(std::int64_t bin) const { return settings_for_trial(strategy, bin, seed); }
};

void write_schedule(LogHeader& header, const SettingSchedule& schedule);
/// Rebuilds the schedule recorded by write_schedule; nullopt if the header has none.
std::optional<SettingSchedule> schedule_from_header(const LogHeader& header);

}  // namespace bellab

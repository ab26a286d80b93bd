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
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bellab/event_model.hpp"
#include "bellab/setting_source.hpp"

namespace bellab {

/// Setting of a side whose analyzer state is not recoverable from the data.
inline constexpr Setting kUnknownSetting = -1;
inline constexpr Ticks kInfiniteWindow = std::numeric_limits<Ticks>::max();

enum class PolicyKind : std::uint8_t { kWindow, kSlots, kAsymmetric, kHeralded };
const char* policy_name(PolicyKind p);

struct PairedTrial : TrialRecord {
  bool multiple_a = false;  // more than one event fell into this trial; earliest kept
  bool multiple_b = false;
};

/// Per-setting-pair full window widths for ASYMMETRIC matching; coincidence iff
/// 2|t_a - t_b| <= tau(i, j).
struct AsymmetricWindows {
  std::array<std::array<Ticks, 2>, 2> tau{};  // [a-1][b-1]
  bool ch_compatible = false;

  Ticks width(Setting a, Setting b) const;
  /// (tau, tau, tau, 3 tau): three small windows nested inside the large (2,2) one.
  static AsymmetricWindows ch_default(Ticks tau);
  /// tau(2,2)/2 >= tau(1,1)/2 + tau(1,2)/2 + tau(2,1)/2.
  bool satisfies_nesting() const;
};

/// Number of trials per setting pair, indexed cell(a, b) with 0 = REMOVED.
struct TrialCounts {
  int arity = 2;
  std::vector<double> per_cell;

  std::size_t cell(Setting a, Setting b) const {
    return static_cast<std::size_t>(a) * static_cast<std::size_t>(arity + 1) + static_cast<std::size_t>(b);
  }
  double at(Setting a, Setting b) const { return per_cell[cell(a, b)]; }
  double total() const;
};

struct MatchResult {
  PolicyKind policy = PolicyKind::kWindow;
  bool ch_compatible = false;
  std::vector<PairedTrial> pairs;
  std::vector<DetectionEvent> unmatched_a;
  std::vector<DetectionEvent> unmatched_b;
  /// Set when the policy defines trials independent of detections (SLOTS, HERALDED).
  std::optional<TrialCounts> trials;
};

/// Greedy nearest-neighbour matching: candidate pairs with 2|t_a - t_b| <= tau are
/// accepted in order of increasing |t_a - t_b| (ties by t_a + t_b, then position),
/// each event used at most once. Inputs must be time-sorted.
MatchResult match_window(std::span<const DetectionEvent> a, std::span<const DetectionEvent> b, Ticks tau);

/// As match_window with the window chosen by the realized setting pair of the candidate.
/// Throws ConfigError when an event has no usable setting, or when ch_compatible is
/// claimed for widths that do not nest.
MatchResult match_asymmetric(std::span<const DetectionEvent> a, std::span<const DetectionEvent> b,
                             const AsymmetricWindows& windows);

/// Fixed slots [origin + k*len, origin + (k+1)*len). Events in a slot pair up; an
/// empty half becomes NODETECT. With a schedule, every slot of the scheduled span is
/// a trial and empty-side settings are recovered.
MatchResult match_slots(std::span<const DetectionEvent> a, std::span<const DetectionEvent> b, Ticks slot_len,
                        Ticks origin, const SettingSchedule* schedule = nullptr);

/// Each herald is one trial; an event belongs to the nearest herald within
/// `tolerance`. Events near no herald are returned unmatched.
MatchResult match_heralded(std::span<const DetectionEvent> a, std::span<const DetectionEvent> b,
                           std::span<const Ticks> heralds, Ticks tolerance,
                           const SettingSchedule* schedule = nullptr);

/// Trial counts per setting pair over all bins of a schedule.
TrialCounts count_trials(const SettingSchedule& schedule);

inline constexpr double kUnavailable = std::numeric_limits<double>::quiet_NaN();

struct CellCoincidence {
  double coincidences = 0;
  double singles_a = 0;  // A detections during trials of this setting pair
  double singles_b = 0;
  double trials = kUnavailable;
  double gamma = kUnavailable;         // coincidences / trials
  double eta_given_b = kUnavailable;   // P(coinc | B_j det)
  double eta_given_a = kUnavailable;   // P(coinc | A_i det)
  bool defined = false;
};

struct CoincidenceStats {
  int arity = 2;
  std::vector<CellCoincidence> cells;  // (arity+1)^2, 0 = REMOVED
  /// Minimum over measured settings 1..arity; NaN when UNAVAILABLE.
  double gamma = kUnavailable;
  double eta = kUnavailable;
  bool gamma_available = false;
  std::vector<std::string> notes;

  const CellCoincidence& at(Setting a, Setting b) const {
    return cells[static_cast<std::size_t>(a) * static_cast<std::size_t>(arity + 1) + static_cast<std::size_t>(b)];
  }
};

/// Remote setting of an unmatched event, recovered from its trial id or time bin.
std::optional<SettingPair> setting_context(const DetectionEvent& e, const SettingSchedule* schedule);

/// Coincidence probabilities gamma_ij (only when trials are well defined) and the
/// conditional coincidence efficiencies min over cells of coinc / singles.
/// `schedule` recovers remote settings of unmatched events; `trials` supplies trial
/// counts when the policy itself does not define trials (e.g. WINDOW on a slotted run).
CoincidenceStats coincidence_stats(const MatchResult& m, int arity, const SettingSchedule* schedule = nullptr,
                                   const TrialCounts* trials = nullptr);

}  // namespace bellab

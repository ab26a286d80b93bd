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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bellab/channel_model.hpp"
#include "bellab/correlation_table.hpp"
#include "bellab/event_model.hpp"
#include "bellab/setting_source.hpp"
#include "bellab/strategies.hpp"

namespace bellab {

enum class LhvKind : std::uint8_t { kSignModel, kFairCoin, kMemoryPr, kTable, kDelayTable };
const char* lhv_name(LhvKind k);

struct LhvStrategy {
  LhvKind kind = LhvKind::kSignModel;
  Mixture<DetStrategy> table;  // TABLE
  DelayWitness delay_table;    // DELAY_TABLE
  Ticks delay_slot_ticks = 1;  // DELAY_TABLE: ticks per delay slot
  /// MEMORY_PR: remote setting pattern, when the settings are known to be periodic.
  std::vector<Setting> memory_pattern_b;
  /// MEMORY_PR without a pattern: period assumed when extrapolating the remote history.
  int memory_period = 2;
  /// Cumulative mixture weights; filled by prepare().
  std::vector<double> cumulative;

  bool has_memory() const { return kind == LhvKind::kMemoryPr; }
  void prepare();
};

struct HiddenVariable {
  double angle = 0;         // SIGN_MODEL, uniform on [0, 2pi)
  std::uint64_t bits = 0;   // FAIR_COIN
  std::size_t row = 0;      // TABLE / DELAY_TABLE
};

HiddenVariable draw_hidden(const LhvStrategy& s, std::uint64_t seed, std::uint64_t trial);

/// What a memory adversary has learned from earlier trials.
struct MemoryState {
  std::vector<Setting> remote_b;
  bool fallback = false;
  std::int64_t fallback_trial = -1;

  Setting predict_b(const LhvStrategy& s, std::int64_t trial) const;
  /// Records the realized remote setting; switches to the fallback on a contradiction.
  void observe(const LhvStrategy& s, std::int64_t trial, Setting b);
};

/// Local response of an LHV strategy. Only the local setting (and its analyzer angle) is visible.
LocalResponse lhv_respond(const LhvStrategy& s, const HiddenVariable& lambda, Site side, Setting local,
                          double local_angle, const MemoryState* memory = nullptr, std::int64_t trial = 0);

std::pair<int, int> sample_singlet(double a_angle, double b_angle, std::uint64_t seed, std::uint64_t trial);

/// Born-rule probabilities (++, +-, -+, --) for cos r |HH> + sin r |VV> measured with linear
/// analyzers at angles a and b.
std::array<double, 4> two_qubit_probabilities(double r, double a_angle, double b_angle);
/// Marginal probability of + at one side.
double two_qubit_marginal_plus(double r, double angle);
std::pair<int, int> sample_two_qubit(double r, double a_angle, double b_angle, std::uint64_t seed,
                                     std::uint64_t trial);

struct FransonSample {
  int a = 1;
  int b = 1;
  bool long_a = false;
  bool long_b = false;
};
FransonSample sample_franson(double a_phase, double b_phase, std::uint64_t seed, std::uint64_t trial);

enum class SourceKind : std::uint8_t { kSinglet, kTwoQubit, kFranson, kLhv };
const char* source_name(SourceKind k);

struct SourceConfig {
  SourceKind kind = SourceKind::kSinglet;
  double schmidt_r = 0.7853981633974483;  // TWO_QUBIT
  Ticks franson_delay = 0;                // FRANSON: long-arm delay
  LhvStrategy lhv;
  /// Analyzer angle (or phase) per setting index; index 0 (REMOVED) is ignored.
  std::vector<double> angles_a{0.0, 0.0, 0.0};
  std::vector<double> angles_b{0.0, 0.0, 0.0};
};

struct TimingConfig {
  LogMode mode = LogMode::kSlotted;
  Ticks trial_period = 1000;  // slotted: ticks between trials
  double pair_rate_hz = 0;    // continuous: Poisson emission rate
  Ticks duration = 0;         // continuous: ticks
  Ticks setting_bin = 1000;   // continuous: ticks per setting choice
};

struct ExperimentConfig {
  SourceConfig source;
  SettingStrategy settings;
  ChannelConfig channel;
  TimingConfig timing;
  std::int64_t n_trials = 0;  // slotted mode
  std::uint64_t seed = 0;
  int threads = 1;
};

void validate(const ExperimentConfig& cfg);

/// The setting schedule the run uses, as recorded in the log header.
SettingSchedule experiment_schedule(const ExperimentConfig& cfg);

/// Slotted runs: one record per trial with channel effects applied.
std::vector<TrialRecord> run_trials(const ExperimentConfig& cfg);
/// Slotted runs tabulated directly, without materializing events.
CorrelationTable run_table(const ExperimentConfig& cfg);

EventLog run_experiment(const ExperimentConfig& cfg);

}  // namespace bellab

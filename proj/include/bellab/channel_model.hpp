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
#include <string>
#include <vector>

#include "bellab/correlation_table.hpp"
#include "bellab/event_model.hpp"
#include "bellab/setting_source.hpp"
#include "bellab/strategies.hpp"

namespace bellab {

struct DetectorEfficiency {
  double plus = 1.0;
  double minus = 1.0;

  static DetectorEfficiency uniform(double eta) { return {eta, eta}; }
  double for_outcome(int outcome) const { return outcome > 0 ? plus : minus; }
};

struct ChannelConfig {
  DetectorEfficiency eta_a;
  DetectorEfficiency eta_b;
  double dark_rate_hz = 0.0;  // per detector
  double jitter_sigma = 0.0;  // ticks
};

void validate(const ChannelConfig& cfg);

/// Loss, jitter and analyzer-removed semantics for one side of one trial.
/// With the analyzer REMOVED every arriving particle is a potential count on the + channel.
LocalResponse apply_channel(const LocalResponse& response, const ChannelConfig& cfg, Site side, Setting setting,
                            std::uint64_t seed, std::uint64_t trial);

/// Superposes Poisson dark counts on both detectors of a continuous-mode log.
/// Needs `duration_ns` and a setting schedule in the header to label the extra events.
EventLog inject_dark_counts(const EventLog& log, const ChannelConfig& cfg, std::uint64_t seed);

struct AccidentalCell {
  double duty_s = 0;  // time the setting pair was active
  std::array<double, 2> rate_a{};  // singles rate per channel (+, -) while active, 1/s
  std::array<double, 2> rate_b{};
  std::array<std::array<double, 2>, 2> expected{};  // accidental coincidences per channel pair
  double rate_hz() const;
  double total() const;
};

struct AccidentalEstimate {
  int arity = 2;
  Ticks tau = 0;
  std::vector<AccidentalCell> cells;  // (arity+1)^2
  const AccidentalCell& at(Setting a, Setting b) const {
    return cells[static_cast<std::size_t>(a * (arity + 1) + b)];
  }
};

/// S_A * S_B * tau * T per setting pair and channel pair, singles restricted to duty time.
AccidentalEstimate estimate_accidentals(const EventLog& log, Ticks tau);

/// Rate of accidental coincidences for two independent streams.
double accidental_rate_hz(double singles_a_hz, double singles_b_hz, Ticks tau_ns);

/// Removes expected accidentals from coincident counts; negative cells clip to 0 with a warning.
CorrelationTable subtract_accidentals(const CorrelationTable& table, const AccidentalEstimate& acc);

}  // namespace bellab

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
#include <iosfwd>
#include <string>
#include <vector>

#include "bellab/event_model.hpp"

namespace bellab {

/// What one site emits for one trial before channel effects.
struct LocalResponse {
  int outcome = +1;  // +1 or -1
  bool detected = true;
  Ticks delay = 0;  // meaningful only when detected

  bool operator==(const LocalResponse&) const = default;
};

/// Deterministic local strategy for two settings: outcome and detection flag per setting.
struct LocalDetStrategy {
  std::array<std::int8_t, 2> outcome{1, 1};
  std::array<bool, 2> detect{true, true};

  bool operator==(const LocalDetStrategy&) const = default;
};

struct DetStrategy {
  LocalDetStrategy a;
  LocalDetStrategy b;

  bool operator==(const DetStrategy&) const = default;
};

/// Deterministic local strategy with a discrete detection delay slot per setting.
struct LocalDelayStrategy {
  std::array<std::int8_t, 2> outcome{1, 1};
  std::array<int, 2> slot{0, 0};

  bool operator==(const LocalDelayStrategy&) const = default;
};

struct DelayStrategy {
  LocalDelayStrategy a;
  LocalDelayStrategy b;

  bool operator==(const DelayStrategy&) const = default;
};

/// Probability mixture of deterministic strategies; weights are nonnegative and sum to 1.
template <typename S>
struct Mixture {
  std::vector<double> weights;
  std::vector<S> strategies;

  std::size_t size() const { return weights.size(); }
};

/// Throws ValidationError if a weight is negative, sizes differ, or the weights do not sum to 1 (1e-9).
template <typename S>
void validate(const Mixture<S>& m);

/// The 9 local strategies: per setting one of {+1 detected, -1 detected, not detected}.
/// Undetected entries carry outcome +1 so the enumeration is duplicate-free.
std::vector<LocalDetStrategy> enumerate_local_det();
/// All 81 joint strategies, A-major order.
std::vector<DetStrategy> enumerate_det();
/// The (2d)^2 local delay strategies for d slots.
std::vector<LocalDelayStrategy> enumerate_local_delay(int slots);

/// Witness files: `#kind=det` or `#kind=delay` plus `#slots`, `#window`, then one
/// row per strategy with the weight printed to round-trip exactly.
struct DelayWitness {
  Mixture<DelayStrategy> mixture;
  int slots = 0;
  int window = 0;
};
void write_det_witness(const Mixture<DetStrategy>& m, std::ostream& out);
void write_delay_witness(const DelayWitness& w, std::ostream& out);
Mixture<DetStrategy> read_det_witness(std::istream& in);
DelayWitness read_delay_witness(std::istream& in);

}  // namespace bellab

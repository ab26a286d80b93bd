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

namespace bellab {

/// Independent random streams. Every draw in the library is keyed on
/// (seed, stream, counter) so that results do not depend on evaluation order.
enum class Stream : std::uint64_t {
  kSettingsA = 1,
  kSettingsB = 2,
  kSource = 3,
  kChannelA = 4,
  kChannelB = 5,
  kDarkA = 6,
  kDarkB = 7,
  kEmission = 8,
  kLambda = 9,
  kOptimizer = 10,
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Counter-based generator: the state is a hash of (seed, stream, counter),
/// after which draws follow the SplitMix64 sequence. Cheap to construct, so a
/// fresh instance is created per trial.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, Stream stream, std::uint64_t counter);
  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1]; safe to take the logarithm of.
  double uniform_open0();
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p);
  /// +1 or -1 with equal probability.
  int fair_sign();
  /// Standard normal via Box-Muller (one value per call, the pair partner is discarded).
  double normal();
  double exponential(double rate);

  // UniformRandomBitGenerator interface so standard distributions can draw from it.
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return next_u64(); }

 private:
  std::uint64_t state_;
};

}  // namespace bellab

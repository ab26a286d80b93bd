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
#include <span>
#include <vector>

#include "bellab/correlation_table.hpp"
#include "bellab/nelder_mead.hpp"
#include "bellab/strategies.hpp"

namespace bellab {

struct ConditionalChshResult {
  double value = 0;
  Mixture<DetStrategy> witness;
  std::array<int, 2> signs{1, 1};  // s1 (E11 + E12) + s2 (E21 - E22)
};

/// Largest conditional CHSH over mixtures of the 81 deterministic detect/no-detect strategies with
/// every conditional detection probability at least eta_a (A given B) and eta_b (B given A).
ConditionalChshResult max_conditional_chsh(double eta_a, double eta_b);

/// Coincidence rule for delay strategies, in slot units: cell (i,j) is coincident iff
/// |slot_A(i) - slot_B(j)| <= max_diff[i-1][j-1].
struct WindowRule {
  std::array<std::array<int, 2>, 2> max_diff{};
  bool all_coincident = false;

  static WindowRule symmetric(int w);
  /// Full widths (t, t, t, 3t) with t = 2w + 1 slots.
  static WindowRule ch_compatible(int w);
  static WindowRule slots();
  bool coincident(const DelayStrategy& s, Setting a, Setting b) const;
};

struct WindowedResult {
  double value = 0;
  double gamma = 1;  // minimum coincidence probability of the witness
  DelayWitness witness;
  std::array<int, 2> signs{1, 1};
};

/// Largest coincidence-conditioned CHSH over delay-strategy mixtures with every setting pair
/// coincident with probability at least gamma_min. d slots, window w slots.
WindowedResult max_windowed_chsh(double gamma_min, int d, int w);

/// Largest CH-with-coincidence value (bound 0) over delay-strategy mixtures under a plain window.
WindowedResult max_windowed_ch(int d, int w);

/// Exact population table of a mixture: cell counts are probabilities, one trial per cell.
CorrelationTable det_population_table(const Mixture<DetStrategy>& m);
CorrelationTable delay_population_table(const DelayWitness& w, const WindowRule& rule, PolicyKind policy,
                                        bool ch_compatible);

enum class StateRestriction : std::uint8_t { kOptimal, kMaximal };

struct EberhardResult {
  double value = 0;
  double r = 0;  // Schmidt angle
  std::array<double, 2> a{};
  std::array<double, 2> b{};
};

/// CH with detection folded in: eta_a eta_b J - eta_a P(A1) - eta_b P(B1), maximized over the
/// two-qubit state and four analyzer angles.
double eberhard_ch(double eta_a, double eta_b, double r, const std::array<double, 2>& a,
                   const std::array<double, 2>& b);
EberhardResult optimize_eberhard(double eta_a, double eta_b, StateRestriction restriction = StateRestriction::kOptimal,
                                 const MultiStartOptions& opt = {});

enum class EtaSweep : std::uint8_t { kSymmetric, kAFixedOne };

struct CriticalEta {
  double bisection = 0;  // where the optimized maximum first exceeds the threshold
  double ratio = 0;      // infimum of the scale-free ratio at which CH changes sign
};
CriticalEta critical_eta(StateRestriction restriction, EtaSweep sweep, const MultiStartOptions& opt = {},
                         double threshold = 1e-9);

struct CurvePoint {
  double eta = 0;
  EberhardResult best;
};
std::vector<CurvePoint> critical_eta_curve(StateRestriction restriction, EtaSweep sweep, std::span<const double> grid,
                                           const MultiStartOptions& opt = {});

}  // namespace bellab

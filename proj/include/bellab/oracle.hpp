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

#include <string>
#include <utility>
#include <vector>

#include "bellab/nelder_mead.hpp"

namespace bellab {

struct OracleOutput {
  std::string csv;
  /// (file name, contents) of witness strategy tables, replayable with source.lhv = table / delay_table.
  std::vector<std::pair<std::string, std::string>> witnesses;
};

/// LP maximum of conditional CHSH on an even eta grid over [eta_lo, 1].
OracleOutput oracle_efficiency_curve(int points, double eta_lo = 0.5);

/// LP maximum of windowed CHSH with d delay slots and window w on a gamma grid (0.8787 always included).
OracleOutput oracle_coincidence_curve(int d, int w, int points, double gamma_lo = 0.6);

/// Optimized Eberhard CH over an eta grid for both state families, plus a crossing table.
OracleOutput oracle_eberhard(int points, const MultiStartOptions& opt = {});

}  // namespace bellab

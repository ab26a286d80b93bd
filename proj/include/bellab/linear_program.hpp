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

#include <vector>

namespace bellab {

/// maximize c.x subject to le x <= b_le, ge x >= b_ge, eq x = b_eq, x >= 0.
struct LinearProgram {
  std::vector<double> c;
  std::vector<std::vector<double>> le, ge, eq;
  std::vector<double> b_le, b_ge, b_eq;

  std::size_t n() const { return c.size(); }
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  double value = 0;
  std::vector<double> x;
};

/// Dense two-phase simplex with Bland's rule; intended for a few dozen rows.
LpSolution solve_lp(const LinearProgram& lp);

}  // namespace bellab

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
#include <functional>
#include <vector>

namespace bellab {

using Objective = std::function<double(const std::vector<double>&)>;

struct NelderMeadOptions {
  double initial_step = 0.1;
  double f_tolerance = 1e-9;  // stop when the simplex spread in f falls below this
  double x_tolerance = 1e-10;
  int max_evaluations = 20000;
};

struct NelderMeadResult {
  std::vector<double> x;
  double f = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Minimizes f from x0.
NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0, const NelderMeadOptions& opt = {});

struct MultiStartOptions {
  int starts = 64;
  std::uint64_t seed = 0;
  NelderMeadOptions local;
};

/// Best of local searches from starts drawn uniformly in the box [lo, hi]; ties keep the earliest start.
NelderMeadResult multi_start_minimize(const Objective& f, const std::vector<double>& lo, const std::vector<double>& hi,
                                      const MultiStartOptions& opt = {});

}  // namespace bellab

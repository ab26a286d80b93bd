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
#include <string>
#include <vector>

#include "bellab/correlation_table.hpp"

namespace bellab {

struct CorrelationEstimate {
  double value = 0;
  double n = 0;
};

/// Mean of +-1 products.
CorrelationEstimate estimate_correlation(std::span<const int> products);

/// N/(N-1) (1 - E^2), the unbiased variance of +-1 data with mean E.
double sample_variance(double e, double n);

struct BetaStar {
  double beta = 0;
  double s = 0;  // standard deviation of beta
  std::array<double, 4> e{};   // E11, E12, E21, E22
  std::array<double, 4> s2{};  // per-cell sample variance
  std::array<double, 4> n{};   // per-cell coincidences
  bool equal_n = false;
  double s_shortcut = 0;  // s / sqrt(N) with the pooled four-cell s, when all N agree
};

/// CHSH estimate from conditional correlations, with the variance of the four-cell sum.
BetaStar beta_star(const CorrelationTable& t);

double k_sigma(double beta, double s, double bound = 2.0);

/// 1 - Phi(x).
double normal_upper_tail(double x);

struct NormalPValue {
  double tail = 1;    // 1 - Phi(k)
  double bound = 1;   // exp(-k^2/2) / (k sqrt(2 pi)), clipped to 1
  bool clipped = false;
};
NormalPValue p_value_normal(double k);

/// exp(-N (beta - 2)^2 / 32) with N the smallest per-cell count; 1 when beta <= 2.
double p_value_hoeffding(double beta, double n_min);
double p_value_hoeffding(double beta, std::span<const double> n_cells);

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);
/// P(T > t) for Student's t with dof degrees of freedom.
double student_t_upper(double t, double dof);

struct CoarseGrained {
  double beta = 0;
  double s = 0;  // standard error of the mean
  double t = 0;
  int dof = 0;
  double p = 1;
  bool degenerate = false;
};
CoarseGrained coarse_grained_t(std::span<const double> subsample_values, double bound = 2.0);

struct TestReport {
  BetaStar estimate;
  double k = 0;
  NormalPValue p_normal;
  double p_hoeffding = 1;
  std::vector<std::string> flags;
};

TestReport make_test_report(const CorrelationTable& t);

}  // namespace bellab
